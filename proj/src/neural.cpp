#include "tsfs/neural.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <string>

#include "tsfs/errors.hpp"

namespace tsfs {

DenseNet::DenseNet(std::vector<std::size_t> sizes, OutputActivation output, std::uint64_t seed) : output_(output) {
    if (sizes.size() < 2) throw InvalidInput("DenseNet needs at least an input and an output size");
    for (std::size_t s : sizes)
        if (s == 0) throw InvalidInput("DenseNet layer sizes must be positive");
    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t in = sizes[l];
        const std::size_t out = sizes[l + 1];
        const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Layer layer{Matrix(in, out), Vector(out, 0.0)};
        for (double& w : layer.w.values()) w = dist(rng);
        layers_.push_back(std::move(layer));
    }
}

DenseNet::DenseNet(std::vector<Layer> layers, OutputActivation output) : layers_(std::move(layers)), output_(output) {
    if (layers_.empty()) throw InvalidInput("DenseNet needs at least one layer");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        if (layers_[l].b.size() != layers_[l].w.cols()) throw InvalidInput("bias length does not match layer width");
        if (l > 0 && layers_[l].w.rows() != layers_[l - 1].w.cols())
            throw InvalidInput("layer " + std::to_string(l) + " input does not match previous output");
    }
    if (!all_finite()) throw InvalidInput("DenseNet parameters must be finite");
}

std::size_t DenseNet::parameter_count() const noexcept {
    std::size_t n = 0;
    for (const auto& l : layers_) n += l.w.size() + l.b.size();
    return n;
}

std::vector<std::span<double>> DenseNet::parameter_spans() {
    ++generation_;
    std::vector<std::span<double>> out;
    for (auto& l : layers_) {
        out.emplace_back(l.w.values());
        out.emplace_back(l.b);
    }
    return out;
}

bool DenseNet::all_finite() const noexcept {
    for (const auto& l : layers_) {
        if (!l.w.all_finite()) return false;
        for (double v : l.b)
            if (!std::isfinite(v)) return false;
    }
    return true;
}

Gradients Gradients::zeros_like(const DenseNet& net) {
    Gradients g;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        g.dw.emplace_back(net.layer(l).w.rows(), net.layer(l).w.cols());
        g.db.emplace_back(net.layer(l).b.size(), 0.0);
    }
    return g;
}

std::vector<std::span<const double>> Gradients::spans() const {
    std::vector<std::span<const double>> out;
    for (std::size_t l = 0; l < dw.size(); ++l) {
        out.emplace_back(dw[l].values());
        out.emplace_back(db[l]);
    }
    return out;
}

namespace {

void softmax_rows(Matrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        const double mx = *std::max_element(r.begin(), r.end());
        double s = 0.0;
        for (double& v : r) {
            v = std::exp(v - mx);
            s += v;
        }
        for (double& v : r) v /= s;
    }
}

}  // namespace

ForwardCache forward(const DenseNet& net, const Matrix& x) {
    if (net.layer_count() == 0) throw InvalidInput("forward: empty network");
    if (x.cols() != net.input_size()) {
        throw InvalidInput("forward: input has " + std::to_string(x.cols()) + " columns, network expects " +
                           std::to_string(net.input_size()));
    }
    ForwardCache cache;
    cache.net = &net;
    cache.generation = net.generation();
    Matrix a = x;
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const Layer& layer = net.layer(l);
        Matrix z = matmul(a, layer.w);
        for (std::size_t i = 0; i < z.rows(); ++i) {
            auto r = z.row(i);
            for (std::size_t j = 0; j < r.size(); ++j) r[j] += layer.b[j];
        }
        cache.inputs.push_back(std::move(a));
        a = z;
        if (l + 1 < net.layer_count()) {
            for (double& v : a.values()) v = v > 0.0 ? v : 0.0;
        } else if (net.output_activation() == OutputActivation::softmax) {
            softmax_rows(a);
        }
        cache.pre.push_back(std::move(z));
    }
    cache.output = std::move(a);
    return cache;
}

Matrix predict(const DenseNet& net, const Matrix& x) { return forward(net, x).output; }

Gradients backward(const DenseNet& net, const ForwardCache& cache, const Matrix& grad_at_logits) {
    if (cache.net != &net || cache.generation != net.generation())
        throw InvalidInput("backward: cache is stale or belongs to another network");
    if (grad_at_logits.rows() != cache.output.rows() || grad_at_logits.cols() != net.output_size())
        throw InvalidInput("backward: gradient shape does not match the network output");

    Gradients g;
    g.dw.resize(net.layer_count());
    g.db.resize(net.layer_count());
    Matrix delta = grad_at_logits;
    for (std::size_t l = net.layer_count(); l-- > 0;) {
        g.dw[l] = matmul_tn(cache.inputs[l], delta);
        g.db[l].assign(delta.cols(), 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i)
            for (std::size_t j = 0; j < delta.cols(); ++j) g.db[l][j] += delta(i, j);
        if (l == 0) break;
        Matrix prev = matmul_nt(delta, net.layer(l).w);
        const Matrix& z = cache.pre[l - 1];
        for (std::size_t k = 0; k < prev.size(); ++k)
            if (!(z.values()[k] > 0.0)) prev.values()[k] = 0.0;
        delta = std::move(prev);
    }
    return g;
}

LossValue evaluate_loss(Loss loss, const Matrix& logits, const Matrix& target) {
    if (logits.rows() != target.rows() || logits.cols() != target.cols())
        throw InvalidInput("loss: prediction and target shapes differ");
    const double n = static_cast<double>(logits.rows());
    LossValue out{0.0, Matrix(logits.rows(), logits.cols())};
    if (loss == Loss::squared_error) {
        for (std::size_t k = 0; k < logits.size(); ++k) {
            const double diff = logits.values()[k] - target.values()[k];
            out.value += diff * diff;
            out.grad.values()[k] = diff / n;
        }
        out.value /= 2.0 * n;
        return out;
    }
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        auto z = logits.row(i);
        const double mx = *std::max_element(z.begin(), z.end());
        double s = 0.0;
        for (double v : z) s += std::exp(v - mx);
        const double log_s = std::log(s) + mx;
        for (std::size_t j = 0; j < z.size(); ++j) {
            const double p = std::exp(z[j] - log_s);
            out.grad(i, j) = (p - target(i, j)) / n;
            if (target(i, j) != 0.0) out.value -= target(i, j) * (z[j] - log_s);
        }
    }
    out.value /= n;
    return out;
}

double objective(const DenseNet& net, const Matrix& x, const Matrix& target, Loss loss, const Regularizer& reg) {
    const ForwardCache cache = forward(net, x);
    double value = evaluate_loss(loss, cache.pre.back(), target).value;
    if (reg) value += reg(net, nullptr);
    return value;
}

void AdamState::step(std::span<const std::span<double>> params, std::span<const std::span<const double>> grads) {
    if (params.size() != grads.size()) throw InvalidInput("adam: parameter and gradient block counts differ");
    if (m_.empty()) {
        for (const auto& p : params) {
            m_.emplace_back(p.size(), 0.0);
            v_.emplace_back(p.size(), 0.0);
        }
    }
    if (m_.size() != params.size()) throw InvalidInput("adam: parameter layout changed between steps");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size() != grads[b].size() || params[b].size() != m_[b].size())
            throw InvalidInput("adam: block shape mismatch");
        auto& m = m_[b];
        auto& v = v_[b];
        for (std::size_t k = 0; k < params[b].size(); ++k) {
            const double g = grads[b][k];
            m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g;
            v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g * g;
            const double mhat = m[k] / bc1;
            const double vhat = v[k] / bc2;
            params[b][k] -= cfg_.learning_rate * mhat / (std::sqrt(vhat) + cfg_.epsilon);
        }
    }
}

void adam_step(AdamState& state, DenseNet& net, const Gradients& grads) {
    const auto params = net.parameter_spans();
    const auto g = grads.spans();
    state.step(params, g);
}

std::vector<double> train(DenseNet& net, const Matrix& x, const Matrix& target, Loss loss, const Regularizer& reg,
                          const TrainConfig& cfg) {
    if (x.rows() != target.rows()) throw InvalidInput("train: input and target row counts differ");
    if (cfg.batch_size < 1) throw InvalidInput("train: batch_size must be >= 1");
    if (target.cols() != net.output_size()) throw InvalidInput("train: target width does not match network output");

    const std::size_t n = x.rows();
    AdamState adam(AdamConfig{cfg.learning_rate, 0.9, 0.999, 1e-8});
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> history;
    history.reserve(cfg.epochs);
    double last_finite = std::numeric_limits<double>::quiet_NaN();

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
            const std::size_t stop = std::min(n, start + cfg.batch_size);
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            const Matrix xb = x.select_rows(rows);
            const Matrix yb = target.select_rows(rows);
            const ForwardCache cache = forward(net, xb);
            LossValue lv = evaluate_loss(loss, cache.pre.back(), yb);
            Gradients grads = backward(net, cache, lv.grad);
            double value = lv.value;
            if (reg) value += reg(net, &grads);
            if (!std::isfinite(value)) {
                throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                     std::to_string(batch_index) + " (last finite loss " +
                                     std::to_string(last_finite) + ")");
            }
            last_finite = value;
            adam_step(adam, net, grads);
        }
        const double full = objective(net, x, target, loss, reg);
        if (!std::isfinite(full) || !net.all_finite()) {
            throw NumericalError("train: non-finite objective after epoch " + std::to_string(epoch) +
                                 " (last finite loss " + std::to_string(last_finite) + ")");
        }
        history.push_back(full);
    }
    return history;
}

double check_gradients(const DenseNet& net, const Matrix& x, const Matrix& target, Loss loss, const Regularizer& reg,
                       double epsilon) {
    const ForwardCache cache = forward(net, x);
    const LossValue lv = evaluate_loss(loss, cache.pre.back(), target);
    Gradients analytic = backward(net, cache, lv.grad);
    if (reg) reg(net, &analytic);
    const auto grad_spans = analytic.spans();

    DenseNet probe = net;
    auto params = probe.parameter_spans();
    double worst = 0.0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        for (std::size_t k = 0; k < params[b].size(); ++k) {
            const double saved = params[b][k];
            params[b][k] = saved + epsilon;
            const double up = objective(probe, x, target, loss, reg);
            params[b][k] = saved - epsilon;
            const double down = objective(probe, x, target, loss, reg);
            params[b][k] = saved;
            const double fd = (up - down) / (2.0 * epsilon);
            const double a = grad_spans[b][k];
            const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-8});
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

Matrix one_hot(std::span<const int> labels, std::size_t classes) {
    Matrix out(labels.size(), classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= classes)
            throw InvalidInput("one_hot: label out of range");
        out(i, static_cast<std::size_t>(labels[i])) = 1.0;
    }
    return out;
}

std::vector<int> argmax_rows(const Matrix& m) {
    std::vector<int> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        auto r = m.row(i);
        out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return out;
}

void save_net(std::ostream& out, const DenseNet& net) {
    out << "tsfs-net 1\n" << net.layer_count() + 1;
    out << ' ' << net.input_size();
    for (std::size_t l = 0; l < net.layer_count(); ++l) out << ' ' << net.layer(l).w.cols();
    out << '\n' << (net.output_activation() == OutputActivation::softmax ? "softmax" : "identity") << '\n';
    out.precision(17);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const Layer& layer = net.layer(l);
        for (std::size_t i = 0; i < layer.w.rows(); ++i) {
            for (std::size_t j = 0; j < layer.w.cols(); ++j) out << (j ? " " : "") << layer.w(i, j);
            out << '\n';
        }
        for (std::size_t j = 0; j < layer.b.size(); ++j) out << (j ? " " : "") << layer.b[j];
        out << '\n';
    }
}

DenseNet load_net(std::istream& in) {
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "tsfs-net" || version != 1) throw ParseError("not a tsfs-net v1 stream");
    std::size_t count = 0;
    if (!(in >> count) || count < 2) throw ParseError("bad layer count");
    std::vector<std::size_t> sizes(count);
    for (auto& s : sizes)
        if (!(in >> s) || s == 0) throw ParseError("bad layer size");
    std::string act;
    in >> act;
    if (act != "identity" && act != "softmax") throw ParseError("unknown output activation '" + act + "'");
    std::vector<Layer> layers;
    for (std::size_t l = 0; l + 1 < count; ++l) {
        Layer layer{Matrix(sizes[l], sizes[l + 1]), Vector(sizes[l + 1])};
        for (double& v : layer.w.values())
            if (!(in >> v)) throw ParseError("truncated weights");
        for (double& v : layer.b)
            if (!(in >> v)) throw ParseError("truncated biases");
        layers.push_back(std::move(layer));
    }
    return DenseNet(std::move(layers), act == "softmax" ? OutputActivation::softmax : OutputActivation::identity);
}

}  // namespace tsfs
