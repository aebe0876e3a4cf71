#include "tsfs/student.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsfs/errors.hpp"
#include "tsfs/log.hpp"

namespace tsfs {

Matrix normalize_codes(const Matrix& y) {
    Matrix out(y.rows(), y.cols());
    for (std::size_t j = 0; j < y.cols(); ++j) {
        double lo = y(0, j), hi = y(0, j);
        for (std::size_t i = 1; i < y.rows(); ++i) {
            lo = std::min(lo, y(i, j));
            hi = std::max(hi, y(i, j));
        }
        const double range = hi - lo;
        if (!(range > 0.0)) {
            log::warn("normalize_codes: code column " + std::to_string(j) + " is constant; mapped to 0");
            continue;
        }
        for (std::size_t i = 0; i < y.rows(); ++i) out(i, j) = (y(i, j) - lo) / range;
    }
    return out;
}

double l21_norm(const Matrix& w) {
    double total = 0.0;
    for (std::size_t i = 0; i < w.rows(); ++i) {
        double s = 0.0;
        for (double v : w.row(i)) s += v * v;
        total += std::sqrt(s);
    }
    return total;
}

Matrix l21_grad(const Matrix& w, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("l21_grad: epsilon must be positive");
    Matrix g(w.rows(), w.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) {
        double s = 0.0;
        for (double v : w.row(i)) s += v * v;
        const double norm = std::max(std::sqrt(s), epsilon);
        for (std::size_t j = 0; j < w.cols(); ++j) g(i, j) = w(i, j) / norm;
    }
    return g;
}

Regularizer l21_regularizer(double lambda, double epsilon) {
    return [lambda, epsilon](const DenseNet& net, Gradients* grads) {
        const Matrix& w1 = net.layer(0).w;
        if (grads && lambda != 0.0) {
            const Matrix g = l21_grad(w1, epsilon);
            auto dst = grads->dw[0].values();
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += lambda * g.values()[k];
        }
        return lambda * l21_norm(w1);
    };
}

namespace {

void check_student_shape(const DenseNet& net, std::size_t d, std::size_t l) {
    if (net.layer_count() != 2 || net.input_size() != d || net.output_size() != l ||
        net.output_activation() != OutputActivation::identity) {
        throw InvalidInput("student network must have shape d -> hidden -> l with identity output");
    }
}

}  // namespace

double tsfs_loss(const DenseNet& net, const Matrix& x, const Matrix& yn, double lambda) {
    if (x.rows() != yn.rows()) throw InvalidInput("tsfs_loss: row counts differ");
    check_student_shape(net, x.cols(), yn.cols());
    return objective(net, x, yn, Loss::squared_error, l21_regularizer(lambda, 1e-8));
}

StudentFit train_student(const Matrix& x, const Matrix& y, const StudentConfig& cfg, std::optional<DenseNet> init) {
    if (x.rows() != y.rows()) throw InvalidInput("train_student: X and Y row counts differ");
    if (cfg.hidden < 1) throw InvalidInput("train_student: hidden must be >= 1");
    if (cfg.lambda < 0.0) throw InvalidInput("train_student: lambda must be >= 0");
    const Matrix yn = normalize_codes(y);
    DenseNet net = init ? std::move(*init)
                        : DenseNet({x.cols(), cfg.hidden, y.cols()}, OutputActivation::identity, cfg.seed);
    check_student_shape(net, x.cols(), y.cols());
    if (net.layer(0).w.cols() != cfg.hidden) throw InvalidInput("train_student: initial network width differs");

    TrainConfig tc{cfg.epochs, cfg.batch_size, cfg.learning_rate, cfg.seed, true};
    StudentFit fit;
    fit.history = train(net, x, yn, Loss::squared_error, l21_regularizer(cfg.lambda, cfg.l21_epsilon), tc);
    fit.model.net = std::move(net);
    return fit;
}

Vector feature_scores(const Matrix& first_layer) {
    Vector s(first_layer.rows(), 0.0);
    for (std::size_t i = 0; i < first_layer.rows(); ++i)
        for (double v : first_layer.row(i)) s[i] += v * v;
    return s;
}

Vector feature_scores(const StudentModel& model) { return feature_scores(model.first_layer()); }

std::vector<std::size_t> rank_features(const Vector& scores, bool higher_is_better) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return higher_is_better ? scores[a] > scores[b] : scores[a] < scores[b];
    });
    return order;
}

std::size_t selection_size(std::size_t d, double percent) {
    if (!(percent > 0.0) || percent > 100.0) throw InvalidInput("percent must lie in (0, 100]");
    const auto m = static_cast<std::size_t>(std::floor(percent * static_cast<double>(d) / 100.0));
    return std::clamp<std::size_t>(m, 1, d);
}

void apply_percent(SelectionResult& result, double percent) {
    if (result.ranking.empty()) result.ranking = rank_features(result.scores, result.higher_is_better);
    result.m = selection_size(result.ranking.size(), percent);
    result.percent = percent;
    result.selected.assign(result.ranking.begin(), result.ranking.begin() + static_cast<std::ptrdiff_t>(result.m));
}

SelectionResult select_top(const Vector& scores, double percent) {
    SelectionResult r;
    r.scores = scores;
    apply_percent(r, percent);
    return r;
}

SelectionResult run_tsfs(const Matrix& x, const Embedding& embedding, double percent, const StudentConfig& cfg) {
    const StudentFit fit = train_student(x, embedding.y, cfg);
    SelectionResult r = select_top(feature_scores(fit.model), percent);
    r.method = "tsfs";
    r.teacher = to_string(embedding.spec.method);
    r.seeds["teacher"] = embedding.spec.seed;
    r.seeds["student"] = cfg.seed;
    return r;
}

SelectionResult run_tsfs(const Dataset& ds, const TeacherSpec& teacher, double percent, const StudentConfig& cfg) {
    if (is_supervised(teacher.method) && !ds.has_labels())
        throw InvalidInput("supervised teacher '" + to_string(teacher.method) + "' needs labels");
    selection_size(ds.d(), percent);
    const Embedding embedding = fit_teacher(ds, teacher);
    return run_tsfs(ds.x, embedding, percent, cfg);
}

}  // namespace tsfs
