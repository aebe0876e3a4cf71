#include "tsfs/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tsfs/errors.hpp"
#include "tsfs/log.hpp"
#include "tsfs/teacher.hpp"

namespace tsfs {

namespace {

BaselineResult finish(std::string method, Vector scores, bool higher_is_better) {
    BaselineResult r;
    r.method = std::move(method);
    r.higher_is_better = higher_is_better;
    r.ranking = rank_features(scores, higher_is_better);
    r.scores = std::move(scores);
    return r;
}

Vector row_norms(const Matrix& m) {
    Vector out(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (double v : m.row(i)) out[i] += v * v;
        out[i] = std::sqrt(out[i]);
    }
    return out;
}

}  // namespace

BaselineResult variance_score(const Matrix& x) {
    const Vector mean = column_means(x);
    Vector var(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double d = x(i, j) - mean[j];
            var[j] += d * d;
        }
    for (double& v : var) v /= static_cast<double>(x.rows());
    return finish("variance", std::move(var), true);
}

BaselineResult laplacian_score(const Matrix& x, std::size_t neighbors, std::optional<double> heat_t) {
    const NeighborGraph g = knn_graph(x, neighbors, true);
    if (const std::size_t comps = g.component_count(); comps > 1) throw ConnectivityError(comps);
    const std::size_t n = x.rows();
    const double width = heat_kernel_width(g, heat_t);

    struct WeightedEdge {
        std::size_t i, j;
        double w;
    };
    std::vector<WeightedEdge> edges;  // each undirected edge once
    Vector degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (const Edge& e : g.neighbors(i)) {
            const double w = std::exp(-(e.weight * e.weight) / width);
            degree[i] += w;
            if (i < e.to) edges.push_back({i, e.to, w});
        }
    double total_degree = 0.0;
    for (double dv : degree) total_degree += dv;

    Vector scores(x.cols());
    Vector ft(n);
    for (std::size_t f = 0; f < x.cols(); ++f) {
        double fd1 = 0.0;
        double fdf = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            fd1 += x(i, f) * degree[i];
            fdf += x(i, f) * x(i, f) * degree[i];
        }
        const double shift = fd1 / total_degree;
        double den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            ft[i] = x(i, f) - shift;
            den += ft[i] * ft[i] * degree[i];
        }
        double num = 0.0;
        for (const auto& e : edges) {
            const double diff = ft[e.i] - ft[e.j];
            num += e.w * diff * diff;
        }
        // Constant features give 0/0 up to rounding.
        if (!(den > 1e-20 * fdf) || den == 0.0) {
            scores[f] = kWorstLaplacianScore;
        } else {
            scores[f] = num / den;
        }
    }
    return finish("laplacian_score", std::move(scores), false);
}

double rsr_objective(const Matrix& x, const Matrix& w, double lambda, double epsilon) {
    const Matrix xw = matmul(x, w);
    const double eps2 = epsilon * epsilon;
    double loss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double r = x(i, j) - xw(i, j);
            s += r * r;
        }
        loss += std::sqrt(s + eps2);
    }
    double penalty = 0.0;
    for (std::size_t j = 0; j < w.rows(); ++j) {
        double s = 0.0;
        for (double v : w.row(j)) s += v * v;
        penalty += std::sqrt(s + eps2);
    }
    return loss + lambda * penalty;
}

RsrFit rsr_fit(const Matrix& x, const RsrOptions& options) {
    const std::size_t n = x.rows();
    const double lambda = options.lambda.value_or(0.5 * static_cast<double>(n));
    if (!(lambda > 0.0)) throw InvalidInput("rsr: lambda must be positive");
    if (!(options.epsilon > 0.0)) throw InvalidInput("rsr: epsilon must be positive");
    const std::size_t d = x.cols();
    const double eps2 = options.epsilon * options.epsilon;

    // Ridge start: (X^T X + lambda I) W = X^T X.
    const Matrix xtx = matmul_tn(x, x);
    Matrix sys = xtx;
    for (std::size_t j = 0; j < d; ++j) sys(j, j) += lambda;
    Matrix w = cholesky_solve(sys, xtx);

    RsrFit fit;
    double current = rsr_objective(x, w, lambda, options.epsilon);
    fit.result.objective_history.push_back(current);
    Matrix best = w;
    double best_value = current;
    bool converged = false;
    std::size_t iter = 0;
    Vector a(n), b(d);
    for (; iter < options.max_iters; ++iter) {
        const Matrix xw = matmul(x, w);
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double r = x(i, j) - xw(i, j);
                s += r * r;
            }
            a[i] = 1.0 / std::sqrt(s + eps2);
        }
        for (std::size_t j = 0; j < d; ++j) {
            double s = 0.0;
            for (double v : w.row(j)) s += v * v;
            b[j] = 1.0 / std::sqrt(s + eps2);
        }
        // Minimizer of the quadratic majorizer: (X^T A X + lambda B) W = X^T A X.
        Matrix ax = x;
        for (std::size_t i = 0; i < n; ++i)
            for (double& v : ax.row(i)) v *= a[i];
        const Matrix xtax = matmul_tn(x, ax);
        Matrix lhs = xtax;
        for (std::size_t j = 0; j < d; ++j) lhs(j, j) += lambda * b[j];
        w = cholesky_solve(lhs, xtax);

        const double next = rsr_objective(x, w, lambda, options.epsilon);
        fit.result.objective_history.push_back(next);
        if (next < best_value) {
            best_value = next;
            best = w;
        }
        const double change = std::abs(current - next) / std::max(std::abs(current), 1e-300);
        current = next;
        if (change < options.tol) {
            converged = true;
            ++iter;
            break;
        }
    }
    if (!converged) log::warn("rsr: no convergence after " + std::to_string(options.max_iters) + " iterations");

    BaselineResult r = finish("rsr", row_norms(best), true);
    r.converged = converged;
    r.iterations = iter;
    r.objective_history = std::move(fit.result.objective_history);
    fit.result = std::move(r);
    fit.w = std::move(best);
    return fit;
}

BaselineResult rsr(const Matrix& x, const RsrOptions& options) { return rsr_fit(x, options).result; }

Regularizer aefs_regularizer(double lambda, double beta, double epsilon) {
    return [lambda, beta, epsilon](const DenseNet& net, Gradients* grads) {
        double value = lambda * l21_norm(net.layer(0).w);
        if (grads && lambda != 0.0) {
            const Matrix g = l21_grad(net.layer(0).w, epsilon);
            auto dst = grads->dw[0].values();
            for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += lambda * g.values()[k];
        }
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            const auto wv = net.layer(l).w.values();
            double sq = 0.0;
            for (double v : wv) sq += v * v;
            value += beta * sq;
            if (grads && beta != 0.0) {
                auto dst = grads->dw[l].values();
                for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += 2.0 * beta * wv[k];
            }
        }
        return value;
    };
}

AefsFit aefs_fit(const Matrix& x, const AefsOptions& options) {
    if (options.hidden < 1) throw InvalidInput("aefs: hidden must be >= 1");
    if (options.lambda < 0.0 || options.beta < 0.0) throw InvalidInput("aefs: lambda and beta must be >= 0");
    AefsFit fit{DenseNet({x.cols(), options.hidden, x.cols()}, OutputActivation::identity, options.train.seed), {}, {}};
    fit.history = train(fit.net, x, x, Loss::squared_error, aefs_regularizer(options.lambda, options.beta),
                        options.train);
    fit.result = finish("aefs", feature_scores(fit.net.layer(0).w), true);
    fit.result.iterations = options.train.epochs;
    fit.result.objective_history = fit.history;
    return fit;
}

BaselineResult aefs(const Matrix& x, const AefsOptions& options) { return aefs_fit(x, options).result; }

BaselineResult random_scores(std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector s(d);
    for (double& v : s) v = u(rng);
    return finish("random", std::move(s), true);
}

SelectionResult to_selection(const BaselineResult& result, double percent) {
    SelectionResult s;
    s.method = result.method;
    s.scores = result.scores;
    s.higher_is_better = result.higher_is_better;
    s.ranking = result.ranking;
    apply_percent(s, percent);
    return s;
}

}  // namespace tsfs
