// Exact t-SNE: perplexity-calibrated Gaussian affinities, Student-t output
// kernel, momentum gradient descent with gains and early exaggeration.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "tsfs/errors.hpp"
#include "tsfs/log.hpp"
#include "tsfs/teacher.hpp"

namespace tsfs {

namespace {

constexpr int kMaxCalibrationSteps = 50;
constexpr double kEntropyTolerance = 1e-5;

// Entropy (nats) of p_j ~ exp(-beta * shifted_j), j != self; fills `p` normalized.
double conditional_entropy(std::span<const double> shifted, std::size_t self, double beta, Vector& p) {
    double sum = 0.0;
    double weighted = 0.0;
    for (std::size_t j = 0; j < shifted.size(); ++j) {
        if (j == self) {
            p[j] = 0.0;
            continue;
        }
        p[j] = std::exp(-beta * shifted[j]);
        sum += p[j];
        weighted += shifted[j] * p[j];
    }
    for (double& v : p) v /= sum;
    return std::log(sum) + beta * weighted / sum;
}

}  // namespace

SigmaCalibration calibrate_sigma(std::span<const double> sq_distances, std::size_t self, double perplexity) {
    const std::size_t n = sq_distances.size();
    if (n < 2 || self >= n) throw InvalidInput("calibrate_sigma: need at least one other point");
    if (!(perplexity > 0.0)) throw InvalidInput("calibrate_sigma: perplexity must be positive");

    double dmin = std::numeric_limits<double>::infinity();
    double dmax = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self) continue;
        dmin = std::min(dmin, sq_distances[j]);
    }
    Vector shifted(n, 0.0);
    double min_positive = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        if (j == self) continue;
        shifted[j] = sq_distances[j] - dmin;
        dmax = std::max(dmax, shifted[j]);
        if (shifted[j] > 0.0) min_positive = std::min(min_positive, shifted[j]);
    }

    SigmaCalibration out;
    out.conditional.assign(n, 0.0);
    const double target = std::log(perplexity);
    if (dmax == 0.0) {
        // Equidistant neighbours: every beta gives the uniform distribution.
        out.beta = 1.0;
        out.entropy = conditional_entropy(shifted, self, out.beta, out.conditional);
        return out;
    }

    // At lo every kernel value is within 1e-8 of 1; at hi only the nearest ties survive.
    double lo = std::log(1e-8 / dmax);
    double hi = std::log(1e8 / min_positive);
    Vector p(n);
    double best_gap = std::numeric_limits<double>::infinity();
    for (int it = 0; it < kMaxCalibrationSteps; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double beta = std::exp(mid);
        const double h = conditional_entropy(shifted, self, beta, p);
        out.iterations = it + 1;
        if (std::abs(h - target) < best_gap) {
            best_gap = std::abs(h - target);
            out.beta = beta;
            out.entropy = h;
            out.conditional = p;
        }
        if (best_gap < kEntropyTolerance) break;
        if (h > target) {
            lo = mid;  // too flat: sharpen
        } else {
            hi = mid;
        }
    }
    return out;
}

Matrix tsne_affinities(const Matrix& x, double perplexity) {
    const std::size_t n = x.rows();
    const DistanceMatrix d2 = pairwise_sq_distances(x);
    Matrix cond(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        const SigmaCalibration cal = calibrate_sigma(d2.matrix().row(i), i, perplexity);
        std::copy(cal.conditional.begin(), cal.conditional.end(), cond.row(i).begin());
    }
    Matrix p(n, n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = (cond(i, j) + cond(j, i)) * scale;
            p(i, j) = p(j, i) = v;
        }
    return p;
}

Embedding fit_tsne(const Matrix& x, std::size_t dim, const TsneParams& params) {
    const std::size_t n = x.rows();
    if (n < 3) throw InvalidInput("fit_tsne: need at least 3 samples");
    if (dim < 1 || dim >= x.cols()) throw InvalidInput("fit_tsne: embedding dimension must lie in [1, d)");
    double perplexity = 0.0;
    if (params.perplexity) {
        perplexity = *params.perplexity;
        if (!(perplexity > 1.0) || !(perplexity < static_cast<double>(n - 1)))
            throw InvalidInput("fit_tsne: perplexity must satisfy 1 < perplexity < n - 1");
    } else {
        perplexity = std::min(30.0, static_cast<double>(n - 1) / 3.0);
        if (!(perplexity > 1.0)) throw InvalidInput("fit_tsne: too few samples for the default perplexity");
    }
    if (!(params.learning_rate > 0.0)) throw InvalidInput("fit_tsne: learning rate must be positive");
    if (params.early_exaggeration < 1.0) throw InvalidInput("fit_tsne: early exaggeration must be >= 1");

    const Matrix p = tsne_affinities(x, perplexity);

    std::mt19937_64 rng(params.seed);
    std::normal_distribution<double> normal(0.0, params.init_sigma);
    Matrix y(n, dim);
    for (double& v : y.values()) v = normal(rng);

    Matrix update(n, dim);
    Matrix gains(n, dim, 1.0);
    Matrix grad(n, dim);
    Matrix num(n, n);
    Embedding out;
    out.kl_trace.reserve(params.iterations);

    for (std::size_t iter = 0; iter < params.iterations; ++iter) {
        const double exaggeration = iter < params.exaggeration_iters ? params.early_exaggeration : 1.0;
        const double momentum = iter < params.momentum_switch_iter ? params.initial_momentum : params.final_momentum;

        double z = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            auto yi = y.row(i);
            for (std::size_t j = i + 1; j < n; ++j) {
                auto yj = y.row(j);
                double d = 0.0;
                for (std::size_t c = 0; c < dim; ++c) d += (yi[c] - yj[c]) * (yi[c] - yj[c]);
                const double q = 1.0 / (1.0 + d);
                num(i, j) = num(j, i) = q;
                z += 2.0 * q;
            }
        }

        double kl = 0.0;
        std::fill(grad.values().begin(), grad.values().end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto yi = y.row(i);
            auto gi = grad.row(i);
            for (std::size_t j = 0; j < n; ++j) {
                if (j == i) continue;
                const double q = num(i, j) / z;
                const double pij = p(i, j);
                if (pij > 0.0) kl += pij * std::log(pij / std::max(q, std::numeric_limits<double>::min()));
                const double mult = (exaggeration * pij - q) * num(i, j);
                auto yj = y.row(j);
                for (std::size_t c = 0; c < dim; ++c) gi[c] += 4.0 * mult * (yi[c] - yj[c]);
            }
        }
        out.kl_trace.push_back(kl);
        if (!grad.all_finite()) throw NumericalError("fit_tsne: non-finite gradient at iteration " + std::to_string(iter));

        for (std::size_t k = 0; k < y.size(); ++k) {
            const double g = grad.values()[k];
            double& gain = gains.values()[k];
            double& u = update.values()[k];
            gain = ((g > 0.0) != (u > 0.0)) ? gain + 0.2 : gain * 0.8;
            gain = std::max(gain, 0.01);
            u = momentum * u - params.learning_rate * gain * g;
            y.values()[k] += u;
        }
        const Vector mean = column_means(y);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < dim; ++c) y(i, c) -= mean[c];
    }

    out.y = std::move(y);
    out.spec.method = TeacherMethod::tsne;
    out.spec.dim = dim;
    out.spec.tsne = params;
    out.spec.tsne.perplexity = perplexity;
    out.spec.seed = params.seed;
    return out;
}

}  // namespace tsfs
