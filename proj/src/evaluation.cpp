#include "tsfs/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "tsfs/datasets.hpp"
#include "tsfs/errors.hpp"
#include "tsfs/neural.hpp"

namespace tsfs {

namespace {

double sq_dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
    return s;
}

// Distinct streams for each fold from one user seed.
std::uint64_t fold_seed(std::uint64_t seed, std::size_t fold) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (fold + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double mean_of(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Dense relabeling of arbitrary ints to 0..k-1 by first appearance.
std::vector<std::size_t> compact(std::span<const int> labels, std::size_t& count) {
    std::map<int, std::size_t> ids;
    std::vector<std::size_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        auto [it, inserted] = ids.emplace(labels[i], ids.size());
        out[i] = it->second;
    }
    count = ids.size();
    return out;
}

}  // namespace

ClusteringRun kmeans(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t max_iter) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    if (k < 1 || k > n) throw InvalidInput("kmeans: k must lie in [1, n]");
    if (max_iter < 1) throw InvalidInput("kmeans: max_iter must be >= 1");

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), 0);
    std::shuffle(pick.begin(), pick.end(), rng);
    Matrix centers(k, d);
    for (std::size_t c = 0; c < k; ++c) std::ranges::copy(x.row(pick[c]), centers.row(c).begin());

    ClusteringRun run;
    run.seed = seed;
    run.labels.assign(n, -1);
    std::vector<double> dist(n, 0.0);
    std::vector<std::size_t> counts(k);
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        bool changed = false;
        double inertia = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double dc = sq_dist(x.row(i), centers.row(c));
                if (dc < best_d) {
                    best_d = dc;
                    best = c;
                }
            }
            if (run.labels[i] != static_cast<int>(best)) {
                run.labels[i] = static_cast<int>(best);
                changed = true;
            }
            dist[i] = best_d;
            inertia += best_d;
        }
        run.inertia = inertia;
        run.inertia_history.push_back(inertia);
        run.iterations = iter + 1;
        if (!changed && iter > 0) break;

        std::fill(counts.begin(), counts.end(), 0);
        Matrix sums(k, d);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(run.labels[i]);
            ++counts[c];
            auto s = sums.row(c);
            auto xi = x.row(i);
            for (std::size_t j = 0; j < d; ++j) s[j] += xi[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (counts[c] == 0) {
                // Re-seed at the point worst served by its centroid; it is not reused.
                const auto far = static_cast<std::size_t>(std::distance(dist.begin(), std::ranges::max_element(dist)));
                std::ranges::copy(x.row(far), centers.row(c).begin());
                dist[far] = 0.0;
                continue;
            }
            auto s = sums.row(c);
            auto ctr = centers.row(c);
            for (std::size_t j = 0; j < d; ++j) ctr[j] = s[j] / static_cast<double>(counts[c]);
        }
    }
    // Inertia against the final centroids of the final assignment.
    Matrix sums(k, d);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(run.labels[i]);
        ++counts[c];
        auto s = sums.row(c);
        auto xi = x.row(i);
        for (std::size_t j = 0; j < d; ++j) s[j] += xi[j];
    }
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = static_cast<std::size_t>(run.labels[i]);
        auto s = sums.row(c);
        auto xi = x.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = xi[j] - s[j] / static_cast<double>(counts[c]);
            inertia += diff * diff;
        }
    }
    run.inertia = inertia;
    return run;
}

std::vector<std::size_t> hungarian(const Matrix& cost) {
    if (cost.rows() != cost.cols()) throw InvalidInput("hungarian: cost matrix must be square");
    const std::size_t n = cost.rows();
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; p[j] is the row matched to column j, way[] traces augmenting paths.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n);
    for (std::size_t j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
    return assignment;
}

double assignment_cost(const Matrix& cost, std::span<const std::size_t> assignment) {
    double total = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i) total += cost(i, assignment[i]);
    return total;
}

double clustering_acc(std::span<const int> c, std::span<const int> y) {
    if (c.size() != y.size()) throw InvalidInput("clustering_acc: label vectors differ in length");
    if (c.empty()) throw InvalidInput("clustering_acc: empty labels");
    std::size_t kc = 0, ky = 0;
    const auto ci = compact(c, kc);
    const auto yi = compact(y, ky);
    const std::size_t k = std::max(kc, ky);
    Matrix neg(k, k);
    for (std::size_t i = 0; i < c.size(); ++i) neg(ci[i], yi[i]) -= 1.0;
    const auto map = hungarian(neg);
    return -assignment_cost(neg, map) / static_cast<double>(c.size());
}

std::optional<double> nmi(std::span<const int> c, std::span<const int> y) {
    if (c.size() != y.size()) throw InvalidInput("nmi: label vectors differ in length");
    if (c.empty()) throw InvalidInput("nmi: empty labels");
    std::size_t kc = 0, ky = 0;
    const auto ci = compact(c, kc);
    const auto yi = compact(y, ky);
    if (kc == 1 && ky == 1) return std::nullopt;
    const double n = static_cast<double>(c.size());
    std::vector<double> joint(kc * ky, 0.0), pc(kc, 0.0), py(ky, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
        joint[ci[i] * ky + yi[i]] += 1.0;
        pc[ci[i]] += 1.0;
        py[yi[i]] += 1.0;
    }
    auto entropy = [n](const std::vector<double>& counts) {
        double h = 0.0;
        for (double v : counts)
            if (v > 0.0) h -= (v / n) * std::log(v / n);
        return h;
    };
    double mi = 0.0;
    for (std::size_t a = 0; a < kc; ++a)
        for (std::size_t b = 0; b < ky; ++b) {
            const double v = joint[a * ky + b];
            if (v > 0.0) mi += (v / n) * std::log(v * n / (pc[a] * py[b]));
        }
    const double h = std::max(entropy(pc), entropy(py));
    return std::clamp(mi / h, 0.0, 1.0);
}

ClusteringEval clustering_eval(const Matrix& x, std::span<const int> y, std::size_t k, std::size_t runs,
                               std::uint64_t base_seed) {
    if (runs < 1) throw InvalidInput("clustering_eval: runs must be >= 1");
    if (y.size() != x.rows()) throw InvalidInput("clustering_eval: label count differs from sample count");
    ClusteringEval out;
    for (std::size_t r = 0; r < runs; ++r) {
        const ClusteringRun run = kmeans(x, k, base_seed + r);
        out.acc.push_back(clustering_acc(run.labels, y));
        // Constant on both sides only when k = 1 on single-class data: identical partitions.
        out.nmi.push_back(nmi(run.labels, y).value_or(1.0));
    }
    out.acc_mean = mean_of(out.acc);
    out.nmi_mean = mean_of(out.nmi);
    return out;
}

CvResult classify_cv(const Matrix& x_sel, std::span<const int> y, std::uint64_t seed, const CvConfig& cfg) {
    if (y.size() != x_sel.rows()) throw InvalidInput("classify_cv: label count differs from sample count");
    std::size_t classes = 0;
    const auto yc = compact(y, classes);
    std::vector<int> labels(yc.begin(), yc.end());
    if (classes < 2) throw InvalidInput("classify_cv: need at least two classes");
    const FoldPlan plan = stratified_kfold(labels, cfg.folds, seed);

    CvResult out;
    for (std::size_t f = 0; f < cfg.folds; ++f) {
        const auto train_idx = plan.train_indices(f);
        const auto test_idx = plan.test_indices(f);
        std::vector<int> train_y, test_y;
        for (auto i : train_idx) train_y.push_back(labels[i]);
        for (auto i : test_idx) test_y.push_back(labels[i]);
        std::vector<char> seen(classes, 0);
        for (int v : train_y) seen[static_cast<std::size_t>(v)] = 1;
        if (std::ranges::count(seen, 0) > 0)
            throw InvalidInput("classify_cv: a class is absent from training fold " + std::to_string(f));

        const std::uint64_t s = fold_seed(seed, f);
        DenseNet net({x_sel.cols(), cfg.hidden, classes}, OutputActivation::softmax, s);
        const TrainConfig tc{cfg.epochs, cfg.batch_size, cfg.learning_rate, s, true};
        train(net, x_sel.select_rows(train_idx), one_hot(train_y, classes), Loss::softmax_ce, {}, tc);
        const auto pred = argmax_rows(predict(net, x_sel.select_rows(test_idx)));
        std::size_t hits = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) hits += pred[i] == test_y[i];
        out.per_fold.push_back(static_cast<double>(hits) / static_cast<double>(pred.size()));
    }
    out.mean = mean_of(out.per_fold);
    return out;
}

CvResult reconstruct_cv(const Matrix& x_sel, const Matrix& x_full, std::uint64_t seed, const CvConfig& cfg) {
    if (x_sel.rows() != x_full.rows()) throw InvalidInput("reconstruct_cv: row counts differ");
    const FoldPlan plan = kfold(x_full.rows(), cfg.folds, seed);
    CvResult out;
    for (std::size_t f = 0; f < cfg.folds; ++f) {
        const auto train_idx = plan.train_indices(f);
        const auto test_idx = plan.test_indices(f);
        const std::uint64_t s = fold_seed(seed, f);
        DenseNet net({x_sel.cols(), cfg.hidden, x_full.cols()}, OutputActivation::identity, s);
        const TrainConfig tc{cfg.epochs, cfg.batch_size, cfg.learning_rate, s, true};
        train(net, x_sel.select_rows(train_idx), x_full.select_rows(train_idx), Loss::squared_error, {}, tc);
        const Matrix pred = predict(net, x_sel.select_rows(test_idx));
        const Matrix truth = x_full.select_rows(test_idx);
        double sse = 0.0;
        for (std::size_t k = 0; k < pred.size(); ++k) {
            const double diff = pred.values()[k] - truth.values()[k];
            sse += diff * diff;
        }
        out.per_fold.push_back(sse / static_cast<double>(pred.size()));
    }
    out.mean = mean_of(out.per_fold);
    return out;
}

}  // namespace tsfs
