#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "support.hpp"
#include "tsfs/datasets.hpp"
#include "tsfs/errors.hpp"
#include "tsfs/evaluation.hpp"

using namespace tsfs;
using test::random_matrix;

namespace {

Matrix blobs(std::size_t per, std::uint64_t seed, double gap, std::vector<int>* labels) {
    Matrix x = random_matrix(2 * per, 2, seed, 0.5);
    labels->assign(2 * per, 0);
    for (std::size_t i = per; i < 2 * per; ++i) {
        x(i, 0) += gap;
        (*labels)[i] = 1;
    }
    return x;
}

// MI / max(H) straight from the joint histogram.
double nmi_by_histogram(const std::vector<int>& c, const std::vector<int>& y) {
    const double n = static_cast<double>(c.size());
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> pc, py;
    for (std::size_t i = 0; i < c.size(); ++i) {
        joint[{c[i], y[i]}] += 1.0 / n;
        pc[c[i]] += 1.0 / n;
        py[y[i]] += 1.0 / n;
    }
    double mi = 0.0, hc = 0.0, hy = 0.0;
    for (auto& [k, p] : joint) mi += p * std::log(p / (pc[k.first] * py[k.second]));
    for (auto& [k, p] : pc) hc -= p * std::log(p);
    for (auto& [k, p] : py) hy -= p * std::log(p);
    return mi / std::max(hc, hy);
}

}  // namespace

TEST(Kmeans, SingleClusterIsTheMean) {
    const Matrix x = random_matrix(20, 3, 1);
    const auto run = kmeans(x, 1, 0);
    double scatter = 0.0;
    const Vector mean = column_means(x);
    for (std::size_t i = 0; i < 20; ++i)
        for (std::size_t j = 0; j < 3; ++j) scatter += std::pow(x(i, j) - mean[j], 2);
    EXPECT_NEAR(run.inertia, scatter, 1e-10);
    for (int l : run.labels) EXPECT_EQ(l, 0);
}

TEST(Kmeans, OneClusterPerPoint) {
    const auto run = kmeans(random_matrix(8, 2, 2), 8, 3);
    EXPECT_NEAR(run.inertia, 0.0, 1e-20);
}

TEST(Kmeans, InertiaNeverIncreases) {
    const auto run = kmeans(random_matrix(60, 3, 4), 5, 1);
    for (std::size_t t = 1; t < run.inertia_history.size(); ++t)
        EXPECT_LE(run.inertia_history[t], run.inertia_history[t - 1] + 1e-12);
}

TEST(Kmeans, RecoversSeparatedBlobs) {
    std::vector<int> y;
    const Matrix x = blobs(25, 7, 8.0, &y);
    std::size_t exact = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) exact += clustering_acc(kmeans(x, 2, seed).labels, y) == 1.0;
    EXPECT_GE(exact, 19u);
}

TEST(Kmeans, RejectsTooManyClusters) { EXPECT_THROW(kmeans(random_matrix(3, 2, 1), 4, 0), InvalidInput); }

TEST(Hungarian, IdentityFavoringCost) {
    Matrix c(4, 4, 1.0);
    for (std::size_t i = 0; i < 4; ++i) c(i, i) = 0.0;
    EXPECT_EQ(hungarian(c), (std::vector<std::size_t>{0, 1, 2, 3}));
}

TEST(Hungarian, AntiDiagonal) {
    const Matrix c{{2.0, 1.0}, {1.0, 2.0}};
    const auto a = hungarian(c);
    EXPECT_EQ(a, (std::vector<std::size_t>{1, 0}));
    EXPECT_EQ(assignment_cost(c, a), 2.0);
}

TEST(Hungarian, MatchesBruteForce) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> cell(0, 50);
    for (int trial = 0; trial < 30; ++trial) {
        Matrix c(5, 5);
        for (double& v : c.values()) v = cell(rng);
        std::vector<std::size_t> perm{0, 1, 2, 3, 4};
        double best = std::numeric_limits<double>::infinity();
        do best = std::min(best, assignment_cost(c, perm));
        while (std::next_permutation(perm.begin(), perm.end()));
        EXPECT_EQ(assignment_cost(c, hungarian(c)), best);
    }
}

TEST(Hungarian, RejectsNonSquare) { EXPECT_THROW(hungarian(Matrix(2, 3)), InvalidInput); }

TEST(ClusteringAcc, Examples) {
    const std::vector<int> a{0, 0, 1, 1}, b{1, 1, 0, 0}, c{0, 1, 0, 1};
    EXPECT_EQ(clustering_acc(a, a), 1.0);
    EXPECT_EQ(clustering_acc(a, b), 1.0);
    EXPECT_EQ(clustering_acc(c, a), 0.5);
    EXPECT_THROW(clustering_acc(a, std::vector<int>{0, 1}), InvalidInput);
}

TEST(ClusteringAcc, UnequalClusterCounts) {
    EXPECT_DOUBLE_EQ(clustering_acc(std::vector<int>{0, 1, 2, 2}, std::vector<int>{0, 0, 1, 1}), 0.75);
}

TEST(Nmi, Examples) {
    const std::vector<int> a{0, 0, 1, 1}, b{0, 1, 0, 1};
    EXPECT_NEAR(*nmi(a, a), 1.0, 1e-15);
    EXPECT_NEAR(*nmi(a, b), 0.0, 1e-15);
    const std::vector<int> c{0, 0, 0, 1}, y{0, 0, 1, 1};
    EXPECT_NEAR(*nmi(c, y), nmi_by_histogram(c, y), 1e-12);
}

TEST(Nmi, BothConstantIsUndefined) {
    const std::vector<int> a{3, 3, 3};
    EXPECT_FALSE(nmi(a, a).has_value());
    EXPECT_NEAR(*nmi(a, std::vector<int>{0, 1, 0}), 0.0, 1e-15);
}

TEST(Nmi, MatchesHistogramOnRandomLabels) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        std::vector<int> c(30), y(30);
        for (auto& v : c) v = static_cast<int>(rng() % 4);
        for (auto& v : y) v = static_cast<int>(rng() % 3);
        EXPECT_NEAR(*nmi(c, y), nmi_by_histogram(c, y), 1e-12);
    }
}

TEST(ClusteringEval, SingleRunAndDeterminism) {
    std::vector<int> y;
    const Matrix x = blobs(20, 2, 10.0, &y);
    const auto one = clustering_eval(x, y, 2, 1, 4);
    ASSERT_EQ(one.acc.size(), 1u);
    EXPECT_EQ(one.acc_mean, one.acc[0]);
    EXPECT_EQ(one.nmi_mean, one.nmi[0]);
    const auto a = clustering_eval(x, y, 2, 20, 9), b = clustering_eval(x, y, 2, 20, 9);
    EXPECT_EQ(a.acc, b.acc);
    EXPECT_EQ(a.nmi, b.nmi);
    EXPECT_EQ(a.acc.size(), 20u);
    EXPECT_GE(a.acc_mean, 0.95);
}

TEST(ClassifyCv, SeparableData) {
    std::vector<int> y;
    const Matrix x = blobs(40, 3, 6.0, &y);
    const auto r = classify_cv(x, y, 1);
    EXPECT_EQ(r.per_fold.size(), 5u);
    EXPECT_GE(r.mean, 0.95);
    EXPECT_EQ(r.per_fold, classify_cv(x, y, 1).per_fold);
}

TEST(ClassifyCv, ShuffledLabelsAreNearChance) {
    double total = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const Matrix x = random_matrix(80, 3, 40 + seed);
        std::vector<int> y(80);
        for (std::size_t i = 0; i < 80; ++i) y[i] = static_cast<int>(i % 2);
        std::shuffle(y.begin(), y.end(), std::mt19937_64(seed));
        const auto r = classify_cv(x, y, seed);
        EXPECT_GE(r.mean, 0.3);
        EXPECT_LE(r.mean, 0.7);
        total += r.mean;
    }
    EXPECT_NEAR(total / 5.0, 0.5, 0.1);
}

TEST(ClassifyCv, ClassMissingFromTrainingFold) {
    std::vector<int> y(20, 0);
    y[3] = 1;
    EXPECT_THROW(classify_cv(random_matrix(20, 2, 1), y, 0), InvalidInput);
}

TEST(ReconstructCv, BeatsMeanPredictor) {
    PlantedSpec ps;
    ps.n = 200;
    ps.d = 10;
    ps.k_informative = 4;
    const Matrix x = minmax_scale(make_planted(ps).dataset).x;
    const auto r = reconstruct_cv(x, x, 2);
    // Held-out MSE of predicting each test row by the training-fold column means.
    const auto plan = kfold(x.rows(), 5, 2);
    double baseline = 0.0;
    for (std::size_t f = 0; f < 5; ++f) {
        const auto train = plan.train_indices(f), test = plan.test_indices(f);
        const Vector mean = column_means(x.select_rows(train));
        double s = 0.0;
        for (std::size_t i : test)
            for (std::size_t j = 0; j < x.cols(); ++j) s += std::pow(x(i, j) - mean[j], 2);
        baseline += s / static_cast<double>(test.size() * x.cols()) / 5.0;
    }
    EXPECT_LT(r.mean, baseline);
    EXPECT_EQ(r.per_fold, reconstruct_cv(x, x, 2).per_fold);
}

TEST(ReconstructCv, ConstantTargetIsAbsorbed) {
    const Matrix xs = random_matrix(60, 2, 1);
    const Matrix full(60, 3, 0.5);
    CvConfig cfg = reconstruction_defaults();
    cfg.learning_rate = 0.01;
    cfg.epochs = 1000;
    EXPECT_LT(reconstruct_cv(xs, full, 0, cfg).mean, 1e-4);
}

TEST(ReconstructCv, MoreFeaturesDoNotHurt) {
    double full = 0.0, tenth = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        PlantedSpec ps;
        ps.seed = seed;
        ps.n = 150;
        ps.d = 20;
        const Matrix x = make_planted(ps).dataset.x;
        std::vector<std::size_t> first{0, 1};
        full += reconstruct_cv(x, x, seed).mean;
        tenth += reconstruct_cv(x.select_cols(first), x, seed).mean;
    }
    EXPECT_LE(full, tenth);
}

TEST(Defaults, EvaluatorSettings) {
    EXPECT_EQ(classification_defaults().hidden, 100u);
    EXPECT_EQ(reconstruction_defaults().hidden, 10u);
    EXPECT_EQ(classification_defaults().folds, 5u);
}
