#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tsfs/linalg.hpp"
#include "tsfs/neural.hpp"
#include "tsfs/student.hpp"

namespace tsfs {

struct BaselineResult {
    std::string method;
    Vector scores;
    bool higher_is_better = true;
    std::vector<std::size_t> ranking;
    /// Iterative methods only.
    bool converged = true;
    std::size_t iterations = 0;
    std::vector<double> objective_history;
};

/// Score assigned to features whose Laplacian Score is 0/0.
inline constexpr double kWorstLaplacianScore = 1.0e300;

/// Per-feature variance with a 1/n denominator.
BaselineResult variance_score(const Matrix& x);

/// Laplacian Score on a symmetrized kNN heat-kernel graph; lower is better.
BaselineResult laplacian_score(const Matrix& x, std::size_t neighbors, std::optional<double> heat_t = {});

struct RsrOptions {
    /// Unset: n / 2. The loss sums n per-sample norms, so useful values grow with n.
    std::optional<double> lambda;
    std::size_t max_iters = 100;
    double tol = 1e-6;
    /// Smoothing inside both reweighting matrices.
    double epsilon = 1e-8;
};

/// sum_i sqrt(||r_i||^2 + eps^2) + lambda * sum_j sqrt(||w_j||^2 + eps^2), r = X - XW.
/// With eps = 0 this is the unsmoothed objective.
double rsr_objective(const Matrix& x, const Matrix& w, double lambda, double epsilon);

struct RsrFit {
    Matrix w;  // d x d
    BaselineResult result;
};

/// Self-representation X ~ XW with L2,1 loss and L2,1 penalty, solved by
/// iteratively reweighted least squares. Scores are the row norms of W.
RsrFit rsr_fit(const Matrix& x, const RsrOptions& options);
BaselineResult rsr(const Matrix& x, const RsrOptions& options);

struct AefsOptions {
    double lambda = 1.0;
    double beta = 1e-2;
    std::size_t hidden = 20;
    TrainConfig train;
};

/// Objective regularizer: lambda * ||W1||_{2,1} + beta * (||W1||_F^2 + ||W2||_F^2).
Regularizer aefs_regularizer(double lambda, double beta, double epsilon = 1e-8);

struct AefsFit {
    DenseNet net;
    std::vector<double> history;
    BaselineResult result;
};

/// Autoencoder d -> hidden (ReLU) -> d. Scores are squared row norms of W1.
AefsFit aefs_fit(const Matrix& x, const AefsOptions& options);
BaselineResult aefs(const Matrix& x, const AefsOptions& options);

/// Seeded uniform scores: the random-subset control.
BaselineResult random_scores(std::size_t d, std::uint64_t seed);

/// Ranking slice with the method tag carried over.
SelectionResult to_selection(const BaselineResult& result, double percent);

}  // namespace tsfs
