#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsfs/datasets.hpp"
#include "tsfs/linalg.hpp"

namespace tsfs {

enum class TeacherMethod { pca, mds, isomap, lle, spectral, tsne, supervised_mlp };

std::string to_string(TeacherMethod m);
/// Accepts the names produced by to_string as well as dashed spellings ("supervised-mlp").
std::optional<TeacherMethod> parse_teacher(const std::string& name);
bool is_supervised(TeacherMethod m);

struct TsneParams {
    /// Unset means 30, capped at (n - 1) / 3. An explicit value must satisfy 1 < perplexity < n - 1.
    std::optional<double> perplexity;
    double learning_rate = 200.0;
    std::size_t iterations = 1000;
    double early_exaggeration = 12.0;
    std::size_t exaggeration_iters = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    std::size_t momentum_switch_iter = 250;
    double init_sigma = 1e-4;
    std::uint64_t seed = 0;
};

struct MlpTeacherParams {
    std::vector<std::size_t> hidden = {64};
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
};

/// Everything needed to reproduce a teacher fit.
struct TeacherSpec {
    TeacherMethod method = TeacherMethod::tsne;
    std::size_t dim = 2;
    std::size_t neighbors = 10;
    double lle_reg = 1e-3;
    std::optional<double> heat_t;  // nullopt = mean squared edge length
    TsneParams tsne;
    MlpTeacherParams mlp;
    std::uint64_t seed = 0;
};

struct Embedding {
    Matrix y;
    TeacherSpec spec;
    /// KL divergence per iteration (t-SNE only).
    std::vector<double> kl_trace;
    /// Training loss per epoch (supervised teacher only).
    std::vector<double> loss_history;
};

Embedding fit_pca(const Matrix& x, std::size_t dim);
Embedding fit_mds(const Matrix& x, std::size_t dim);
/// Classical MDS from squared distances; shared by fit_mds and fit_isomap.
Matrix classical_mds(const DistanceMatrix& dsq, std::size_t dim);
Embedding fit_isomap(const Matrix& x, std::size_t dim, std::size_t neighbors);

/// Barycentric reconstruction weights (n x k) and the neighbour indices they refer to.
struct LleWeights {
    std::vector<std::vector<std::size_t>> neighbors;
    Matrix weights;
};
LleWeights lle_weights(const Matrix& x, std::size_t neighbors, double reg);
/// (I - W)^T (I - W) for dense W built from `w`.
Matrix lle_embedding_matrix(const LleWeights& w);
Embedding fit_lle(const Matrix& x, std::size_t dim, std::size_t neighbors, double reg = 1e-3);

/// t itself when positive, otherwise the mean squared edge length of g.
double heat_kernel_width(const NeighborGraph& g, std::optional<double> t);
/// Heat-kernel weights exp(-d^2 / t) on a symmetrized kNN graph, as a dense matrix.
/// A non-positive or absent t means the mean squared edge length.
Matrix heat_kernel_weights(const NeighborGraph& g, std::optional<double> t);
Embedding fit_spectral(const Matrix& x, std::size_t dim, std::size_t neighbors, std::optional<double> heat_t = {});

struct SigmaCalibration {
    Vector conditional;  // p_{j|i}, zero at i
    double beta = 0.0;   // 1 / (2 sigma^2)
    double entropy = 0.0;
    int iterations = 0;
};

/// Binary search on log(beta) so that the conditional distribution over
/// `sq_distances` (entry `self` ignored) has entropy log(perplexity), in nats.
SigmaCalibration calibrate_sigma(std::span<const double> sq_distances, std::size_t self, double perplexity);

/// Symmetrized joint affinities P (n x n, sums to 1, zero diagonal).
Matrix tsne_affinities(const Matrix& x, double perplexity);
Embedding fit_tsne(const Matrix& x, std::size_t dim, const TsneParams& params);

/// Hidden layers of the classifier are `params.hidden` followed by a width-`dim` layer
/// whose ReLU activations form the embedding. Initializations whose code layer is inactive
/// on every sample are redrawn from derived seeds, as are fits that end with a constant code column.
Embedding fit_supervised_mlp(const Dataset& ds, std::size_t dim, const MlpTeacherParams& params, std::uint64_t seed);

/// Dispatches on spec.method. Supervised methods need labels.
Embedding fit_teacher(const Dataset& ds, const TeacherSpec& spec);

}  // namespace tsfs
