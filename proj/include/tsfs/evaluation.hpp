#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tsfs/linalg.hpp"

namespace tsfs {

struct ClusteringRun {
    std::vector<int> labels;  // values in [0, k)
    double inertia = 0.0;
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    std::vector<double> inertia_history;  // after each assignment step
};

/// Lloyd's algorithm from k distinct randomly chosen samples.
ClusteringRun kmeans(const Matrix& x, std::size_t k, std::uint64_t seed, std::size_t max_iter = 300);

/// Row i is assigned to column result[i]; minimizes total cost.
std::vector<std::size_t> hungarian(const Matrix& cost);
double assignment_cost(const Matrix& cost, std::span<const std::size_t> assignment);

/// Fraction of samples whose cluster maps to their class under the best one-to-one mapping.
double clustering_acc(std::span<const int> c, std::span<const int> y);
/// MI / max(H(c), H(y)) in nats; nullopt when both partitions are constant.
std::optional<double> nmi(std::span<const int> c, std::span<const int> y);

struct ClusteringEval {
    std::vector<double> acc;
    std::vector<double> nmi;
    double acc_mean = 0.0;
    double nmi_mean = 0.0;
};

/// k-means with seeds base_seed .. base_seed + runs - 1.
ClusteringEval clustering_eval(const Matrix& x, std::span<const int> y, std::size_t k, std::size_t runs,
                               std::uint64_t base_seed);

struct CvConfig {
    std::size_t folds = 5;
    std::size_t hidden = 100;
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
};

inline CvConfig classification_defaults() { return {}; }
inline CvConfig reconstruction_defaults() {
    CvConfig c;
    c.hidden = 10;
    return c;
}

struct CvResult {
    std::vector<double> per_fold;
    double mean = 0.0;
};

/// Stratified k-fold accuracy of an input -> hidden (ReLU) -> softmax classifier.
CvResult classify_cv(const Matrix& x_sel, std::span<const int> y, std::uint64_t seed,
                     const CvConfig& cfg = classification_defaults());

/// k-fold held-out MSE of an m -> hidden (ReLU) -> d regressor predicting x_full from x_sel.
CvResult reconstruct_cv(const Matrix& x_sel, const Matrix& x_full, std::uint64_t seed,
                        const CvConfig& cfg = reconstruction_defaults());

struct MetricReport {
    std::string dataset;
    std::string method;
    std::string teacher;
    double percent = 0.0;
    std::size_t m = 0;
    std::uint64_t seed = 0;
    std::optional<ClusteringEval> clustering;
    std::optional<CvResult> classification;
    std::optional<CvResult> reconstruction;
};

}  // namespace tsfs
