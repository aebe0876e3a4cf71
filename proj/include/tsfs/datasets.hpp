#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "tsfs/linalg.hpp"

namespace tsfs {

/// Data matrix (n samples x d features) with optional class labels.
struct Dataset {
    Matrix x;
    std::optional<std::vector<int>> labels;  // values in [0, classes)
    std::vector<std::string> feature_names;  // empty or length d
    std::vector<std::string> class_names;    // empty or one per class id
    std::string name;

    std::size_t n() const noexcept { return x.rows(); }
    std::size_t d() const noexcept { return x.cols(); }
    bool has_labels() const noexcept { return labels.has_value(); }
    std::size_t classes() const;

    /// Throws InvalidInput unless n >= 2, d >= 2 and every class in [0, classes) occurs.
    void validate() const;
};

struct CsvOptions {
    bool has_header = false;
    /// Header name, or a 0-based column index written as a decimal string.
    std::optional<std::string> label_column;
};

/// Comma-separated numeric file. Label strings map to class ids in order of first appearance.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Whitespace-delimited matrix, plus an optional file with one label per line.
Dataset load_whitespace(const std::filesystem::path& matrix_path,
                        const std::optional<std::filesystem::path>& labels_path = std::nullopt);

/// Writes x as CSV (optionally with a trailing label column).
void write_csv(const std::filesystem::path& path, const Dataset& ds);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);

/// Per-column map to [0, 1]; constant columns become 0.
Dataset minmax_scale(const Dataset& ds);
/// Per-column zero mean, unit (1/n) variance; constant columns become 0.
Dataset standardize(const Dataset& ds);

/// Keeps at most `per_class` samples from each class, chosen with a seeded shuffle.
/// Retained samples keep their original relative order.
Dataset stratified_subsample(const Dataset& ds, std::size_t per_class, std::uint64_t seed);

struct FoldPlan {
    std::size_t n = 0;
    std::size_t folds = 0;
    std::vector<std::size_t> assignment;
    std::uint64_t seed = 0;

    std::vector<std::size_t> test_indices(std::size_t fold) const;
    std::vector<std::size_t> train_indices(std::size_t fold) const;
    std::vector<std::size_t> fold_sizes() const;
};

/// Seeded permutation dealt round-robin into folds.
FoldPlan kfold(std::size_t n, std::size_t folds, std::uint64_t seed);
/// Class-by-class seeded permutations dealt round-robin, continuing the deal across
/// classes, so each fold receives a near-equal share of every class.
FoldPlan stratified_kfold(const std::vector<int>& labels, std::size_t folds, std::uint64_t seed);

enum class PlantedStructure { linear, nonlinear };

struct PlantedSpec {
    std::size_t n = 300;
    std::size_t d = 50;
    std::size_t k_informative = 4;
    double noise_sigma = 0.1;
    /// Standard deviation of each informative column before noise is added.
    double signal_scale = 2.0;
    PlantedStructure structure = PlantedStructure::linear;
    std::uint64_t seed = 0;
    /// Labels are angular sectors of the latent signal.
    std::size_t classes = 4;
};

struct PlantedData {
    Dataset dataset;
    std::vector<std::size_t> informative;  // ascending
    Matrix latent;                         // n x 2
};

/// Synthetic data whose informative features are functions of a 2-D latent signal.
PlantedData make_planted(const PlantedSpec& spec);

}  // namespace tsfs
