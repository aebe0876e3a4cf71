#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tsfs/datasets.hpp"
#include "tsfs/linalg.hpp"
#include "tsfs/neural.hpp"
#include "tsfs/teacher.hpp"

namespace tsfs {

struct StudentConfig {
    std::size_t hidden = 20;
    double lambda = 0.1;
    std::size_t epochs = 500;
    std::size_t batch_size = 32;
    double learning_rate = 0.001;
    std::uint64_t seed = 0;
    double l21_epsilon = 1e-8;
};

/// Single-hidden-layer student d -> hidden (ReLU) -> l (identity).
struct StudentModel {
    DenseNet net;

    const Matrix& first_layer() const { return net.layer(0).w; }
};

/// Feature ranking plus the top-p% slice of it.
struct SelectionResult {
    std::string method = "tsfs";
    std::string teacher;  // empty for methods without a teacher
    std::map<std::string, std::uint64_t> seeds;
    Vector scores;
    bool higher_is_better = true;
    std::vector<std::size_t> ranking;
    std::vector<std::size_t> selected;
    double percent = 100.0;
    std::size_t m = 0;
};

/// Per-column (y - min) / (max - min); constant columns become 0 with a warning.
Matrix normalize_codes(const Matrix& y);

/// Sum of Euclidean row norms.
double l21_norm(const Matrix& w);
/// Row i: w_i / max(||w_i||, epsilon).
Matrix l21_grad(const Matrix& w, double epsilon);

/// lambda * ||W1||_{2,1} on the first layer only, with the smoothed gradient.
Regularizer l21_regularizer(double lambda, double epsilon);

/// (1/2n) ||yn - student(x)||_F^2 + lambda ||W1||_{2,1}
double tsfs_loss(const DenseNet& net, const Matrix& x, const Matrix& yn, double lambda);

struct StudentFit {
    StudentModel model;
    std::vector<double> history;  // objective after each epoch
};

/// Normalizes `y` and trains the student. `init` replaces the seeded initialization
/// when given (it must have shape d -> hidden -> l).
StudentFit train_student(const Matrix& x, const Matrix& y, const StudentConfig& cfg,
                         std::optional<DenseNet> init = std::nullopt);

/// Squared Euclidean norm of each row of the first-layer weights.
Vector feature_scores(const StudentModel& model);
Vector feature_scores(const Matrix& first_layer);

/// Indices ordered best first (descending when higher_is_better), ties by lower index.
std::vector<std::size_t> rank_features(const Vector& scores, bool higher_is_better = true);
/// max(1, floor(p * d / 100)); p must lie in (0, 100].
std::size_t selection_size(std::size_t d, double percent);
/// Fills ranking (if empty), selected, percent and m.
void apply_percent(SelectionResult& result, double percent);

SelectionResult select_top(const Vector& scores, double percent);

/// Teacher fit, student training and scoring with the top-p% selection.
SelectionResult run_tsfs(const Dataset& ds, const TeacherSpec& teacher, double percent, const StudentConfig& cfg);
/// Same pipeline from an already fitted embedding.
SelectionResult run_tsfs(const Matrix& x, const Embedding& embedding, double percent, const StudentConfig& cfg);

}  // namespace tsfs
