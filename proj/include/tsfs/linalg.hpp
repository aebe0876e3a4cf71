#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace tsfs {

using Vector = std::vector<double>;

class NeighborGraph;

/// Dense row-major matrix of finite doubles.
///
/// A default-constructed Matrix is empty (0 x 0) and acts as an "unset" value;
/// every other constructor requires rows >= 1 and cols >= 1 and rejects
/// non-finite entries.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * cols_, cols_}; }
    Vector col(std::size_t j) const;

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    Matrix transpose() const;
    /// Columns picked in the given order.
    Matrix select_cols(std::span<const std::size_t> cols) const;
    Matrix select_rows(std::span<const std::size_t> rows) const;

    bool all_finite() const noexcept;
    double frobenius_norm() const noexcept;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

Matrix matmul(const Matrix& a, const Matrix& b);
/// a^T * b
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// a * b^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

Vector column_means(const Matrix& x);
Matrix center_columns(const Matrix& x);

/// Square matrix of pairwise distances. Exactly symmetric, zero diagonal, non-negative.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    /// Validates the invariants; throws InvalidInput when they do not hold.
    static DistanceMatrix from_matrix(Matrix m);

    std::size_t size() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }

private:
    friend DistanceMatrix pairwise_sq_distances(const Matrix& x);
    friend DistanceMatrix shortest_paths(const NeighborGraph& g);
    explicit DistanceMatrix(Matrix m) : m_(std::move(m)) {}
    Matrix m_;
};

struct Edge {
    std::size_t to;
    double weight;
};

/// k-nearest-neighbour graph. In the directed form every node has exactly k
/// out-edges; the symmetrized form holds the union of both directions.
class NeighborGraph {
public:
    NeighborGraph() = default;
    NeighborGraph(std::size_t k, bool symmetric, std::vector<std::vector<Edge>> adjacency);

    /// Undirected graph from an explicit edge list (weights are taken as given).
    static NeighborGraph from_undirected_edges(std::size_t n,
                                               std::span<const std::pair<std::size_t, std::size_t>> edges,
                                               std::span<const double> weights);

    std::size_t size() const noexcept { return adjacency_.size(); }
    std::size_t k() const noexcept { return k_; }
    bool symmetric() const noexcept { return symmetric_; }
    std::span<const Edge> neighbors(std::size_t i) const noexcept { return adjacency_[i]; }
    /// Component index per node, numbered in order of first node.
    std::vector<std::size_t> components() const;
    std::size_t component_count() const;

private:
    std::size_t k_ = 0;
    bool symmetric_ = false;
    std::vector<std::vector<Edge>> adjacency_;
};

enum class EigenEnd { smallest, largest };

struct EigenResult {
    Vector values;
    Matrix vectors;  // n x k, column j pairs with values[j]
};

/// Squared Euclidean distances between rows of x.
DistanceMatrix pairwise_sq_distances(const Matrix& x);

/// k eigenpairs of a symmetric matrix from the requested end of the spectrum,
/// computed with cyclic Jacobi rotations. Eigenvectors have unit norm and their
/// largest-magnitude component positive.
EigenResult sym_eig(const Matrix& a, std::size_t k, EigenEnd which);

/// Neighbours by Euclidean distance, ties broken by lower index. Edge weights are distances.
NeighborGraph knn_graph(const Matrix& x, std::size_t k, bool symmetrize);

/// All-pairs shortest paths (Dijkstra from each node) on a symmetrized graph.
DistanceMatrix shortest_paths(const NeighborGraph& g);

/// -1/2 J D J with J = I - 11^T / n.
Matrix double_center(const DistanceMatrix& dsq);

/// Solves the symmetric positive definite system a x = b (b may hold several
/// columns). Throws NumericalError if a is not numerically positive definite.
Matrix cholesky_solve(const Matrix& a, const Matrix& b);

}  // namespace tsfs
