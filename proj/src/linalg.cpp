#include "tsfs/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <limits>
#include <queue>
#include <string>

#include "tsfs/errors.hpp"

namespace tsfs {

namespace {

void require_dims(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw InvalidInput("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                           std::to_string(cols));
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols) {
    require_dims(rows, cols);
    if (!std::isfinite(fill)) throw InvalidInput("matrix fill value is not finite");
    values_.assign(rows * cols, fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    require_dims(rows, cols);
    if (values_.size() != rows * cols) {
        throw InvalidInput("matrix storage holds " + std::to_string(values_.size()) + " values, expected " +
                           std::to_string(rows * cols));
    }
    if (!all_finite()) throw InvalidInput("matrix contains non-finite entries");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    require_dims(rows_, cols_);
    values_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw InvalidInput("ragged matrix initializer");
        values_.insert(values_.end(), r.begin(), r.end());
    }
    if (!all_finite()) throw InvalidInput("matrix contains non-finite entries");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Vector Matrix::col(std::size_t j) const {
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::select_cols(std::span<const std::size_t> cols) const {
    Matrix out(rows_, cols.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (cols[c] >= cols_) throw InvalidInput("column index out of range");
            out(i, c) = (*this)(i, cols[c]);
        }
    return out;
}

Matrix Matrix::select_rows(std::span<const std::size_t> rows) const {
    Matrix out(rows.size(), cols_);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= rows_) throw InvalidInput("row index out of range");
        std::copy_n(row(rows[r]).begin(), cols_, out.row(r).begin());
    }
    return out;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Matrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return std::sqrt(s);
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw InvalidInput("matmul: inner dimensions differ");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto crow = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto brow = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw InvalidInput("matmul_tn: row counts differ");
    Matrix c(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto arow = a.row(k);
        auto brow = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            auto crow = c.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j) crow[j] += aki * brow[j];
        }
    }
    return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw InvalidInput("matmul_nt: column counts differ");
    Matrix c(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto arow = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            auto brow = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += arow[k] * brow[k];
            c(i, j) = s;
        }
    }
    return c;
}

Vector column_means(const Matrix& x) {
    Vector mean(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) mean[j] += x(i, j);
    for (double& m : mean) m /= static_cast<double>(x.rows());
    return mean;
}

Matrix center_columns(const Matrix& x) {
    const Vector mean = column_means(x);
    Matrix out = x;
    for (std::size_t i = 0; i < x.rows(); ++i)
        for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) -= mean[j];
    return out;
}

DistanceMatrix DistanceMatrix::from_matrix(Matrix m) {
    if (m.rows() != m.cols()) throw InvalidInput("distance matrix must be square");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (m(i, i) != 0.0) throw InvalidInput("distance matrix diagonal must be zero");
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j) < 0.0) throw InvalidInput("distance matrix entries must be non-negative");
            if (m(i, j) != m(j, i)) throw InvalidInput("distance matrix must be symmetric");
        }
    }
    return DistanceMatrix(std::move(m));
}

NeighborGraph::NeighborGraph(std::size_t k, bool symmetric, std::vector<std::vector<Edge>> adjacency)
    : k_(k), symmetric_(symmetric), adjacency_(std::move(adjacency)) {}

NeighborGraph NeighborGraph::from_undirected_edges(std::size_t n,
                                                   std::span<const std::pair<std::size_t, std::size_t>> edges,
                                                   std::span<const double> weights) {
    if (edges.size() != weights.size()) throw InvalidInput("edge and weight counts differ");
    std::vector<std::vector<Edge>> adj(n);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [a, b] = edges[e];
        if (a >= n || b >= n || a == b) throw InvalidInput("invalid edge");
        if (!(weights[e] >= 0.0)) throw InvalidInput("edge weights must be non-negative");
        adj[a].push_back({b, weights[e]});
        adj[b].push_back({a, weights[e]});
    }
    std::size_t max_degree = 0;
    for (const auto& a : adj) max_degree = std::max(max_degree, a.size());
    return NeighborGraph(max_degree, true, std::move(adj));
}

std::vector<std::size_t> NeighborGraph::components() const {
    const std::size_t n = size();
    constexpr std::size_t unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> label(n, unset);
    // Directed edges are followed both ways so the result is the weak components.
    std::vector<std::vector<std::size_t>> undirected(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const Edge& e : adjacency_[i]) {
            undirected[i].push_back(e.to);
            undirected[e.to].push_back(i);
        }
    std::size_t next = 0;
    std::vector<std::size_t> stack;
    for (std::size_t s = 0; s < n; ++s) {
        if (label[s] != unset) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v : undirected[u])
                if (label[v] == unset) {
                    label[v] = next;
                    stack.push_back(v);
                }
        }
        ++next;
    }
    return label;
}

std::size_t NeighborGraph::component_count() const {
    const auto labels = components();
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

DistanceMatrix pairwise_sq_distances(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        auto xi = x.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            auto xj = x.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                const double diff = xi[k] - xj[k];
                s += diff * diff;
            }
            d(i, j) = s;
            d(j, i) = s;
        }
    }
    return DistanceMatrix(std::move(d));
}

EigenResult sym_eig(const Matrix& input, std::size_t k, EigenEnd which) {
    const std::size_t n = input.rows();
    if (n == 0 || n != input.cols()) throw InvalidInput("sym_eig: matrix must be square");
    if (k < 1 || k > n) throw InvalidInput("sym_eig: k must lie in [1, n]");
    const double fro = input.frobenius_norm();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(input(i, j) - input(j, i)) > 1e-10 * fro)
                throw InvalidInput("sym_eig: matrix is not symmetric");

    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
    Matrix vt = Matrix::identity(n);  // row r holds eigenvector r

    constexpr int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off == 0.0 || std::sqrt(off) <= 1e-15 * fro) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                if (sweep > 3 && std::abs(app) + 100.0 * std::abs(apq) == std::abs(app) &&
                    std::abs(aqq) + 100.0 * std::abs(apq) == std::abs(aqq)) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    const double np = c * arp - s * arq;
                    const double nq = s * arp + c * arq;
                    a(r, p) = a(p, r) = np;
                    a(r, q) = a(q, r) = nq;
                }
                a(p, p) = app - t * apq;
                a(q, q) = aqq + t * apq;
                a(p, q) = a(q, p) = 0.0;
                auto vp = vt.row(p);
                auto vq = vt.row(q);
                for (std::size_t r = 0; r < n; ++r) {
                    const double x = vp[r];
                    const double y = vq[r];
                    vp[r] = c * x - s * y;
                    vq[r] = s * x + c * y;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return which == EigenEnd::largest ? a(i, i) > a(j, j) : a(i, i) < a(j, j);
    });

    EigenResult result;
    result.values.resize(k);
    result.vectors = Matrix(n, k);
    double worst = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t idx = order[c];
        auto v = vt.row(idx);
        double norm = 0.0;
        std::size_t argmax = 0;
        for (std::size_t r = 0; r < n; ++r) {
            norm += v[r] * v[r];
            if (std::abs(v[r]) > std::abs(v[argmax])) argmax = r;
        }
        norm = std::sqrt(norm);
        const double sign = v[argmax] < 0.0 ? -1.0 : 1.0;
        const double lambda = a(idx, idx);
        result.values[c] = lambda;
        for (std::size_t r = 0; r < n; ++r) result.vectors(r, c) = sign * v[r] / norm;

        double res = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            double av = 0.0;
            for (std::size_t j = 0; j < n; ++j) av += input(r, j) * result.vectors(j, c);
            const double diff = av - lambda * result.vectors(r, c);
            res += diff * diff;
        }
        worst = std::max(worst, std::sqrt(res));
    }
    if (worst > 1e-8 * fro) throw ConvergenceError("sym_eig: Jacobi iteration did not converge", worst);
    return result;
}

NeighborGraph knn_graph(const Matrix& x, std::size_t k, bool symmetrize) {
    const std::size_t n = x.rows();
    if (k < 1 || k >= n) {
        throw InvalidInput("knn_graph: need 1 <= k < n (k=" + std::to_string(k) + ", n=" + std::to_string(n) + ")");
    }
    const DistanceMatrix d2 = pairwise_sq_distances(x);
    std::vector<std::vector<Edge>> adj(n);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i) {
        idx.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) idx.push_back(j);
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                          [&](std::size_t a, std::size_t b) {
                              return d2(i, a) < d2(i, b) || (d2(i, a) == d2(i, b) && a < b);
                          });
        for (std::size_t c = 0; c < k; ++c) adj[i].push_back({idx[c], std::sqrt(d2(i, idx[c]))});
    }
    if (!symmetrize) return NeighborGraph(k, false, std::move(adj));

    std::vector<std::vector<Edge>> sym(n);
    for (std::size_t i = 0; i < n; ++i)
        for (const Edge& e : adj[i]) {
            sym[i].push_back(e);
            sym[e.to].push_back({i, e.weight});
        }
    for (auto& list : sym) {
        std::sort(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to < b.to; });
        list.erase(std::unique(list.begin(), list.end(), [](const Edge& a, const Edge& b) { return a.to == b.to; }),
                   list.end());
    }
    return NeighborGraph(k, true, std::move(sym));
}

DistanceMatrix shortest_paths(const NeighborGraph& g) {
    if (!g.symmetric()) throw InvalidInput("shortest_paths: graph must be symmetrized");
    const std::size_t n = g.size();
    if (const std::size_t comps = g.component_count(); comps > 1) throw ConnectivityError(comps);

    Matrix dist(n, n);
    std::vector<double> best(n);
    using Item = std::pair<double, std::size_t>;
    for (std::size_t s = 0; s < n; ++s) {
        std::fill(best.begin(), best.end(), std::numeric_limits<double>::infinity());
        best[s] = 0.0;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.push({0.0, s});
        while (!heap.empty()) {
            const auto [du, u] = heap.top();
            heap.pop();
            if (du > best[u]) continue;
            for (const Edge& e : g.neighbors(u)) {
                const double cand = du + e.weight;
                if (cand < best[e.to]) {
                    best[e.to] = cand;
                    heap.push({cand, e.to});
                }
            }
        }
        for (std::size_t t = 0; t < n; ++t) dist(s, t) = best[t];
    }
    // Dijkstra runs can differ in the last bit between directions.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::min(dist(i, j), dist(j, i));
            dist(i, j) = dist(j, i) = v;
        }
    return DistanceMatrix(std::move(dist));
}

Matrix double_center(const DistanceMatrix& dsq) {
    const std::size_t n = dsq.size();
    Vector row_mean(n, 0.0);
    double grand = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) row_mean[i] += dsq(i, j);
        grand += row_mean[i];
        row_mean[i] /= static_cast<double>(n);
    }
    grand /= static_cast<double>(n * n);
    Matrix b(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            // Symmetric matrix: column means equal row means.
            const double v = -0.5 * (dsq(i, j) - row_mean[i] - row_mean[j] + grand);
            b(i, j) = b(j, i) = v;
        }
    return b;
}

Matrix cholesky_solve(const Matrix& a, const Matrix& b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.rows() != n) throw InvalidInput("cholesky_solve: dimension mismatch");
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diag = std::max(max_diag, std::abs(a(i, i)));
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double s = a(j, j);
        for (std::size_t k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
        if (!(s > 1e-14 * max_diag) || max_diag == 0.0)
            throw NumericalError("cholesky_solve: matrix is singular or not positive definite");
        l(j, j) = std::sqrt(s);
        for (std::size_t i = j + 1; i < n; ++i) {
            double t = a(i, j);
            for (std::size_t k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
            l(i, j) = t / l(j, j);
        }
    }
    Matrix x = b;
    for (std::size_t c = 0; c < b.cols(); ++c) {
        for (std::size_t i = 0; i < n; ++i) {
            double t = x(i, c);
            for (std::size_t k = 0; k < i; ++k) t -= l(i, k) * x(k, c);
            x(i, c) = t / l(i, i);
        }
        for (std::size_t i = n; i-- > 0;) {
            double t = x(i, c);
            for (std::size_t k = i + 1; k < n; ++k) t -= l(k, i) * x(k, c);
            x(i, c) = t / l(i, i);
        }
    }
    return x;
}

}  // namespace tsfs
