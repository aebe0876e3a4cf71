#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>

#include "support.hpp"
#include "tsfs/errors.hpp"
#include "tsfs/linalg.hpp"

using namespace tsfs;
using tsfs::test::random_matrix;
using tsfs::test::random_symmetric;

namespace {

// det(A - tI) by Gaussian elimination with partial pivoting.
double shifted_det(const Matrix& a, double t) {
    const std::size_t n = a.rows();
    Matrix m = a;
    for (std::size_t i = 0; i < n; ++i) m(i, i) -= t;
    double det = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
        if (m(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t j = 0; j < n; ++j) std::swap(m(c, j), m(piv, j));
            det = -det;
        }
        det *= m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (std::size_t j = c; j < n; ++j) m(r, j) -= f * m(c, j);
        }
    }
    return det;
}

// Real roots of the characteristic polynomial by grid scan and bisection.
std::vector<double> char_poly_roots(const Matrix& a) {
    const double bound = a.frobenius_norm() + 1.0;
    const int steps = 200000;
    std::vector<double> roots;
    double prev_t = -bound;
    double prev_f = shifted_det(a, prev_t);
    for (int s = 1; s <= steps; ++s) {
        const double t = -bound + 2.0 * bound * s / steps;
        const double f = shifted_det(a, t);
        if ((prev_f < 0.0) != (f < 0.0)) {
            double lo = prev_t, hi = t, flo = prev_f;
            for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = shifted_det(a, mid);
                if ((fm < 0.0) == (flo < 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prev_t = t;
        prev_f = f;
    }
    return roots;
}

double residual_norm(const Matrix& a, const EigenResult& e, std::size_t j) {
    double r = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double av = 0.0;
        for (std::size_t c = 0; c < a.cols(); ++c) av += a(i, c) * e.vectors(c, j);
        const double diff = av - e.values[j] * e.vectors(i, j);
        r += diff * diff;
    }
    return std::sqrt(r);
}

std::set<std::size_t> neighbor_set(const NeighborGraph& g, std::size_t i) {
    std::set<std::size_t> s;
    for (const Edge& e : g.neighbors(i)) s.insert(e.to);
    return s;
}

}  // namespace

TEST(PairwiseDistances, OneDimensionalPair) {
    const auto d = pairwise_sq_distances(Matrix{{0.0}, {3.0}});
    EXPECT_EQ(d(0, 1), 9.0);
    EXPECT_EQ(d(1, 0), 9.0);
    EXPECT_EQ(d(0, 0), 0.0);
}

TEST(PairwiseDistances, IdenticalPointsGiveZeros) {
    const auto d = pairwise_sq_distances(Matrix{{1.0, 1.0}, {1.0, 1.0}});
    for (double v : d.matrix().values()) EXPECT_EQ(v, 0.0);
}

TEST(PairwiseDistances, MatchesBruteForceAndIsExactlySymmetric) {
    const Matrix x = random_matrix(5, 3, 11);
    const auto d = pairwise_sq_distances(x);
    for (std::size_t i = 0; i < 5; ++i) {
        for (std::size_t j = 0; j < 5; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < 3; ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
            EXPECT_NEAR(d(i, j), s, 1e-12);
            EXPECT_EQ(d(i, j), d(j, i));
        }
    }
}

TEST(DistanceMatrix, RejectsAsymmetricInput) {
    EXPECT_THROW(DistanceMatrix::from_matrix(Matrix{{0.0, 1.0}, {2.0, 0.0}}), InvalidInput);
    EXPECT_THROW(DistanceMatrix::from_matrix(Matrix{{1.0, 1.0}, {1.0, 0.0}}), InvalidInput);
}

TEST(SymEig, DiagonalMatrix) {
    const auto e = sym_eig(Matrix{{2.0, 0.0}, {0.0, 1.0}}, 2, EigenEnd::largest);
    EXPECT_NEAR(e.values[0], 2.0, 1e-14);
    EXPECT_NEAR(e.values[1], 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(1, 1)), 1.0, 1e-14);
}

TEST(SymEig, SwapMatrix) {
    const auto e = sym_eig(Matrix{{0.0, 1.0}, {1.0, 0.0}}, 2, EigenEnd::largest);
    const double r = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(e.values[0], 1.0, 1e-14);
    EXPECT_NEAR(e.values[1], -1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 0)), r, 1e-12);
    EXPECT_NEAR(e.vectors(0, 0) * e.vectors(1, 0), 0.5, 1e-12);
    EXPECT_NEAR(e.vectors(0, 1) * e.vectors(1, 1), -0.5, 1e-12);
}

TEST(SymEig, MatchesCharacteristicPolynomialRoots) {
    const Matrix a = random_symmetric(6, 21);
    const auto e = sym_eig(a, 6, EigenEnd::smallest);
    const auto roots = char_poly_roots(a);
    ASSERT_EQ(roots.size(), 6u);
    for (std::size_t j = 0; j < 6; ++j) {
        EXPECT_NEAR(e.values[j], roots[j], 1e-6);
        EXPECT_LE(residual_norm(a, e, j), 1e-8 * a.frobenius_norm());
    }
}

TEST(SymEig, FullReconstructionAndOrthonormality) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 3 + seed;
        const Matrix a = random_symmetric(n, 100 + seed);
        const auto e = sym_eig(a, n, EigenEnd::largest);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double r = 0.0, dot = 0.0;
                for (std::size_t c = 0; c < n; ++c) {
                    r += e.vectors(i, c) * e.values[c] * e.vectors(j, c);
                    dot += e.vectors(c, i) * e.vectors(c, j);
                }
                err += (r - a(i, j)) * (r - a(i, j));
                EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-8);
            }
        }
        EXPECT_LE(std::sqrt(err), 1e-7 * a.frobenius_norm());
        for (std::size_t j = 0; j + 1 < n; ++j) EXPECT_GE(e.values[j], e.values[j + 1]);
    }
}

TEST(SymEig, LargestComponentIsPositive) {
    const auto e = sym_eig(random_symmetric(7, 5), 7, EigenEnd::smallest);
    for (std::size_t j = 0; j < 7; ++j) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < 7; ++i)
            if (std::abs(e.vectors(i, j)) > std::abs(e.vectors(best, j))) best = i;
        EXPECT_GT(e.vectors(best, j), 0.0);
    }
}

TEST(SymEig, RejectsBadInput) {
    EXPECT_THROW(sym_eig(Matrix(2, 3), 1, EigenEnd::largest), InvalidInput);
    EXPECT_THROW(sym_eig(Matrix{{1.0, 2.0}, {0.0, 1.0}}, 1, EigenEnd::largest), InvalidInput);
}

TEST(KnnGraph, CollinearPoints) {
    const auto g = knn_graph(Matrix{{0.0}, {1.0}, {10.0}}, 1, false);
    EXPECT_EQ(g.neighbors(0)[0].to, 1u);
    EXPECT_EQ(g.neighbors(1)[0].to, 0u);
    EXPECT_EQ(g.neighbors(2)[0].to, 1u);
}

TEST(KnnGraph, DuplicatePointsExcludeSelf) {
    const auto g = knn_graph(Matrix{{1.0, 1.0}, {1.0, 1.0}, {5.0, 5.0}}, 1, false);
    EXPECT_EQ(g.neighbors(0)[0].to, 1u);
    EXPECT_EQ(g.neighbors(0)[0].weight, 0.0);
    EXPECT_EQ(g.neighbors(1)[0].to, 0u);
}

TEST(KnnGraph, MatchesFullSortOracle) {
    const Matrix x = random_matrix(20, 4, 3);
    const auto g = knn_graph(x, 3, false);
    for (std::size_t i = 0; i < 20; ++i) {
        std::vector<std::pair<double, std::size_t>> all;
        for (std::size_t j = 0; j < 20; ++j) {
            if (j == i) continue;
            double s = 0.0;
            for (std::size_t c = 0; c < 4; ++c) s += (x(i, c) - x(j, c)) * (x(i, c) - x(j, c));
            all.emplace_back(s, j);
        }
        std::sort(all.begin(), all.end());
        const std::set<std::size_t> want{all[0].second, all[1].second, all[2].second};
        EXPECT_EQ(neighbor_set(g, i), want);
        for (const Edge& e : g.neighbors(i)) {
            double s = 0.0;
            for (std::size_t c = 0; c < 4; ++c) s += (x(i, c) - x(e.to, c)) * (x(i, c) - x(e.to, c));
            EXPECT_NEAR(e.weight, std::sqrt(s), 1e-12);
        }
    }
}

TEST(KnnGraph, SymmetrizedIsUnionOfDirections) {
    const Matrix x = random_matrix(15, 3, 8);
    const auto directed = knn_graph(x, 2, false);
    const auto sym = knn_graph(x, 2, true);
    for (std::size_t i = 0; i < 15; ++i) {
        std::set<std::size_t> want = neighbor_set(directed, i);
        for (std::size_t j = 0; j < 15; ++j)
            if (neighbor_set(directed, j).count(i)) want.insert(j);
        EXPECT_EQ(neighbor_set(sym, i), want);
    }
}

TEST(KnnGraph, RejectsKAtLeastN) {
    EXPECT_THROW(knn_graph(random_matrix(4, 2, 1), 4, false), InvalidInput);
}

TEST(ShortestPaths, Chain) {
    const std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {1, 2}};
    const std::vector<double> w{1.0, 1.0};
    const auto d = shortest_paths(NeighborGraph::from_undirected_edges(3, edges, w));
    EXPECT_EQ(d(0, 2), 2.0);
    EXPECT_EQ(d(2, 0), 2.0);
}

TEST(ShortestPaths, Triangle) {
    const std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {1, 2}, {0, 2}};
    const std::vector<double> w{1.0, 1.0, 1.0};
    const auto d = shortest_paths(NeighborGraph::from_undirected_edges(3, edges, w));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(d(i, j), i == j ? 0.0 : 1.0);
}

TEST(ShortestPaths, MatchesFloydWarshall) {
    const std::size_t n = 15;
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> weight(1, 20);
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    std::vector<double> w;
    for (std::size_t i = 1; i < n; ++i) {
        edges.emplace_back(std::uniform_int_distribution<std::size_t>(0, i - 1)(rng), i);
        w.push_back(weight(rng));
    }
    for (int extra = 0; extra < 20; ++extra) {
        const std::size_t a = rng() % n, b = rng() % n;
        if (a == b) continue;
        edges.emplace_back(a, b);
        w.push_back(weight(rng));
    }
    const auto g = NeighborGraph::from_undirected_edges(n, edges, w);
    const auto d = shortest_paths(g);

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> fw(n, std::vector<double>(n, inf));
    for (std::size_t i = 0; i < n; ++i) fw[i][i] = 0.0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [a, b] = edges[e];
        fw[a][b] = std::min(fw[a][b], w[e]);
        fw[b][a] = std::min(fw[b][a], w[e]);
    }
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) fw[i][j] = std::min(fw[i][j], fw[i][k] + fw[k][j]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) EXPECT_EQ(d(i, j), fw[i][j]);
}

TEST(ShortestPaths, TriangleInequalityOnKnnGraph) {
    const auto d = shortest_paths(knn_graph(random_matrix(25, 3, 4), 5, true));
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j)
            for (std::size_t k = 0; k < d.size(); ++k) EXPECT_LE(d(i, j), d(i, k) + d(k, j) + 1e-12);
}

TEST(ShortestPaths, DisconnectedGraphReportsComponents) {
    const std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {2, 3}};
    const std::vector<double> w{1.0, 1.0};
    const auto g = NeighborGraph::from_undirected_edges(4, edges, w);
    EXPECT_EQ(g.component_count(), 2u);
    try {
        shortest_paths(g);
        FAIL() << "expected ConnectivityError";
    } catch (const ConnectivityError& e) {
        EXPECT_EQ(e.components(), 2u);
    }
}

TEST(DoubleCenter, ZeroInput) {
    const auto b = double_center(DistanceMatrix::from_matrix(Matrix(3, 3, 0.0)));
    for (double v : b.values()) EXPECT_EQ(v, 0.0);
}

TEST(DoubleCenter, TwoPoints) {
    const auto b = double_center(DistanceMatrix::from_matrix(Matrix{{0.0, 4.0}, {4.0, 0.0}}));
    EXPECT_NEAR(b(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(b(0, 1), -1.0, 1e-15);
    EXPECT_NEAR(b(1, 0), -1.0, 1e-15);
    EXPECT_NEAR(b(1, 1), 1.0, 1e-15);
}

TEST(DoubleCenter, RowSumsVanish) {
    const auto b = double_center(pairwise_sq_distances(random_matrix(12, 4, 9)));
    for (std::size_t i = 0; i < b.rows(); ++i) {
        double s = 0.0;
        for (double v : b.row(i)) s += v;
        EXPECT_LE(std::abs(s), 1e-10);
    }
}

TEST(CholeskySolve, SolvesSpdSystem) {
    const Matrix r = random_matrix(5, 5, 2);
    Matrix a = matmul_tn(r, r);
    for (std::size_t i = 0; i < 5; ++i) a(i, i) += 1.0;
    const Matrix b = random_matrix(5, 2, 3);
    const Matrix x = cholesky_solve(a, b);
    const Matrix ax = matmul(a, x);
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(ax(i, j), b(i, j), 1e-10);
}

TEST(CholeskySolve, RejectsIndefinite) {
    EXPECT_THROW(cholesky_solve(Matrix{{1.0, 0.0}, {0.0, -1.0}}, Matrix{{1.0}, {1.0}}), NumericalError);
}

TEST(Matrix, RejectsNonFiniteAndEmptyShapes) {
    EXPECT_THROW(Matrix(0, 2), InvalidInput);
    EXPECT_THROW(Matrix(1, 1, std::numeric_limits<double>::quiet_NaN()), InvalidInput);
}

TEST(Matrix, ProductsAgree) {
    const Matrix a = random_matrix(4, 3, 1), b = random_matrix(4, 2, 2), c = random_matrix(5, 3, 3);
    const Matrix tn = matmul_tn(a, b), tn_ref = matmul(a.transpose(), b);
    const Matrix nt = matmul_nt(a, c), nt_ref = matmul(a, c.transpose());
    for (std::size_t k = 0; k < tn.size(); ++k) EXPECT_NEAR(tn.values()[k], tn_ref.values()[k], 1e-12);
    for (std::size_t k = 0; k < nt.size(); ++k) EXPECT_NEAR(nt.values()[k], nt_ref.values()[k], 1e-12);
}
