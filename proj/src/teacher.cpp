#include "tsfs/teacher.hpp"

#include <algorithm>
#include <cmath>

#include "tsfs/errors.hpp"
#include "tsfs/log.hpp"
#include "tsfs/neural.hpp"

namespace tsfs {

std::string to_string(TeacherMethod m) {
    switch (m) {
        case TeacherMethod::pca: return "pca";
        case TeacherMethod::mds: return "mds";
        case TeacherMethod::isomap: return "isomap";
        case TeacherMethod::lle: return "lle";
        case TeacherMethod::spectral: return "spectral";
        case TeacherMethod::tsne: return "tsne";
        case TeacherMethod::supervised_mlp: return "supervised_mlp";
    }
    return "unknown";
}

std::optional<TeacherMethod> parse_teacher(const std::string& name) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    for (auto m : {TeacherMethod::pca, TeacherMethod::mds, TeacherMethod::isomap, TeacherMethod::lle,
                   TeacherMethod::spectral, TeacherMethod::tsne, TeacherMethod::supervised_mlp}) {
        if (to_string(m) == key) return m;
    }
    if (key == "se") return TeacherMethod::spectral;
    if (key == "t_sne") return TeacherMethod::tsne;
    return std::nullopt;
}

bool is_supervised(TeacherMethod m) { return m == TeacherMethod::supervised_mlp; }

namespace {

void require_dim(std::size_t dim, std::size_t limit, const char* what) {
    if (dim < 1 || dim >= limit) {
        throw InvalidInput(std::string(what) + ": embedding dimension must lie in [1, " + std::to_string(limit) +
                           ")");
    }
}

Embedding make_embedding(Matrix y, TeacherMethod method, std::size_t dim) {
    Embedding e;
    e.y = std::move(y);
    e.spec.method = method;
    e.spec.dim = dim;
    return e;
}

}  // namespace

Embedding fit_pca(const Matrix& x, std::size_t dim) {
    require_dim(dim, std::min(x.rows(), x.cols()), "fit_pca");
    const Matrix xc = center_columns(x);
    Matrix y(x.rows(), dim);
    if (x.cols() <= x.rows()) {
        Matrix cov = matmul_tn(xc, xc);
        for (double& v : cov.values()) v /= static_cast<double>(x.rows());
        const EigenResult eig = sym_eig(cov, dim, EigenEnd::largest);
        y = matmul(xc, eig.vectors);
    } else {
        // Wide data: eigenvectors of the Gram matrix give the scores directly.
        const EigenResult eig = sym_eig(matmul_nt(xc, xc), dim, EigenEnd::largest);
        for (std::size_t c = 0; c < dim; ++c) {
            const double s = std::sqrt(std::max(eig.values[c], 0.0));
            for (std::size_t i = 0; i < x.rows(); ++i) y(i, c) = eig.vectors(i, c) * s;
        }
    }
    return make_embedding(std::move(y), TeacherMethod::pca, dim);
}

Matrix classical_mds(const DistanceMatrix& dsq, std::size_t dim) {
    const std::size_t n = dsq.size();
    require_dim(dim, n, "classical_mds");
    const Matrix b = double_center(dsq);
    const EigenResult eig = sym_eig(b, dim, EigenEnd::largest);
    Matrix y(n, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        double lambda = eig.values[c];
        if (lambda < 0.0) {
            log::warn("classical MDS: eigenvalue " + std::to_string(lambda) + " of component " + std::to_string(c) +
                      " clamped to 0 (dissimilarities are not Euclidean)");
            lambda = 0.0;
        }
        const double s = std::sqrt(lambda);
        for (std::size_t i = 0; i < n; ++i) y(i, c) = eig.vectors(i, c) * s;
    }
    return y;
}

Embedding fit_mds(const Matrix& x, std::size_t dim) {
    return make_embedding(classical_mds(pairwise_sq_distances(x), dim), TeacherMethod::mds, dim);
}

Embedding fit_isomap(const Matrix& x, std::size_t dim, std::size_t neighbors) {
    const NeighborGraph g = knn_graph(x, neighbors, true);
    const DistanceMatrix geo = shortest_paths(g);
    Matrix sq = geo.matrix();
    for (double& v : sq.values()) v *= v;
    Embedding e = make_embedding(classical_mds(DistanceMatrix::from_matrix(std::move(sq)), dim),
                                 TeacherMethod::isomap, dim);
    e.spec.neighbors = neighbors;
    return e;
}

LleWeights lle_weights(const Matrix& x, std::size_t neighbors, double reg) {
    if (reg < 0.0) throw InvalidInput("lle: reg must be >= 0");
    const NeighborGraph g = knn_graph(x, neighbors, false);
    const std::size_t n = x.rows();
    const std::size_t k = neighbors;
    LleWeights out{std::vector<std::vector<std::size_t>>(n), Matrix(n, k)};
    Matrix diff(k, x.cols());
    for (std::size_t i = 0; i < n; ++i) {
        const auto nbrs = g.neighbors(i);
        for (std::size_t a = 0; a < k; ++a) {
            out.neighbors[i].push_back(nbrs[a].to);
            for (std::size_t c = 0; c < x.cols(); ++c) diff(a, c) = x(nbrs[a].to, c) - x(i, c);
        }
        Matrix gram = matmul_nt(diff, diff);
        double trace = 0.0;
        for (std::size_t a = 0; a < k; ++a) trace += gram(a, a);
        const double shift = reg * trace / static_cast<double>(k);
        for (std::size_t a = 0; a < k; ++a) gram(a, a) += shift;
        Matrix w;
        try {
            w = cholesky_solve(gram, Matrix(k, 1, 1.0));
        } catch (const NumericalError&) {
            throw NumericalError("lle: local Gram matrix of point " + std::to_string(i) +
                                 " is singular; use a regularization reg > 0");
        }
        double sum = 0.0;
        for (double v : w.values()) sum += v;
        if (sum == 0.0 || !std::isfinite(sum))
            throw NumericalError("lle: degenerate reconstruction weights at point " + std::to_string(i));
        for (std::size_t a = 0; a < k; ++a) out.weights(i, a) = w(a, 0) / sum;
    }
    return out;
}

Matrix lle_embedding_matrix(const LleWeights& w) {
    const std::size_t n = w.weights.rows();
    Matrix iw = Matrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < w.neighbors[i].size(); ++a) iw(i, w.neighbors[i][a]) -= w.weights(i, a);
    return matmul_tn(iw, iw);
}

Embedding fit_lle(const Matrix& x, std::size_t dim, std::size_t neighbors, double reg) {
    const std::size_t n = x.rows();
    require_dim(dim, n - 1, "fit_lle");
    if (neighbors < dim) throw InvalidInput("fit_lle: neighbors must be >= embedding dimension");
    const Matrix m = lle_embedding_matrix(lle_weights(x, neighbors, reg));
    const EigenResult eig = sym_eig(m, dim + 1, EigenEnd::smallest);
    Matrix y(n, dim);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < dim; ++c) y(i, c) = eig.vectors(i, c + 1);
    Embedding e = make_embedding(std::move(y), TeacherMethod::lle, dim);
    e.spec.neighbors = neighbors;
    e.spec.lle_reg = reg;
    return e;
}

double heat_kernel_width(const NeighborGraph& g, std::optional<double> t) {
    if (t && *t > 0.0) return *t;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const Edge& e : g.neighbors(i)) {
            sum += e.weight * e.weight;
            ++count;
        }
    const double width = count ? sum / static_cast<double>(count) : 0.0;
    return width > 0.0 ? width : 1.0;
}

Matrix heat_kernel_weights(const NeighborGraph& g, std::optional<double> t) {
    if (!g.symmetric()) throw InvalidInput("heat_kernel_weights: graph must be symmetrized");
    const double width = heat_kernel_width(g, t);
    Matrix w(g.size(), g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const Edge& e : g.neighbors(i)) w(i, e.to) = std::exp(-(e.weight * e.weight) / width);
    return w;
}

Embedding fit_spectral(const Matrix& x, std::size_t dim, std::size_t neighbors, std::optional<double> heat_t) {
    const std::size_t n = x.rows();
    require_dim(dim, n - 1, "fit_spectral");
    const NeighborGraph g = knn_graph(x, neighbors, true);
    if (const std::size_t comps = g.component_count(); comps > 1) throw ConnectivityError(comps);
    const Matrix w = heat_kernel_weights(g, heat_t);

    Vector degree(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) degree[i] += w(i, j);
    Vector inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(degree[i] > 0.0)) throw NumericalError("fit_spectral: node " + std::to_string(i) + " has zero degree");
        inv_sqrt[i] = 1.0 / std::sqrt(degree[i]);
    }
    // L v = lambda D v  <=>  (I - D^-1/2 W D^-1/2) u = lambda u with v = D^-1/2 u.
    Matrix lsym(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            lsym(i, j) = (i == j ? 1.0 : 0.0) - inv_sqrt[i] * w(i, j) * inv_sqrt[j];
    const EigenResult eig = sym_eig(lsym, dim + 1, EigenEnd::smallest);
    Matrix y(n, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            y(i, c) = eig.vectors(i, c + 1) * inv_sqrt[i];
            norm += y(i, c) * y(i, c);
        }
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < n; ++i) y(i, c) /= norm;
    }
    Embedding e = make_embedding(std::move(y), TeacherMethod::spectral, dim);
    e.spec.neighbors = neighbors;
    e.spec.heat_t = heat_t;
    return e;
}

namespace {

std::size_t dead_columns(const Matrix& y) {
    std::size_t dead = 0;
    for (std::size_t j = 0; j < y.cols(); ++j) {
        bool constant = true;
        for (std::size_t i = 1; i < y.rows() && constant; ++i) constant = y(i, j) == y(0, j);
        dead += constant;
    }
    return dead;
}

}  // namespace

Embedding fit_supervised_mlp(const Dataset& ds, std::size_t dim, const MlpTeacherParams& params, std::uint64_t seed) {
    if (!ds.labels) throw InvalidInput("supervised teacher needs labels");
    const std::size_t classes = ds.classes();
    if (classes < 2) throw InvalidInput("supervised teacher needs at least two classes");
    require_dim(dim, ds.d(), "fit_supervised_mlp");

    std::vector<std::size_t> sizes{ds.d()};
    sizes.insert(sizes.end(), params.hidden.begin(), params.hidden.end());
    sizes.push_back(dim);
    sizes.push_back(classes);
    const Matrix target = one_hot(*ds.labels, classes);

    // A code unit that is zero on every sample carries nothing. Draws whose code layer starts
    // out dead are skipped untrained; a unit that dies during training costs a retrain.
    constexpr std::size_t kDraws = 64;
    Embedding e;
    for (std::size_t draw = 0; draw < kDraws; ++draw) {
        const std::uint64_t s = seed + draw * 0x9E3779B97F4A7C15ULL;
        DenseNet net(sizes, OutputActivation::softmax, s);
        const bool last = draw + 1 == kDraws;
        if (!last && dead_columns(forward(net, ds.x).inputs.back()) > 0) continue;
        TrainConfig cfg{params.epochs, params.batch_size, params.learning_rate, s, true};
        e.loss_history = train(net, ds.x, target, Loss::softmax_ce, nullptr, cfg);
        e.y = forward(net, ds.x).inputs.back();
        if (dead_columns(e.y) == 0) break;
        log::warn("fit_supervised_mlp: a code unit died in training with seed " + std::to_string(s) +
                  (last ? ", keeping this fit" : ", retrying"));
    }
    e.spec.method = TeacherMethod::supervised_mlp;
    e.spec.dim = dim;
    e.spec.mlp = params;
    e.spec.seed = seed;
    return e;
}

Embedding fit_teacher(const Dataset& ds, const TeacherSpec& spec) {
    Embedding e;
    switch (spec.method) {
        case TeacherMethod::pca: e = fit_pca(ds.x, spec.dim); break;
        case TeacherMethod::mds: e = fit_mds(ds.x, spec.dim); break;
        case TeacherMethod::isomap: e = fit_isomap(ds.x, spec.dim, spec.neighbors); break;
        case TeacherMethod::lle: e = fit_lle(ds.x, spec.dim, spec.neighbors, spec.lle_reg); break;
        case TeacherMethod::spectral: e = fit_spectral(ds.x, spec.dim, spec.neighbors, spec.heat_t); break;
        case TeacherMethod::tsne: {
            TsneParams p = spec.tsne;
            p.seed = spec.seed;
            e = fit_tsne(ds.x, spec.dim, p);
            break;
        }
        case TeacherMethod::supervised_mlp: e = fit_supervised_mlp(ds, spec.dim, spec.mlp, spec.seed); break;
    }
    const std::optional<double> resolved = e.spec.tsne.perplexity;
    e.spec = spec;
    if (spec.method == TeacherMethod::tsne) e.spec.tsne.perplexity = resolved;
    if (!e.y.all_finite()) throw NumericalError("teacher produced a non-finite embedding");
    return e;
}

}  // namespace tsfs
