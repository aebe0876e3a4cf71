#include "tsfs/datasets.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "tsfs/errors.hpp"

namespace tsfs {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("empty file " + path.string());
    return lines;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> split_whitespace(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        const std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

bool parse_real(std::string_view cell, double& out) {
    if (cell.empty()) return false;
    if (cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
    return ec == std::errc() && ptr == cell.data() + cell.size() && std::isfinite(out);
}

std::vector<int> map_labels(const std::vector<std::string>& raw, std::vector<std::string>& names) {
    std::map<std::string, int> ids;
    std::vector<int> labels;
    labels.reserve(raw.size());
    for (const auto& s : raw) {
        auto [it, inserted] = ids.emplace(s, static_cast<int>(ids.size()));
        if (inserted) names.push_back(s);
        labels.push_back(it->second);
    }
    return labels;
}

}  // namespace

std::size_t Dataset::classes() const {
    if (!labels || labels->empty()) return 0;
    return static_cast<std::size_t>(*std::max_element(labels->begin(), labels->end())) + 1;
}

void Dataset::validate() const {
    if (n() < 2 || d() < 2) throw InvalidInput("dataset needs at least 2 samples and 2 features");
    if (!feature_names.empty() && feature_names.size() != d())
        throw InvalidInput("feature name count does not match feature count");
    if (labels) {
        if (labels->size() != n()) throw InvalidInput("label count does not match sample count");
        std::vector<bool> seen(classes(), false);
        for (int y : *labels) {
            if (y < 0) throw InvalidInput("labels must be non-negative");
            seen[static_cast<std::size_t>(y)] = true;
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            throw InvalidInput("every class in [0, classes) must occur at least once");
    }
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    const auto lines = read_lines(path);
    std::size_t first = 0;
    std::vector<std::string> header;
    if (options.has_header) {
        for (auto cell : split(lines[0], ',')) header.emplace_back(cell);
        first = 1;
        if (lines.size() == 1) throw ParseError("file has a header but no data rows", 1);
    }
    const std::size_t width = split(lines[first], ',').size();

    std::optional<std::size_t> label_col;
    if (options.label_column) {
        const std::string& spec = *options.label_column;
        if (auto it = std::find(header.begin(), header.end(), spec); it != header.end()) {
            label_col = static_cast<std::size_t>(it - header.begin());
        } else {
            std::size_t idx = 0;
            const auto [ptr, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), idx);
            if (ec != std::errc() || ptr != spec.data() + spec.size())
                throw ParseError("label column '" + spec + "' not found");
            label_col = idx;
        }
        if (*label_col >= width) throw ParseError("label column index out of range");
    }
    const std::size_t d = width - (label_col ? 1 : 0);
    if (d == 0) throw ParseError("no feature columns", first + 1);

    std::vector<double> values;
    std::vector<std::string> raw_labels;
    for (std::size_t r = first; r < lines.size(); ++r) {
        const auto cells = split(lines[r], ',');
        if (cells.size() != width) {
            throw ParseError("ragged row: expected " + std::to_string(width) + " cells, found " +
                                 std::to_string(cells.size()),
                             r + 1);
        }
        for (std::size_t c = 0; c < width; ++c) {
            if (label_col && c == *label_col) {
                raw_labels.emplace_back(cells[c]);
                continue;
            }
            double v = 0.0;
            if (!parse_real(cells[c], v))
                throw ParseError("unparsable cell '" + std::string(cells[c]) + "'", r + 1, c + 1);
            values.push_back(v);
        }
    }

    Dataset ds;
    const std::size_t n = lines.size() - first;
    ds.x = Matrix(n, d, std::move(values));
    ds.name = path.stem().string();
    if (!header.empty()) {
        for (std::size_t c = 0; c < width; ++c)
            if (!label_col || c != *label_col) ds.feature_names.push_back(header[c]);
    }
    if (label_col) ds.labels = map_labels(raw_labels, ds.class_names);
    ds.validate();
    return ds;
}

Dataset load_whitespace(const std::filesystem::path& matrix_path,
                        const std::optional<std::filesystem::path>& labels_path) {
    const auto lines = read_lines(matrix_path);
    std::vector<double> values;
    std::size_t width = 0;
    std::size_t n = 0;
    for (std::size_t r = 0; r < lines.size(); ++r) {
        const auto cells = split_whitespace(lines[r]);
        if (cells.empty()) continue;
        if (n == 0) width = cells.size();
        if (cells.size() != width) throw ParseError("ragged row", r + 1);
        for (std::size_t c = 0; c < width; ++c) {
            double v = 0.0;
            if (!parse_real(cells[c], v))
                throw ParseError("unparsable cell '" + std::string(cells[c]) + "'", r + 1, c + 1);
            values.push_back(v);
        }
        ++n;
    }
    Dataset ds;
    ds.x = Matrix(n, width, std::move(values));
    ds.name = matrix_path.stem().string();
    if (labels_path) {
        std::vector<std::string> raw;
        for (const auto& line : read_lines(*labels_path)) {
            const auto t = trim(line);
            if (!t.empty()) raw.emplace_back(t);
        }
        if (raw.size() != n) throw ParseError("label file has " + std::to_string(raw.size()) + " labels for " +
                                              std::to_string(n) + " samples");
        ds.labels = map_labels(raw, ds.class_names);
    }
    ds.validate();
    return ds;
}

void write_matrix_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out.precision(17);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
}

void write_csv(const std::filesystem::path& path, const Dataset& ds) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    out.precision(17);
    for (std::size_t j = 0; j < ds.d(); ++j) {
        if (j) out << ',';
        out << (ds.feature_names.empty() ? "f" + std::to_string(j) : ds.feature_names[j]);
    }
    if (ds.labels) out << ",label";
    out << '\n';
    for (std::size_t i = 0; i < ds.n(); ++i) {
        for (std::size_t j = 0; j < ds.d(); ++j) {
            if (j) out << ',';
            out << ds.x(i, j);
        }
        if (ds.labels) {
            const int y = (*ds.labels)[i];
            out << ',' << (ds.class_names.empty() ? std::to_string(y) : ds.class_names[static_cast<std::size_t>(y)]);
        }
        out << '\n';
    }
}

Dataset minmax_scale(const Dataset& ds) {
    Dataset out = ds;
    for (std::size_t j = 0; j < ds.d(); ++j) {
        double lo = ds.x(0, j), hi = ds.x(0, j);
        for (std::size_t i = 1; i < ds.n(); ++i) {
            lo = std::min(lo, ds.x(i, j));
            hi = std::max(hi, ds.x(i, j));
        }
        const double range = hi - lo;
        for (std::size_t i = 0; i < ds.n(); ++i) out.x(i, j) = range > 0.0 ? (ds.x(i, j) - lo) / range : 0.0;
    }
    return out;
}

Dataset standardize(const Dataset& ds) {
    Dataset out = ds;
    const Vector mean = column_means(ds.x);
    for (std::size_t j = 0; j < ds.d(); ++j) {
        double var = 0.0;
        for (std::size_t i = 0; i < ds.n(); ++i) var += (ds.x(i, j) - mean[j]) * (ds.x(i, j) - mean[j]);
        const double sd = std::sqrt(var / static_cast<double>(ds.n()));
        for (std::size_t i = 0; i < ds.n(); ++i) out.x(i, j) = sd > 0.0 ? (ds.x(i, j) - mean[j]) / sd : 0.0;
    }
    return out;
}

Dataset stratified_subsample(const Dataset& ds, std::size_t per_class, std::uint64_t seed) {
    if (!ds.labels) throw InvalidInput("stratified_subsample needs labels");
    if (per_class == 0) throw InvalidInput("per_class must be positive");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> by_class(ds.classes());
    for (std::size_t i = 0; i < ds.n(); ++i) by_class[static_cast<std::size_t>((*ds.labels)[i])].push_back(i);
    std::vector<std::size_t> keep;
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        members.resize(std::min(per_class, members.size()));
        keep.insert(keep.end(), members.begin(), members.end());
    }
    std::sort(keep.begin(), keep.end());
    Dataset out;
    out.x = ds.x.select_rows(keep);
    std::vector<int> labels;
    for (std::size_t i : keep) labels.push_back((*ds.labels)[i]);
    out.labels = std::move(labels);
    out.feature_names = ds.feature_names;
    out.class_names = ds.class_names;
    out.name = ds.name;
    out.validate();
    return out;
}

std::vector<std::size_t> FoldPlan::test_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (assignment[i] == fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::train_indices(std::size_t fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < n; ++i)
        if (assignment[i] != fold) out.push_back(i);
    return out;
}

std::vector<std::size_t> FoldPlan::fold_sizes() const {
    std::vector<std::size_t> sizes(folds, 0);
    for (std::size_t f : assignment) ++sizes[f];
    return sizes;
}

FoldPlan kfold(std::size_t n, std::size_t folds, std::uint64_t seed) {
    if (folds < 2 || folds > n) {
        throw InvalidInput("kfold: need 2 <= folds <= n (folds=" + std::to_string(folds) + ", n=" +
                           std::to_string(n) + ")");
    }
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    FoldPlan plan{n, folds, std::vector<std::size_t>(n), seed};
    for (std::size_t pos = 0; pos < n; ++pos) plan.assignment[perm[pos]] = pos % folds;
    return plan;
}

FoldPlan stratified_kfold(const std::vector<int>& labels, std::size_t folds, std::uint64_t seed) {
    const std::size_t n = labels.size();
    if (folds < 2 || folds > n) throw InvalidInput("stratified_kfold: need 2 <= folds <= n");
    int max_label = 0;
    for (int y : labels) {
        if (y < 0) throw InvalidInput("labels must be non-negative");
        max_label = std::max(max_label, y);
    }
    std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_label) + 1);
    for (std::size_t i = 0; i < n; ++i) by_class[static_cast<std::size_t>(labels[i])].push_back(i);
    std::mt19937_64 rng(seed);
    FoldPlan plan{n, folds, std::vector<std::size_t>(n), seed};
    std::size_t dealt = 0;
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t i : members) plan.assignment[i] = dealt++ % folds;
    }
    return plan;
}

namespace {

// Standard deviations of sin(g) and g^2 for g ~ N(0, 1).
const double kSinStd = std::sqrt((1.0 - std::exp(-2.0)) / 2.0);
const double kSquareStd = std::sqrt(2.0);

}  // namespace

PlantedData make_planted(const PlantedSpec& spec) {
    if (spec.n < 2 || spec.d < 2) throw InvalidInput("make_planted: need n >= 2 and d >= 2");
    if (spec.k_informative >= spec.d) throw InvalidInput("make_planted: k_informative must be < d");
    if (!(spec.noise_sigma >= 0.0)) throw InvalidInput("make_planted: noise_sigma must be >= 0");
    if (spec.classes < 1) throw InvalidInput("make_planted: classes must be >= 1");

    // Draw order is part of the contract: latent, subset, coefficients, then cells row-major.
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Matrix z(spec.n, 2);
    for (double& v : z.values()) v = normal(rng);

    std::vector<std::size_t> cols(spec.d);
    std::iota(cols.begin(), cols.end(), 0);
    std::shuffle(cols.begin(), cols.end(), rng);
    std::vector<std::size_t> informative(cols.begin(), cols.begin() + static_cast<std::ptrdiff_t>(spec.k_informative));
    std::sort(informative.begin(), informative.end());

    // Unit-norm directions evenly spread over a half-turn from a random phase, so no
    // informative column is a near-copy of another.
    std::vector<std::array<double, 2>> coef(spec.k_informative);
    const double phase = std::uniform_real_distribution<double>(0.0, 3.141592653589793)(rng);
    for (std::size_t t = 0; t < coef.size(); ++t) {
        const double angle = phase + 3.141592653589793 * static_cast<double>(t) / static_cast<double>(coef.size());
        coef[t] = {std::cos(angle), std::sin(angle)};
    }
    // slot[j] = ordinal of informative feature j, or -1 for noise.
    std::vector<long> slot(spec.d, -1);
    for (std::size_t t = 0; t < informative.size(); ++t) slot[informative[t]] = static_cast<long>(t);

    Matrix x(spec.n, spec.d);
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = 0; j < spec.d; ++j) {
            const double eps = normal(rng);
            if (slot[j] < 0) {
                x(i, j) = eps;
                continue;
            }
            const auto t = static_cast<std::size_t>(slot[j]);
            const double proj = coef[t][0] * z(i, 0) + coef[t][1] * z(i, 1);
            double signal = proj;
            if (spec.structure == PlantedStructure::nonlinear)
                signal = (t % 2 == 0) ? std::sin(proj) / kSinStd : (proj * proj - 1.0) / kSquareStd;
            x(i, j) = spec.signal_scale * signal + spec.noise_sigma * eps;
        }
    }

    std::vector<int> labels(spec.n);
    constexpr double two_pi = 6.283185307179586;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double angle = std::atan2(z(i, 1), z(i, 0)) + two_pi / 2.0;
        auto sector = static_cast<std::size_t>(angle / two_pi * static_cast<double>(spec.classes));
        labels[i] = static_cast<int>(std::min(sector, spec.classes - 1));
    }
    // Compact away empty sectors (possible for tiny n) in first-appearance order.
    std::map<int, int> remap;
    for (int& y : labels) {
        auto [it, inserted] = remap.emplace(y, static_cast<int>(remap.size()));
        y = it->second;
    }

    PlantedData out;
    out.dataset.x = std::move(x);
    out.dataset.labels = std::move(labels);
    out.dataset.name = "planted";
    out.informative = std::move(informative);
    out.latent = std::move(z);
    return out;
}

}  // namespace tsfs
