#include <atomic>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cli/common.hpp"
#include "tsfs/cli.hpp"
#include "tsfs/errors.hpp"
#include "tsfs/evaluation.hpp"
#include "tsfs/serialize.hpp"

namespace tsfs::cli {

namespace {

using nlohmann::json;

/// Computes each key once; concurrent requests for a key wait on the same result.
template <class Key, class Value>
class OnceCache {
public:
    Value get(const Key& key, const std::function<Value()>& make) {
        std::shared_future<Value> fut;
        std::promise<Value> promise;
        bool owner = false;
        {
            std::lock_guard lock(mutex_);
            auto it = entries_.find(key);
            if (it == entries_.end()) {
                fut = promise.get_future().share();
                entries_.emplace(key, fut);
                owner = true;
                ++fits_;
            } else {
                fut = it->second;
                ++hits_;
            }
        }
        if (owner) {
            try {
                promise.set_value(make());
            } catch (...) {
                promise.set_exception(std::current_exception());
            }
        }
        return fut.get();
    }

    std::size_t fits() const { return fits_; }
    std::size_t hits() const { return hits_; }

private:
    std::mutex mutex_;
    std::map<Key, std::shared_future<Value>> entries_;
    std::atomic<std::size_t> fits_{0};
    std::atomic<std::size_t> hits_{0};
};

// Flat JSON object or key=value lines ('#' starts a comment).
json read_config(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            json j = json::parse(text);
            for (const auto& [k, v] : j.items())
                if (v.is_object()) throw UsageError("config key '" + k + "': nested objects are not supported");
            return j;
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("benchmark config: ") + e.what());
        }
    }
    json j = json::object();
    std::istringstream in(text);
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("benchmark config: expected key=value", row);
        auto trim = [](std::string s) {
            const auto lo = s.find_first_not_of(" \t\r");
            const auto hi = s.find_last_not_of(" \t\r");
            return lo == std::string::npos ? std::string{} : s.substr(lo, hi - lo + 1);
        };
        j[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return j;
}

class Config {
public:
    explicit Config(json j) : j_(std::move(j)) {}

    bool has(const std::string& k) {
        used_.insert(k);
        return j_.contains(k);
    }
    std::string str(const std::string& k, const std::string& def) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if (v.is_string()) return v.get<std::string>();
        if (v.is_number() || v.is_boolean()) return v.dump();
        throw UsageError("config key '" + k + "' must be a scalar");
    }
    double real(const std::string& k, double def) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        return v.is_number() ? v.get<double>() : parse_real(str(k, ""), "config key '" + k + "'");
    }
    std::size_t count(const std::string& k, std::size_t def) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if (v.is_number_unsigned()) return v.get<std::size_t>();
        return static_cast<std::size_t>(parse_seed(str(k, ""), "config key '" + k + "'"));
    }
    bool flag(const std::string& k, bool def) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if (v.is_boolean()) return v.get<bool>();
        const std::string s = str(k, "");
        if (s == "true" || s == "1" || s == "yes") return true;
        if (s == "false" || s == "0" || s == "no") return false;
        throw UsageError("config key '" + k + "' must be true or false");
    }
    std::vector<std::string> list(const std::string& k, const std::vector<std::string>& def) {
        if (!has(k)) return def;
        const json& v = j_.at(k);
        if (!v.is_array()) return split_list(str(k, ""));
        std::vector<std::string> out;
        for (const auto& e : v) out.push_back(e.is_string() ? e.get<std::string>() : e.dump());
        return out;
    }
    void reject_unknown() const {
        for (const auto& [k, v] : j_.items())
            if (!used_.contains(k)) throw UsageError("unknown config key '" + k + "'");
    }

private:
    json j_;
    std::set<std::string> used_;
};

struct MethodEntry {
    std::string label;  // as written in the config
    MethodConfig cfg;
};

struct Cell {
    std::size_t method = 0;
    double percent = 0.0;
    std::uint64_t seed = 0;
};

struct CellOutcome {
    MetricReport report;
    std::string error;
    int code = ok;
};

std::string key_of(const TeacherSpec& t) {
    return to_string(t.method) + "/" + std::to_string(t.dim) + "/" + std::to_string(t.neighbors) + "/" +
           format_double(t.lle_reg) + "/" + (t.heat_t ? format_double(*t.heat_t) : "auto") + "/" +
           (t.tsne.perplexity ? format_double(*t.tsne.perplexity) : "auto") + "/" + std::to_string(t.tsne.iterations);
}

std::string csv_escape(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

int cmd_benchmark(const std::string& config_path, const std::string& out_flag, std::size_t workers, Stage& stage) {
    stage.name = "config";
    Config cfg(read_config(config_path));

    DatasetFlags data;
    if (!cfg.has("input")) throw UsageError("benchmark config needs 'input'");
    data.input = cfg.str("input", "");
    // Relative data paths are relative to the config file.
    if (std::filesystem::path(data.input).is_relative())
        data.input = (std::filesystem::path(config_path).parent_path() / data.input).string();
    data.format = cfg.str("format", "csv");
    data.header = cfg.flag("header", false);
    data.label_column = cfg.str("label_column", "");
    data.labels_file = cfg.str("labels", "");
    if (!data.labels_file.empty() && std::filesystem::path(data.labels_file).is_relative())
        data.labels_file = (std::filesystem::path(config_path).parent_path() / data.labels_file).string();
    data.scale = cfg.str("scale", "none");
    data.name = cfg.str("name", "");
    if (data.format != "csv" && data.format != "whitespace")
        throw UsageError("config key 'format' must be csv or whitespace");
    if (data.scale != "none" && data.scale != "minmax" && data.scale != "standardize")
        throw UsageError("config key 'scale' must be none, minmax or standardize");

    MethodConfig base;
    base.teacher.method = teacher_or_usage(cfg.str("teacher", "tsne"));
    base.teacher.dim = cfg.count("embed_dim", base.teacher.dim);
    base.teacher.neighbors = cfg.count("neighbors", base.teacher.neighbors);
    base.teacher.lle_reg = cfg.real("lle_reg", base.teacher.lle_reg);
    if (cfg.has("heat_t")) base.teacher.heat_t = cfg.real("heat_t", 0.0);
    if (cfg.has("perplexity")) base.teacher.tsne.perplexity = cfg.real("perplexity", 30.0);
    base.teacher.tsne.iterations = cfg.count("tsne_iters", base.teacher.tsne.iterations);
    base.student.lambda = cfg.real("lambda", base.student.lambda);
    base.student.hidden = cfg.count("hidden", base.student.hidden);
    base.student.epochs = cfg.count("epochs", base.student.epochs);
    base.student.batch_size = cfg.count("batch", base.student.batch_size);
    base.student.learning_rate = cfg.real("lr", base.student.learning_rate);
    base.ls_neighbors = cfg.count("ls_neighbors", base.ls_neighbors);
    if (cfg.has("rsr_lambda")) base.rsr.lambda = cfg.real("rsr_lambda", 0.0);
    base.rsr.max_iters = cfg.count("rsr_iters", base.rsr.max_iters);
    base.aefs.lambda = cfg.real("aefs_lambda", base.aefs.lambda);
    base.aefs.beta = cfg.real("aefs_beta", base.aefs.beta);
    base.aefs.hidden = cfg.count("aefs_hidden", base.aefs.hidden);
    base.aefs.train.epochs = cfg.count("aefs_epochs", base.aefs.train.epochs);

    std::vector<MethodEntry> methods;
    for (const auto& label : cfg.list("methods", {"tsfs"})) {
        MethodEntry e{label, base};
        const auto colon = label.find(':');
        e.cfg.method = canonical_method(label.substr(0, colon));
        if (colon != std::string::npos) {
            if (e.cfg.method != "tsfs") throw UsageError("method '" + label + "': only tsfs takes a teacher");
            e.cfg.teacher.method = teacher_or_usage(label.substr(colon + 1));
        }
        methods.push_back(std::move(e));
    }
    std::vector<double> percents;
    for (const auto& p : cfg.list("percentages", {"2", "5", "10", "20", "30", "40", "50"})) {
        const double v = parse_real(p, "config key 'percentages'");
        if (!(v > 0.0) || v > 100.0) throw UsageError("percentages must lie in (0, 100]");
        percents.push_back(v);
    }
    std::vector<std::uint64_t> seeds;
    for (const auto& s : cfg.list("seeds", {"0"})) seeds.push_back(parse_seed(s, "config key 'seeds'"));
    if (methods.empty() || percents.empty() || seeds.empty())
        throw UsageError("methods, percentages and seeds must be non-empty");

    const std::string metrics = cfg.str("metrics", "auto");
    const std::size_t runs = cfg.count("runs", 20);
    CvConfig clf = classification_defaults();
    CvConfig rec = reconstruction_defaults();
    clf.folds = rec.folds = cfg.count("folds", 5);
    clf.epochs = rec.epochs = cfg.count("eval_epochs", 200);
    cfg.reject_unknown();

    stage.name = "load";
    const Dataset ds = load_dataset(data);
    bool want_clu = false, want_clf = false, want_rec = false;
    if (metrics == "auto") {
        want_clu = want_clf = ds.has_labels();
        want_rec = true;
    } else {
        for (const auto& m : split_list(metrics)) {
            if (m == "clustering" || m == "all") want_clu = true;
            if (m == "classification" || m == "all") want_clf = true;
            if (m == "reconstruction" || m == "all") want_rec = true;
            if (m != "clustering" && m != "classification" && m != "reconstruction" && m != "all")
                throw UsageError("unknown metric '" + m + "'");
        }
        if ((want_clu || want_clf) && !ds.has_labels())
            throw UsageError("clustering and classification need labels (label_column or labels)");
    }
    for (const auto& m : methods)
        if (m.cfg.method == "tsfs" && is_supervised(m.cfg.teacher.method) && !ds.has_labels())
            throw UsageError("method '" + m.label + "' needs labels (label_column or labels)");

    std::vector<Cell> cells;
    for (std::size_t mi = 0; mi < methods.size(); ++mi)
        for (double p : percents)
            for (std::uint64_t s : seeds) cells.push_back({mi, p, s});

    OnceCache<std::pair<std::string, std::uint64_t>, std::shared_ptr<const Embedding>> teachers;
    OnceCache<std::pair<std::size_t, std::uint64_t>, std::shared_ptr<const SelectionResult>> rankings;

    auto run_cell = [&](const Cell& c) {
        CellOutcome out;
        const MethodEntry& me = methods[c.method];
        out.report.dataset = ds.name;
        out.report.method = me.cfg.method;
        out.report.teacher = me.cfg.method == "tsfs" ? to_string(me.cfg.teacher.method) : "";
        out.report.percent = c.percent;
        out.report.seed = c.seed;
        try {
            auto ranking = rankings.get({c.method, c.seed}, [&] {
                std::shared_ptr<const Embedding> emb;
                if (me.cfg.method == "tsfs") {
                    const TeacherSpec spec = seeded_teacher(me.cfg, c.seed);
                    emb = teachers.get({key_of(spec), c.seed},
                                       [&] { return std::make_shared<const Embedding>(fit_teacher(ds, spec)); });
                }
                return std::make_shared<const SelectionResult>(rank_features_with(ds, me.cfg, c.seed, emb.get()));
            });
            SelectionResult s = *ranking;
            apply_percent(s, c.percent);
            out.report.m = s.m;
            const Matrix xs = ds.x.select_cols(s.selected);
            if (want_clu) out.report.clustering = clustering_eval(xs, *ds.labels, ds.classes(), runs, c.seed);
            if (want_clf) out.report.classification = classify_cv(xs, *ds.labels, c.seed, clf);
            if (want_rec) out.report.reconstruction = reconstruct_cv(xs, ds.x, c.seed, rec);
        } catch (const NumericalError& e) {
            out.error = e.what();
            out.code = numerical;
        } catch (const std::exception& e) {
            out.error = e.what();
            out.code = ExitCode::data;
        }
        return out;
    };

    stage.name = "cells";
    std::vector<CellOutcome> outcomes(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) outcomes[i] = run_cell(cells[i]);
    };
    const std::size_t threads = std::min(workers, cells.size());
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    // Rows are emitted in cell order by this thread only.
    stage.name = "write";
    std::string header = metrics_csv_header();
    header.back() = ',';
    std::string results = header + "error\n";
    std::size_t failed = 0;
    int fail_code = ok;
    for (const auto& o : outcomes) {
        std::string row = metrics_csv_row(o.report);
        row.back() = ',';
        results += row + (o.error.empty() ? "" : csv_escape(o.error)) + "\n";
        if (!o.error.empty()) {
            ++failed;
            fail_code = std::max(fail_code, o.code);
        }
    }

    std::string summary = "method,teacher,p,acc,nmi,clf_acc,mse,cells_ok\n";
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        for (double p : percents) {
            double acc = 0, nmi_sum = 0, clf_acc = 0, mse = 0;
            std::size_t good = 0;
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (cells[i].method != mi || cells[i].percent != p || !outcomes[i].error.empty()) continue;
                const MetricReport& r = outcomes[i].report;
                ++good;
                if (r.clustering) acc += r.clustering->acc_mean, nmi_sum += r.clustering->nmi_mean;
                if (r.classification) clf_acc += r.classification->mean;
                if (r.reconstruction) mse += r.reconstruction->mean;
            }
            auto cell = [&](bool present, double sum) {
                return present && good ? format_double(sum / static_cast<double>(good)) : std::string{};
            };
            const MethodConfig& mc = methods[mi].cfg;
            summary += mc.method + "," + (mc.method == "tsfs" ? to_string(mc.teacher.method) : "") + "," +
                       format_double(p) + "," + cell(want_clu, acc) + "," + cell(want_clu, nmi_sum) + "," +
                       cell(want_clf, clf_acc) + "," + cell(want_rec, mse) + "," + std::to_string(good) + "\n";
        }
    }

    json stats = {{"cells", cells.size()},
                  {"failed", failed},
                  {"teacher_fits", teachers.fits()},
                  {"teacher_hits", teachers.hits()},
                  {"ranking_fits", rankings.fits()},
                  {"ranking_hits", rankings.hits()}};

    const auto dir = output_dir(out_flag);
    write_text(dir / "results.csv", results);
    write_text(dir / "summary.csv", summary);
    write_text(dir / "cache_stats.json", stats.dump(2) + "\n");

    std::cout << "benchmark: " << cells.size() << " cells, " << failed << " failed\n";
    std::cout << "teacher cache: " << teachers.fits() << " fits, " << teachers.hits() << " hits\n";
    std::cout << "ranking cache: " << rankings.fits() << " fits, " << rankings.hits() << " hits\n";
    std::cout << summary;
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        if (!outcomes[i].error.empty())
            std::cerr << "cell " << i << " (" << methods[cells[i].method].label << ", p=" << format_double(cells[i].percent)
                      << ", seed " << cells[i].seed << ") failed: " << outcomes[i].error << "\n";
    if (failed == cells.size()) return fail_code;
    return ok;
}

}  // namespace tsfs::cli
