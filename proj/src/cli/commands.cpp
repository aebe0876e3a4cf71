#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>

#include "cli/common.hpp"
#include "tsfs/cli.hpp"
#include "tsfs/errors.hpp"
#include "tsfs/evaluation.hpp"
#include "tsfs/log.hpp"
#include "tsfs/serialize.hpp"

namespace tsfs::cli {

// ---------------------------------------------------------------- shared helpers

void add_dataset_flags(CLI::App& app, DatasetFlags& f) {
    app.add_option("--input", f.input, "Data file")->required();
    app.add_option("--format", f.format, "csv or whitespace")->check(CLI::IsMember({"csv", "whitespace"}));
    app.add_flag("--header", f.header, "First CSV row is a header");
    app.add_option("--label-column", f.label_column, "Label column: header name or 0-based index");
    app.add_option("--labels", f.labels_file, "Label file (whitespace format), one label per line");
    app.add_option("--scale", f.scale, "none, minmax or standardize")
        ->check(CLI::IsMember({"none", "minmax", "standardize"}));
    app.add_option("--name", f.name, "Dataset name recorded in reports");
}

Dataset load_dataset(const DatasetFlags& f) {
    Dataset ds;
    if (f.format == "csv") {
        if (!f.labels_file.empty()) throw UsageError("--labels applies to --format whitespace; use --label-column");
        CsvOptions opt;
        opt.has_header = f.header;
        if (!f.label_column.empty()) opt.label_column = f.label_column;
        ds = load_csv(f.input, opt);
    } else {
        if (!f.label_column.empty()) throw UsageError("--label-column applies to --format csv; use --labels");
        ds = load_whitespace(f.input, f.labels_file.empty() ? std::nullopt
                                                            : std::optional<std::filesystem::path>(f.labels_file));
    }
    ds.validate();
    if (f.scale == "minmax") ds = minmax_scale(ds);
    if (f.scale == "standardize") ds = standardize(ds);
    ds.name = f.name.empty() ? std::filesystem::path(f.input).stem().string() : f.name;
    return ds;
}

std::string canonical_method(const std::string& name) {
    std::string key = name;
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "laplacian" || key == "ls") key = "laplacian_score";
    for (const char* m : {"tsfs", "laplacian_score", "variance", "rsr", "aefs", "random"})
        if (key == m) return key;
    throw UsageError("unknown method '" + name + "' (tsfs, laplacian_score, variance, rsr, aefs, random)");
}

TeacherMethod teacher_or_usage(const std::string& name) {
    if (auto t = parse_teacher(name)) return *t;
    throw UsageError("unknown teacher '" + name + "' (pca, mds, isomap, lle, spectral, tsne, supervised-mlp)");
}

void add_method_flags(CLI::App& app, MethodConfig& cfg, std::optional<double>& perplexity) {
    app.add_option("--method", cfg.method, "tsfs, laplacian_score, variance, rsr, aefs or random");
    app.add_option_function<std::string>(
           "--teacher", [&cfg](const std::string& s) { cfg.teacher.method = teacher_or_usage(s); },
           "pca, mds, isomap, lle, spectral, tsne or supervised-mlp")
        ->default_str("tsne");
    app.add_option("--embed-dim", cfg.teacher.dim, "Teacher code dimension");
    app.add_option("--neighbors", cfg.teacher.neighbors, "Neighbours for isomap, lle, spectral");
    app.add_option("--lle-reg", cfg.teacher.lle_reg, "LLE regularization");
    app.add_option("--heat-t", cfg.teacher.heat_t, "Heat kernel width (default: mean squared edge length)");
    app.add_option("--perplexity", perplexity, "t-SNE perplexity");
    app.add_option("--tsne-iters", cfg.teacher.tsne.iterations, "t-SNE iterations");
    app.add_option("--lambda", cfg.student.lambda, "Student L2,1 weight");
    app.add_option("--hidden", cfg.student.hidden, "Student hidden units");
    app.add_option("--epochs", cfg.student.epochs, "Student epochs");
    app.add_option("--batch", cfg.student.batch_size, "Student batch size");
    app.add_option("--lr", cfg.student.learning_rate, "Student learning rate");
    app.add_option("--ls-neighbors", cfg.ls_neighbors, "Laplacian Score neighbours");
    app.add_option("--rsr-lambda", cfg.rsr.lambda, "RSR penalty weight (default: n / 2)");
    app.add_option("--rsr-iters", cfg.rsr.max_iters, "RSR iteration cap");
    app.add_option("--aefs-lambda", cfg.aefs.lambda, "AEFS L2,1 weight");
    app.add_option("--aefs-beta", cfg.aefs.beta, "AEFS weight decay");
    app.add_option("--aefs-hidden", cfg.aefs.hidden, "AEFS hidden units");
    app.add_option("--aefs-epochs", cfg.aefs.train.epochs, "AEFS epochs");
}

TeacherSpec seeded_teacher(const MethodConfig& cfg, std::uint64_t seed) {
    TeacherSpec t = cfg.teacher;
    t.seed = seed;
    return t;
}

SelectionResult rank_features_with(const Dataset& ds, const MethodConfig& cfg, std::uint64_t seed,
                                   const Embedding* embedding) {
    SelectionResult s;
    s.method = cfg.method;
    if (cfg.method == "tsfs") {
        StudentConfig sc = cfg.student;
        sc.seed = seed;
        std::optional<Embedding> own;
        if (!embedding) {
            const TeacherSpec spec = seeded_teacher(cfg, seed);
            if (is_supervised(spec.method) && !ds.has_labels())
                throw UsageError("teacher supervised_mlp needs labels (--label-column or --labels)");
            own = fit_teacher(ds, spec);
            embedding = &*own;
        }
        const StudentFit fit = train_student(ds.x, embedding->y, sc);
        s.scores = feature_scores(fit.model);
        s.teacher = to_string(embedding->spec.method);
        s.seeds["teacher"] = embedding->spec.seed;
        s.seeds["student"] = seed;
    } else {
        BaselineResult r;
        if (cfg.method == "variance") {
            r = variance_score(ds.x);
        } else if (cfg.method == "laplacian_score") {
            r = laplacian_score(ds.x, cfg.ls_neighbors, cfg.teacher.heat_t);
        } else if (cfg.method == "rsr") {
            r = rsr(ds.x, cfg.rsr);
        } else if (cfg.method == "aefs") {
            AefsOptions a = cfg.aefs;
            a.train.seed = seed;
            r = aefs(ds.x, a);
            s.seeds["aefs"] = seed;
        } else {
            r = random_scores(ds.d(), seed);
            s.seeds["random"] = seed;
        }
        s.scores = std::move(r.scores);
        s.higher_is_better = r.higher_is_better;
        s.ranking = std::move(r.ranking);
    }
    if (s.ranking.empty()) s.ranking = rank_features(s.scores, s.higher_is_better);
    return s;
}

std::filesystem::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("TSFS_OUT_DIR"); env && *env) return env;
    return "tsfs_out";
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) {
        const auto b = cur.find_first_not_of(" \t");
        const auto e = cur.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(cur.substr(b, e - b + 1));
    }
    return out;
}

double parse_real(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
        throw UsageError(what + ": '" + s + "' is not a number");
    return v;
}

std::uint64_t parse_seed(const std::string& s, const std::string& what) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw UsageError(what + ": '" + s + "' is not a non-negative integer");
    return v;
}

namespace {

void check_percent(double p) {
    if (!(p > 0.0) || p > 100.0) throw UsageError("--percent must lie in (0, 100]");
}

std::string feature_name(const Dataset& ds, std::size_t j) {
    return ds.feature_names.empty() ? "f" + std::to_string(j) : ds.feature_names[j];
}

void finish_method(MethodConfig& cfg, const std::optional<double>& perplexity) {
    cfg.method = canonical_method(cfg.method);
    if (perplexity) cfg.teacher.tsne.perplexity = *perplexity;
}

// ---------------------------------------------------------------- select

struct SelectArgs {
    DatasetFlags data;
    MethodConfig method;
    std::optional<double> perplexity;
    double percent = 10.0;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_select(SelectArgs& a, Stage& stage) {
    finish_method(a.method, a.perplexity);
    check_percent(a.percent);
    if (a.method.method == "tsfs" && is_supervised(a.method.teacher.method) && a.data.label_column.empty() &&
        a.data.labels_file.empty()) {
        throw UsageError("--teacher supervised-mlp requires --label-column (or --labels)");
    }
    stage.name = "load";
    const Dataset ds = load_dataset(a.data);
    stage.name = a.method.method == "tsfs" ? "teacher/student" : a.method.method;
    SelectionResult s = rank_features_with(ds, a.method, a.seed);
    apply_percent(s, a.percent);

    stage.name = "write";
    const auto dir = output_dir(a.out);
    write_text(dir / "selection.json", to_json(s));
    write_text(dir / "selected.txt", index_list(s.selected));

    std::cout << "method " << s.method << (s.teacher.empty() ? "" : " (teacher " + s.teacher + ")") << ", selected "
              << s.m << " of " << ds.d() << " features\n";
    std::cout << "rank  index  feature  score\n";
    for (std::size_t r = 0; r < std::min<std::size_t>(10, s.ranking.size()); ++r) {
        const std::size_t j = s.ranking[r];
        std::cout << r + 1 << "  " << j << "  " << feature_name(ds, j) << "  " << format_double(s.scores[j]) << "\n";
    }
    std::cout << "wrote " << (dir / "selection.json").string() << "\n";
    return ok;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    DatasetFlags data;
    std::string selection;
    std::string metrics = "auto";
    std::optional<double> percent;
    std::size_t runs = 20;
    std::size_t folds = 5;
    std::size_t epochs = 200;
    std::size_t batch = 32;
    std::size_t clf_hidden = 100;
    std::size_t rec_hidden = 10;
    std::uint64_t seed = 0;
    std::string out;
};

struct MetricSet {
    bool clustering = false;
    bool classification = false;
    bool reconstruction = false;
};

MetricSet parse_metrics(const std::string& spec, bool has_labels) {
    MetricSet m;
    if (spec == "auto") return {has_labels, has_labels, true};
    for (const auto& item : split_list(spec)) {
        if (item == "all") {
            m = {true, true, true};
        } else if (item == "clustering") {
            m.clustering = true;
        } else if (item == "classification") {
            m.classification = true;
        } else if (item == "reconstruction") {
            m.reconstruction = true;
        } else {
            throw UsageError("unknown metric '" + item + "' (clustering, classification, reconstruction)");
        }
    }
    if ((m.clustering || m.classification) && !has_labels)
        throw UsageError("clustering and classification need labels (--label-column or --labels)");
    return m;
}

int cmd_evaluate(EvaluateArgs& a, Stage& stage) {
    stage.name = "load";
    const Dataset ds = load_dataset(a.data);
    const MetricSet which = parse_metrics(a.metrics, ds.has_labels());
    stage.name = "read selection";
    SelectionResult s = selection_from_json(read_text(a.selection));
    if (s.scores.size() != ds.d())
        throw InvalidInput("selection covers " + std::to_string(s.scores.size()) + " features, dataset has " +
                           std::to_string(ds.d()));
    if (a.percent) {
        check_percent(*a.percent);
        apply_percent(s, *a.percent);
    }

    MetricReport report;
    report.dataset = ds.name;
    report.method = s.method;
    report.teacher = s.teacher;
    report.percent = s.percent;
    report.m = s.m;
    report.seed = a.seed;
    const Matrix xs = ds.x.select_cols(s.selected);
    if (which.clustering) {
        stage.name = "clustering";
        report.clustering = clustering_eval(xs, *ds.labels, ds.classes(), a.runs, a.seed);
    }
    if (which.classification) {
        stage.name = "classification";
        CvConfig c = classification_defaults();
        c.folds = a.folds;
        c.epochs = a.epochs;
        c.batch_size = a.batch;
        c.hidden = a.clf_hidden;
        report.classification = classify_cv(xs, *ds.labels, a.seed, c);
    }
    if (which.reconstruction) {
        stage.name = "reconstruction";
        CvConfig c = reconstruction_defaults();
        c.folds = a.folds;
        c.epochs = a.epochs;
        c.batch_size = a.batch;
        c.hidden = a.rec_hidden;
        report.reconstruction = reconstruct_cv(xs, ds.x, a.seed, c);
    }

    stage.name = "write";
    const auto dir = output_dir(a.out);
    write_text(dir / "metrics.json", to_json(report));
    write_text(dir / "metrics.csv", metrics_csv_header() + metrics_csv_row(report));
    std::cout << metrics_csv_header() << metrics_csv_row(report);
    return ok;
}

// ---------------------------------------------------------------- sensitivity

struct SensitivityArgs {
    DatasetFlags data;
    MethodConfig method;
    std::optional<double> perplexity;
    std::string lambdas = "0.001,0.01,0.1";
    std::string seeds = "0";
    double percent = 20.0;
    std::size_t folds = 5;
    std::size_t epochs = 200;
    std::string out;
};

int cmd_sensitivity(SensitivityArgs& a, Stage& stage) {
    finish_method(a.method, a.perplexity);
    if (a.method.method != "tsfs") throw UsageError("sensitivity sweeps the tsfs lambda; --method must be tsfs");
    check_percent(a.percent);
    std::vector<double> lambdas;
    for (const auto& s : split_list(a.lambdas)) lambdas.push_back(parse_real(s, "--lambdas"));
    std::vector<std::uint64_t> seeds;
    for (const auto& s : split_list(a.seeds)) seeds.push_back(parse_seed(s, "--seeds"));
    if (lambdas.empty()) throw UsageError("--lambdas is empty");
    if (seeds.empty()) throw UsageError("--seeds is empty");
    for (double l : lambdas)
        if (l < 0.0) throw UsageError("--lambdas entries must be >= 0");

    stage.name = "load";
    const Dataset ds = load_dataset(a.data);
    if (!ds.has_labels()) throw UsageError("sensitivity reports classification accuracy and needs labels");

    CvConfig cv = classification_defaults();
    cv.folds = a.folds;
    cv.epochs = a.epochs;
    // acc[s][l]
    std::vector<std::vector<double>> acc(seeds.size(), std::vector<double>(lambdas.size()));
    for (std::size_t si = 0; si < seeds.size(); ++si) {
        stage.name = "teacher (seed " + std::to_string(seeds[si]) + ")";
        const Embedding emb = fit_teacher(ds, seeded_teacher(a.method, seeds[si]));
        for (std::size_t li = 0; li < lambdas.size(); ++li) {
            stage.name = "student (lambda " + format_double(lambdas[li]) + ", seed " + std::to_string(seeds[si]) + ")";
            MethodConfig m = a.method;
            m.student.lambda = lambdas[li];
            SelectionResult s = rank_features_with(ds, m, seeds[si], &emb);
            apply_percent(s, a.percent);
            stage.name = "classification (lambda " + format_double(lambdas[li]) + ")";
            acc[si][li] = classify_cv(ds.x.select_cols(s.selected), *ds.labels, seeds[si], cv).mean;
        }
    }

    std::vector<double> means(lambdas.size(), 0.0);
    for (std::size_t li = 0; li < lambdas.size(); ++li) {
        for (std::size_t si = 0; si < seeds.size(); ++si) means[li] += acc[si][li];
        means[li] /= static_cast<double>(seeds.size());
    }
    const auto [lo, hi] = std::ranges::minmax_element(means);
    const double spread = *hi - *lo;

    std::string csv = "seed";
    for (double l : lambdas) csv += ",lambda=" + format_double(l);
    csv += "\n";
    for (std::size_t si = 0; si < seeds.size(); ++si) {
        csv += std::to_string(seeds[si]);
        for (double v : acc[si]) csv += "," + format_double(v);
        csv += "\n";
    }
    csv += "mean";
    for (double v : means) csv += "," + format_double(v);
    csv += "\n";

    std::ostringstream json;
    json << "{\n  \"lambdas\": [";
    for (std::size_t li = 0; li < lambdas.size(); ++li) json << (li ? ", " : "") << format_double(lambdas[li]);
    json << "],\n  \"mean_accuracy\": [";
    for (std::size_t li = 0; li < means.size(); ++li) json << (li ? ", " : "") << format_double(means[li]);
    json << "],\n  \"percent\": " << format_double(a.percent) << ",\n  \"seeds\": [";
    for (std::size_t si = 0; si < seeds.size(); ++si) json << (si ? ", " : "") << seeds[si];
    json << "],\n  \"spread\": " << format_double(spread) << ",\n  \"teacher\": \""
         << to_string(a.method.teacher.method) << "\"\n}\n";

    stage.name = "write";
    const auto dir = output_dir(a.out);
    write_text(dir / "sensitivity.csv", csv);
    write_text(dir / "sensitivity.json", json.str());
    std::cout << csv << "spread," << format_double(spread) << "\n";
    return ok;
}

// ---------------------------------------------------------------- generate / embed

struct GenerateArgs {
    PlantedSpec spec;
    std::string structure = "linear";
    std::string out;
};

int cmd_generate(GenerateArgs& a, Stage& stage) {
    a.spec.structure = a.structure == "nonlinear" ? PlantedStructure::nonlinear : PlantedStructure::linear;
    stage.name = "generate";
    const PlantedData pd = make_planted(a.spec);
    stage.name = "write";
    const auto dir = output_dir(a.out);
    std::filesystem::create_directories(dir);
    write_csv(dir / "planted.csv", pd.dataset);
    write_text(dir / "informative.txt", index_list(pd.informative));
    std::cout << "wrote " << (dir / "planted.csv").string() << " (n=" << pd.dataset.n() << ", d=" << pd.dataset.d()
              << ", informative:";
    for (auto j : pd.informative) std::cout << ' ' << j;
    std::cout << ")\n";
    return ok;
}

struct EmbedArgs {
    DatasetFlags data;
    MethodConfig method;
    std::optional<double> perplexity;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_embed(EmbedArgs& a, Stage& stage) {
    finish_method(a.method, a.perplexity);
    stage.name = "load";
    const Dataset ds = load_dataset(a.data);
    stage.name = "teacher";
    if (is_supervised(a.method.teacher.method) && !ds.has_labels())
        throw UsageError("--teacher supervised-mlp requires --label-column (or --labels)");
    const Embedding e = fit_teacher(ds, seeded_teacher(a.method, a.seed));
    stage.name = "write";
    const auto dir = output_dir(a.out);
    std::filesystem::create_directories(dir);
    write_matrix_csv(dir / "embedding.csv", e.y);
    std::cout << "wrote " << (dir / "embedding.csv").string() << " (" << e.y.rows() << " x " << e.y.cols() << ")\n";
    return ok;
}

int report(const std::string& kind, const Stage& stage, const std::string& what, int code) {
    std::cerr << "error [" << stage.name << "] " << kind << ": " << what << "\n";
    return code;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Teacher-student feature selection"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Informational logging on stderr");

    SelectArgs sel;
    auto* select = app.add_subcommand("select", "Score and select features");
    add_dataset_flags(*select, sel.data);
    add_method_flags(*select, sel.method, sel.perplexity);
    select->add_option("--percent", sel.percent, "Percentage of features to keep");
    select->add_option("--seed", sel.seed, "Seed for teacher, student and baselines");
    select->add_option("--out", sel.out, "Output directory (default $TSFS_OUT_DIR)");

    EvaluateArgs ev;
    auto* evaluate = app.add_subcommand("evaluate", "Evaluate a feature selection");
    add_dataset_flags(*evaluate, ev.data);
    evaluate->add_option("--selection", ev.selection, "selection.json from the select command")->required();
    evaluate->add_option("--metrics", ev.metrics, "auto, all, or a list of clustering,classification,reconstruction");
    evaluate->add_option("--percent", ev.percent, "Re-slice the stored ranking at this percentage");
    evaluate->add_option("--runs", ev.runs, "k-means restarts");
    evaluate->add_option("--folds", ev.folds, "Cross-validation folds");
    evaluate->add_option("--epochs", ev.epochs, "Epochs of the evaluation networks");
    evaluate->add_option("--batch", ev.batch, "Batch size of the evaluation networks");
    evaluate->add_option("--clf-hidden", ev.clf_hidden, "Classifier hidden units");
    evaluate->add_option("--rec-hidden", ev.rec_hidden, "Reconstructor hidden units");
    evaluate->add_option("--seed", ev.seed, "Evaluation seed");
    evaluate->add_option("--out", ev.out, "Output directory (default $TSFS_OUT_DIR)");

    std::string config;
    std::string bench_out;
    std::size_t workers = 1;
    auto* bench = app.add_subcommand("benchmark", "Method x percentage x seed sweep from a config file");
    bench->add_option("--config", config, "JSON or key=value config file")->required();
    bench->add_option("--out", bench_out, "Output directory (default $TSFS_OUT_DIR)");
    bench->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 256));

    SensitivityArgs sens;
    auto* sensitivity = app.add_subcommand("sensitivity", "Classification accuracy across lambda values");
    add_dataset_flags(*sensitivity, sens.data);
    add_method_flags(*sensitivity, sens.method, sens.perplexity);
    sensitivity->add_option("--lambdas", sens.lambdas, "Comma-separated lambda values");
    sensitivity->add_option("--seeds", sens.seeds, "Comma-separated seeds");
    sensitivity->add_option("--percent", sens.percent, "Percentage of features to keep");
    sensitivity->add_option("--folds", sens.folds, "Cross-validation folds");
    sensitivity->add_option("--eval-epochs", sens.epochs, "Classifier epochs");
    sensitivity->add_option("--out", sens.out, "Output directory (default $TSFS_OUT_DIR)");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Write a planted synthetic dataset");
    generate->add_option("--n", gen.spec.n, "Samples");
    generate->add_option("--d", gen.spec.d, "Features");
    generate->add_option("--k", gen.spec.k_informative, "Informative features");
    generate->add_option("--sigma", gen.spec.noise_sigma, "Noise standard deviation");
    generate->add_option("--structure", gen.structure, "linear or nonlinear")
        ->check(CLI::IsMember({"linear", "nonlinear"}));
    generate->add_option("--classes", gen.spec.classes, "Label classes");
    generate->add_option("--seed", gen.spec.seed, "Seed");
    generate->add_option("--out", gen.out, "Output directory (default $TSFS_OUT_DIR)");

    EmbedArgs emb;
    auto* embed = app.add_subcommand("embed", "Write a teacher embedding");
    add_dataset_flags(*embed, emb.data);
    add_method_flags(*embed, emb.method, emb.perplexity);
    embed->add_option("--seed", emb.seed, "Teacher seed");
    embed->add_option("--out", emb.out, "Output directory (default $TSFS_OUT_DIR)");

    Stage stage;
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : usage;
    } catch (const UsageError& e) {
        return report("usage", stage, e.what(), usage);
    }
    log::set_verbose(verbose);

    try {
        if (*select) return cmd_select(sel, stage);
        if (*evaluate) return cmd_evaluate(ev, stage);
        if (*bench) return cmd_benchmark(config, bench_out, workers, stage);
        if (*sensitivity) return cmd_sensitivity(sens, stage);
        if (*generate) return cmd_generate(gen, stage);
        if (*embed) return cmd_embed(emb, stage);
        return usage;
    } catch (const UsageError& e) {
        return report("usage", stage, e.what(), usage);
    } catch (const ConnectivityError& e) {
        return report("data", stage, e.what(), data);
    } catch (const ParseError& e) {
        return report("data", stage, e.what(), data);
    } catch (const InvalidInput& e) {
        return report("data", stage, e.what(), data);
    } catch (const NumericalError& e) {
        return report("numerical", stage, e.what(), numerical);
    } catch (const std::filesystem::filesystem_error& e) {
        return report("data", stage, e.what(), data);
    } catch (const std::exception& e) {
        return report("internal", stage, e.what(), numerical);
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"tsfs"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace tsfs::cli
