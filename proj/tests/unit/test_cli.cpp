#include <gtest/gtest.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "support.hpp"
#include "tsfs/cli.hpp"
#include "tsfs/serialize.hpp"

using namespace tsfs;
namespace fs = std::filesystem;

namespace {

// Runs the CLI with stdout and stderr captured.
int quiet_run(const std::vector<std::string>& args, std::string* out = nullptr) {
    std::ostringstream cout_buf, cerr_buf;
    auto* old_out = std::cout.rdbuf(cout_buf.rdbuf());
    auto* old_err = std::cerr.rdbuf(cerr_buf.rdbuf());
    const int code = cli::run(args);
    std::cout.rdbuf(old_out);
    std::cerr.rdbuf(old_err);
    if (out) *out = cout_buf.str() + cerr_buf.str();
    return code;
}

fs::path planted_csv(const std::string& name, std::size_t n = 80, std::size_t d = 10) {
    const auto dir = test::scratch_dir(name);
    EXPECT_EQ(quiet_run({"generate", "--n", std::to_string(n), "--d", std::to_string(d), "--k", "3", "--seed", "1",
                         "--out", (dir / "data").string()}),
              0);
    return dir;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream in(p);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST(Cli, SelectWritesContractFiles) {
    const auto dir = planted_csv("cli_select");
    const auto data = (dir / "data" / "planted.csv").string();
    ASSERT_EQ(quiet_run({"select", "--input", data, "--header", "--label-column", "label", "--teacher", "pca",
                         "--percent", "30", "--epochs", "20", "--seed", "1", "--out", (dir / "run1").string()}),
              0);
    const auto s = selection_from_json(read_text(dir / "run1" / "selection.json"));
    EXPECT_EQ(s.m, 3u);
    EXPECT_EQ(s.teacher, "pca");
    EXPECT_EQ(line_count(dir / "run1" / "selected.txt"), 3u);
}

TEST(Cli, SupervisedTeacherWithoutLabelsIsUsageError) {
    const auto dir = planted_csv("cli_supervised");
    std::string out;
    EXPECT_EQ(quiet_run({"select", "--input", (dir / "data" / "planted.csv").string(), "--header", "--teacher",
                         "supervised-mlp", "--out", (dir / "o").string()},
                        &out),
              cli::usage);
    EXPECT_NE(out.find("--label-column"), std::string::npos);
}

TEST(Cli, IdenticalRunsAreByteIdentical) {
    const auto dir = planted_csv("cli_determinism");
    const auto data = (dir / "data" / "planted.csv").string();
    for (const char* run : {"a", "b"})
        ASSERT_EQ(quiet_run({"select", "--input", data, "--header", "--teacher", "tsne", "--tsne-iters", "100",
                             "--epochs", "10", "--seed", "3", "--out", (dir / run).string()}),
                  0);
    EXPECT_EQ(read_text(dir / "a" / "selection.json"), read_text(dir / "b" / "selection.json"));
}

TEST(Cli, EvaluateReportsEveryRun) {
    const auto dir = planted_csv("cli_evaluate");
    const auto data = (dir / "data" / "planted.csv").string();
    ASSERT_EQ(quiet_run({"select", "--input", data, "--header", "--label-column", "label", "--method", "variance",
                         "--percent", "50", "--out", (dir / "s").string()}),
              0);
    ASSERT_EQ(quiet_run({"evaluate", "--input", data, "--header", "--label-column", "label", "--selection",
                         (dir / "s" / "selection.json").string(), "--metrics", "clustering", "--runs", "20", "--out",
                         (dir / "e").string()}),
              0);
    const auto j = nlohmann::json::parse(read_text(dir / "e" / "metrics.json"));
    EXPECT_EQ(j["clustering"]["acc"].size(), 20u);
    EXPECT_TRUE(j["clustering"].contains("acc_mean"));
    EXPECT_EQ(line_count(dir / "e" / "metrics.csv"), 2u);
}

TEST(Cli, EvaluateErrorPaths) {
    const auto dir = planted_csv("cli_evaluate_errors");
    const auto data = (dir / "data" / "planted.csv").string();
    EXPECT_EQ(quiet_run({"evaluate", "--input", data, "--header", "--selection", (dir / "missing.json").string(),
                         "--out", (dir / "e").string()}),
              cli::data);
    ASSERT_EQ(quiet_run({"select", "--input", data, "--header", "--method", "variance", "--out", (dir / "s").string()}),
              0);
    EXPECT_EQ(quiet_run({"evaluate", "--input", data, "--header", "--selection",
                         (dir / "s" / "selection.json").string(), "--metrics", "classification", "--out",
                         (dir / "e").string()}),
              cli::usage);
}

TEST(Cli, BadFlagsAndData) {
    EXPECT_EQ(quiet_run({"select", "--no-such-flag"}), cli::usage);
    EXPECT_EQ(quiet_run({"select", "--input", "/nonexistent/file.csv", "--out", "/tmp/tsfs_test_none"}), cli::data);
    const auto dir = test::scratch_dir("cli_bad_method");
    std::ofstream(dir / "x.csv") << "1,2\n3,4\n5,7\n";
    EXPECT_EQ(quiet_run({"select", "--input", (dir / "x.csv").string(), "--method", "magic", "--out",
                         (dir / "o").string()}),
              cli::usage);
    std::ofstream(dir / "pairs.csv") << "0,0\n0,1\n100,100\n100,101\n";
    std::string out;
    EXPECT_EQ(quiet_run({"select", "--input", (dir / "pairs.csv").string(), "--teacher", "isomap", "--embed-dim", "1",
                         "--neighbors", "1", "--out", (dir / "o").string()},
                        &out),
              cli::data);
    EXPECT_NE(out.find("disconnected"), std::string::npos);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
    const auto dir = planted_csv("cli_env");
    const auto target = dir / "from_env";
    ::setenv("TSFS_OUT_DIR", target.c_str(), 1);
    const int code = quiet_run({"select", "--input", (dir / "data" / "planted.csv").string(), "--header", "--method",
                                "variance"});
    ::unsetenv("TSFS_OUT_DIR");
    ASSERT_EQ(code, 0);
    EXPECT_TRUE(fs::exists(target / "selection.json"));
}

TEST(Cli, BenchmarkGridAndRankOnceCache) {
    const auto dir = planted_csv("cli_benchmark");
    std::ofstream(dir / "bench.cfg") << "# small sweep\n"
                                        "input = data/planted.csv\n"
                                        "header = true\n"
                                        "label_column = label\n"
                                        "methods = tsfs:pca, random\n"
                                        "percentages = 10, 20, 50\n"
                                        "seeds = 0, 1\n"
                                        "epochs = 20\n"
                                        "metrics = classification\n"
                                        "eval_epochs = 5\n";
    std::string out;
    ASSERT_EQ(quiet_run({"benchmark", "--config", (dir / "bench.cfg").string(), "--out", (dir / "b").string()}, &out),
              0);
    EXPECT_EQ(line_count(dir / "b" / "results.csv"), 13u);
    EXPECT_EQ(line_count(dir / "b" / "summary.csv"), 7u);
    const auto stats = nlohmann::json::parse(read_text(dir / "b" / "cache_stats.json"));
    EXPECT_EQ(stats["cells"], 12);
    EXPECT_EQ(stats["teacher_fits"], 2);
    EXPECT_EQ(stats["ranking_fits"], 4);
    EXPECT_EQ(stats["ranking_hits"], 8);
    EXPECT_NE(out.find("teacher cache: 2 fits"), std::string::npos);

    const auto first = read_text(dir / "b" / "results.csv");
    ASSERT_EQ(quiet_run({"benchmark", "--config", (dir / "bench.cfg").string(), "--out", (dir / "c").string(),
                         "--workers", "3"}),
              0);
    EXPECT_EQ(read_text(dir / "c" / "results.csv"), first);
}

TEST(Cli, BenchmarkRejectsUnknownKeys) {
    const auto dir = planted_csv("cli_benchmark_keys");
    std::ofstream(dir / "bench.cfg") << "input = data/planted.csv\nheader = true\nmethdos = random\n";
    EXPECT_EQ(quiet_run({"benchmark", "--config", (dir / "bench.cfg").string(), "--out", (dir / "b").string()}),
              cli::usage);
}

TEST(Cli, SensitivityEmitsThreeLambdaColumns) {
    const auto dir = planted_csv("cli_sensitivity");
    ASSERT_EQ(quiet_run({"sensitivity", "--input", (dir / "data" / "planted.csv").string(), "--header",
                         "--label-column", "label", "--teacher", "pca", "--epochs", "20", "--eval-epochs", "5",
                         "--out", (dir / "s").string()}),
              0);
    std::ifstream in(dir / "s" / "sensitivity.csv");
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "seed,lambda=0.001,lambda=0.01,lambda=0.1");
    const auto j = nlohmann::json::parse(read_text(dir / "s" / "sensitivity.json"));
    ASSERT_EQ(j["mean_accuracy"].size(), 3u);
    double lo = 1.0, hi = 0.0;
    for (const auto& v : j["mean_accuracy"]) lo = std::min(lo, v.get<double>()), hi = std::max(hi, v.get<double>());
    EXPECT_DOUBLE_EQ(j["spread"].get<double>(), hi - lo);
}

TEST(Cli, EmbedWritesCodes) {
    const auto dir = planted_csv("cli_embed");
    ASSERT_EQ(quiet_run({"embed", "--input", (dir / "data" / "planted.csv").string(), "--header", "--label-column",
                         "label", "--teacher", "mds", "--out", (dir / "e").string()}),
              0);
    EXPECT_EQ(line_count(dir / "e" / "embedding.csv"), 80u);
}
