#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tsfs/baselines.hpp"
#include "tsfs/datasets.hpp"
#include "tsfs/student.hpp"
#include "tsfs/teacher.hpp"

namespace tsfs::cli {

/// Bad or missing flags; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

/// Name of the pipeline stage currently running, for error messages.
struct Stage {
    std::string name = "setup";
};

struct DatasetFlags {
    std::string input;
    std::string format = "csv";
    bool header = false;
    std::string label_column;
    std::string labels_file;
    std::string scale = "none";
    std::string name;
};

void add_dataset_flags(CLI::App& app, DatasetFlags& f);
Dataset load_dataset(const DatasetFlags& f);

/// One feature-scoring method with all of its parameters.
struct MethodConfig {
    std::string method = "tsfs";  // tsfs, laplacian_score, variance, rsr, aefs, random
    TeacherSpec teacher;
    StudentConfig student;
    std::size_t ls_neighbors = 10;
    RsrOptions rsr;
    AefsOptions aefs;
};

/// Canonical method name, or UsageError.
std::string canonical_method(const std::string& name);
TeacherMethod teacher_or_usage(const std::string& name);

void add_method_flags(CLI::App& app, MethodConfig& cfg, std::optional<double>& perplexity);

/// Scores and full ranking (no slice). `embedding` is used by tsfs when given.
SelectionResult rank_features_with(const Dataset& ds, const MethodConfig& cfg, std::uint64_t seed,
                                   const Embedding* embedding = nullptr);

/// Teacher spec with the run seed applied.
TeacherSpec seeded_teacher(const MethodConfig& cfg, std::uint64_t seed);

/// --out, else $TSFS_OUT_DIR, else "tsfs_out".
std::filesystem::path output_dir(const std::string& flag);

std::vector<std::string> split_list(const std::string& s);
double parse_real(const std::string& s, const std::string& what);
std::uint64_t parse_seed(const std::string& s, const std::string& what);

int cmd_benchmark(const std::string& config_path, const std::string& out_flag, std::size_t workers, Stage& stage);

}  // namespace tsfs::cli
