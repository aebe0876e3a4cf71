#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsfs/baselines.hpp"
#include "tsfs/evaluation.hpp"
#include "tsfs/student.hpp"

namespace tsfs {

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

/// {method, teacher, seeds, higher_is_better, percent, m, scores, ranking, selected}
std::string to_json(const SelectionResult& s);
/// Throws ParseError on malformed documents or inconsistent fields.
SelectionResult selection_from_json(const std::string& text);

/// Selection schema without the slice, plus converged and iterations.
std::string to_json(const BaselineResult& r);

std::string to_json(const MetricReport& r);
/// dataset,method,teacher,p,acc,nmi,clf_acc,mse,seed
std::string metrics_csv_header();
/// Metrics that were not computed are empty cells.
std::string metrics_csv_row(const MetricReport& r);

/// Writes `content` verbatim, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// One 0-based index per line.
std::string index_list(const std::vector<std::size_t>& indices);

}  // namespace tsfs
