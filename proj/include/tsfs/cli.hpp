#pragma once

#include <string>
#include <vector>

namespace tsfs::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int { ok = 0, usage = 2, data = 3, numerical = 4 };

/// Parses and runs one subcommand. Never throws; failures map to an ExitCode.
int run(int argc, const char* const* argv);
/// Same as run(argc, argv) with args[0] taken as the subcommand.
int run(const std::vector<std::string>& args);

}  // namespace tsfs::cli
