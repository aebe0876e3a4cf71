#pragma once

#include <functional>
#include <string>

namespace tsfs::log {

using Sink = std::function<void(const std::string&)>;

/// Replaces the warning sink (default: stderr). Returns the previous sink.
Sink set_warning_sink(Sink sink);

void warn(const std::string& message);
void info(const std::string& message);

/// Informational messages are dropped unless enabled.
void set_verbose(bool on);

}  // namespace tsfs::log
