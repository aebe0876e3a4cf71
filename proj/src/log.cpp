#include "tsfs/log.hpp"

#include <iostream>
#include <mutex>

namespace tsfs::log {

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

Sink& current_sink() {
    static Sink sink = [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
    return sink;
}

bool& verbose_flag() {
    static bool on = false;
    return on;
}

}  // namespace

Sink set_warning_sink(Sink sink) {
    std::lock_guard lock(sink_mutex());
    Sink old = std::move(current_sink());
    current_sink() = std::move(sink);
    return old;
}

void warn(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (current_sink()) current_sink()(message);
}

void info(const std::string& message) {
    std::lock_guard lock(sink_mutex());
    if (verbose_flag()) std::cerr << message << '\n';
}

void set_verbose(bool on) {
    std::lock_guard lock(sink_mutex());
    verbose_flag() = on;
}

}  // namespace tsfs::log
