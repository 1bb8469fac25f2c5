#include "cli/log.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>

namespace frugal::log {
namespace {

Level from_env() {
    const char* v = std::getenv("FRUGAL_LOG");
    if (!v) return Level::warn;
    const std::string s(v);
    if (s == "error") return Level::error;
    if (s == "info") return Level::info;
    if (s == "debug" || s == "trace") return Level::debug;
    return Level::warn;
}

std::atomic<int>& current() {
    static std::atomic<int> lvl{static_cast<int>(from_env())};
    return lvl;
}

const char* tag(Level l) {
    switch (l) {
        case Level::error: return "error";
        case Level::warn: return "warn";
        case Level::info: return "info";
        case Level::debug: return "debug";
    }
    return "?";
}

}  // namespace

Level level() { return static_cast<Level>(current().load()); }
void set_level(Level l) { current().store(static_cast<int>(l)); }

void write(Level l, const std::string& message) {
    if (static_cast<int>(l) > current().load()) return;
    static std::mutex mu;
    std::lock_guard lock(mu);
    std::cerr << "[" << tag(l) << "] " << message << '\n';
}

}  // namespace frugal::log
