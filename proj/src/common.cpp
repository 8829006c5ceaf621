#include "micronap/common.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace micronap {

LogLevel log_level() {
    static LogLevel lvl = [] {
        const char* env = std::getenv("MICRONAP_LOG");
        if (env == nullptr) return LogLevel::Warn;
        if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
        if (std::strcmp(env, "info") == 0) return LogLevel::Info;
        return LogLevel::Warn;
    }();
    return lvl;
}

void log_warn(const std::string& msg) { std::fprintf(stderr, "micronap: warning: %s\n", msg.c_str()); }

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::Info) std::fprintf(stderr, "micronap: %s\n", msg.c_str());
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::Debug) std::fprintf(stderr, "micronap: debug: %s\n", msg.c_str());
}

} // namespace micronap
