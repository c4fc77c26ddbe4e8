#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace evitsim::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Threshold comes from EVITSIM_LOG (error|warn|info|debug), default warn.
inline Level threshold() {
    static Level lvl = [] {
        const char* env = std::getenv("EVITSIM_LOG");
        if (!env) return Level::Warn;
        if (!std::strcmp(env, "error")) return Level::Error;
        if (!std::strcmp(env, "info")) return Level::Info;
        if (!std::strcmp(env, "debug")) return Level::Debug;
        return Level::Warn;
    }();
    return lvl;
}

template <class... Args>
void emit(Level lvl, const char* tag, const char* fmt, Args... args) {
    if (lvl > threshold()) return;
    std::fprintf(stderr, "[%s] ", tag);
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
}

#define EVITSIM_LOG_AT(lvl, tag, ...) ::evitsim::log::emit(lvl, tag, __VA_ARGS__)
#define LOG_ERROR(...) EVITSIM_LOG_AT(::evitsim::log::Level::Error, "error", __VA_ARGS__)
#define LOG_WARN(...) EVITSIM_LOG_AT(::evitsim::log::Level::Warn, "warn", __VA_ARGS__)
#define LOG_INFO(...) EVITSIM_LOG_AT(::evitsim::log::Level::Info, "info", __VA_ARGS__)
#define LOG_DEBUG(...) EVITSIM_LOG_AT(::evitsim::log::Level::Debug, "debug", __VA_ARGS__)

}  // namespace evitsim::log
