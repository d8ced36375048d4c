#pragma once

#include <sstream>
#include <string>

namespace cohortsim::log {

enum class Level { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Threshold comes from the COHORTSIM_LOG environment variable
// ("error" | "warn" | "info" | "debug"); default is "warn".
Level threshold();
void set_threshold(Level level);
bool enabled(Level level);

// Writes one line to stderr if `level` is enabled.
void write(Level level, const std::string& message);

namespace detail {
template <typename... Args>
std::string concat(const Args&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}
}  // namespace detail

template <typename... Args>
void error(const Args&... args) {
  if (enabled(Level::kError)) write(Level::kError, detail::concat(args...));
}
template <typename... Args>
void warn(const Args&... args) {
  if (enabled(Level::kWarn)) write(Level::kWarn, detail::concat(args...));
}
template <typename... Args>
void info(const Args&... args) {
  if (enabled(Level::kInfo)) write(Level::kInfo, detail::concat(args...));
}
template <typename... Args>
void debug(const Args&... args) {
  if (enabled(Level::kDebug)) write(Level::kDebug, detail::concat(args...));
}

}  // namespace cohortsim::log
