#include "cohortsim/util/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace cohortsim::log {

namespace {

Level parse_level(const char* text) {
  if (text == nullptr) return Level::kWarn;
  std::string s(text);
  if (s == "error") return Level::kError;
  if (s == "warn") return Level::kWarn;
  if (s == "info") return Level::kInfo;
  if (s == "debug") return Level::kDebug;
  return Level::kWarn;
}

Level& threshold_ref() {
  static Level level = parse_level(std::getenv("COHORTSIM_LOG"));
  return level;
}

std::mutex& io_mutex() {
  static std::mutex m;
  return m;
}

const char* label(Level level) {
  switch (level) {
    case Level::kError: return "error";
    case Level::kWarn: return "warn";
    case Level::kInfo: return "info";
    case Level::kDebug: return "debug";
  }
  return "?";
}

}  // namespace

Level threshold() { return threshold_ref(); }
void set_threshold(Level level) { threshold_ref() = level; }
bool enabled(Level level) {
  return static_cast<int>(level) <= static_cast<int>(threshold_ref());
}

void write(Level level, const std::string& message) {
  std::lock_guard<std::mutex> lock(io_mutex());
  std::cerr << "[cohortsim:" << label(level) << "] " << message << "\n";
}

}  // namespace cohortsim::log
