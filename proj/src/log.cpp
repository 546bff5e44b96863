#include "tvcs/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>

namespace tvcs {

namespace {

LogLevel from_env() {
  const char* raw = std::getenv("TVCS_LOG");
  if (!raw) return LogLevel::error;
  const std::string v(raw);
  if (v == "debug") return LogLevel::debug;
  if (v == "info") return LogLevel::info;
  return LogLevel::error;
}

std::atomic<int>& threshold() {
  static std::atomic<int> level{static_cast<int>(from_env())};
  return level;
}

const char* name(LogLevel level) {
  switch (level) {
    case LogLevel::error: return "error";
    case LogLevel::info: return "info";
    case LogLevel::debug: return "debug";
  }
  return "?";
}

}  // namespace

LogLevel log_threshold() { return static_cast<LogLevel>(threshold().load()); }

void set_log_threshold(LogLevel level) { threshold().store(static_cast<int>(level)); }

void log_message(LogLevel level, const std::string& message) {
  if (static_cast<int>(level) > threshold().load()) return;
  static std::mutex mutex;
  std::lock_guard lock(mutex);
  std::cerr << "[tvcs " << name(level) << "] " << message << '\n';
}

}  // namespace tvcs
