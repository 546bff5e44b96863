#pragma once

#include <string>

namespace tvcs {

enum class LogLevel { error = 0, info = 1, debug = 2 };

/// Threshold from TVCS_LOG (error, info or debug); error when unset or unknown.
LogLevel log_threshold();
void set_log_threshold(LogLevel level);

/// Writes "[tvcs level] message" to stderr when level is within the threshold.
void log_message(LogLevel level, const std::string& message);

}  // namespace tvcs
