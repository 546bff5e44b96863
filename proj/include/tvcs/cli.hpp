#pragma once

#include <iosfwd>

namespace tvcs {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitRuntime = 1,
  /// Bad flags, unreadable or invalid configuration and input documents.
  kExitConfig = 2,
};

/// Parses argv and runs the `project`, `solve` or `experiment` subcommand.
/// Results go to `out`, diagnostics and usage text to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tvcs
