#pragma once

#include <iosfwd>

namespace naloss {

/// Exit statuses of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1, ///< bad flags, config or circuit
  kExitRuntime = 2,    ///< the run itself failed (I/O, routing, ...)
};

/**
 * Runs the `naloss` command line: bench, compile, simulate and sweep.
 * Tables and JSON go to files or to `out`; diagnostics go to `err`.
 */
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace naloss
