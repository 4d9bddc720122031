#pragma once

#include <iosfwd>

namespace cdprune {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,    // I/O or other runtime failure
  kExitUsage = 2,      // bad flags, unknown subcommand, invalid config
  kExitPartial = 3,    // a run stopped early; partial results were written
};

int cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cdprune
