#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vortexlab {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitNonConvergence = 1,
  kExitInvalidParameter = 2,
  kExitIoFailure = 3,
};

/// Runs one command line (without the program name). Results go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vortexlab
