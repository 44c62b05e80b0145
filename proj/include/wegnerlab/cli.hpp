#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wegnerlab {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,      // usage, config, IO and solver errors
  kExitViolation = 2,  // some numerical inequality check failed
};

/// The wegnerlab command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace wegnerlab
