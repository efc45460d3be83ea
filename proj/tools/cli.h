#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace multisiam::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kDataError = 2,
  kNumericAbort = 3,
};

/// Parse `args` (without the program name) and run the chosen subcommand.
/// Results go to `out` unless the subcommand was given --out; diagnostics go
/// to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace multisiam::cli
