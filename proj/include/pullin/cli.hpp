#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pullin::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 2,
  kNoPullIn = 3,
  kNumericalFailure = 4,
};

enum class Command { Pullin, Sweep, Deflect, Identify, Sensitivity, Catalog };

/// Runs one command. `args` excludes the program name. Reports go to `out`;
/// when a CSV is written to `out` instead of a file, the report goes to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pullin::cli
