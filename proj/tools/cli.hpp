#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace recur::cli {

enum ExitCode : int { kPass = 0, kBoundViolated = 1, kUsageError = 2 };

/// Runs one invocation. `args` excludes the program name. Results go to
/// `out` (or the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace recur::cli
