#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qfield::cli {

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kBadFlags = 2, kNumericalFailure = 3 };

// Runs the command line `args` (without the program name). Progress and
// reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// "<stem>_lambda<value><ext>" for one broadcast coupling.
std::string broadcast_path(const std::string& out, double lambda);

} // namespace qfield::cli
