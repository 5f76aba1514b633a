#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spinwave::cli {

/// Exit codes: 0 success, 1 verification or integration failure, 2 usage,
/// parse, config or domain error.
enum Exit : int { Ok = 0, Failed = 1, Usage = 2 };

/// Runs the command line `args` (without the program name).  Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Names of the property suites run by `check`, in report order.
const std::vector<std::string>& suite_names();

}  // namespace spinwave::cli
