#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cac {

/// Exit codes of the harness.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailures = 1;  // experiment failures above the allowance
inline constexpr int kExitUsage = 2;     // usage, config or I/O error

/// Runs the harness. `args` excludes the program name. Reports go to files or
/// `out`; diagnostics and summaries go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace cac
