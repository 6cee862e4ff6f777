#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace metricsig {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternalError = 1;
inline constexpr int kExitInputError = 2;

/// Entry point for the `metricsig` command line. `args[0]` is the program
/// name. Reports go to `out` (or to --out), diagnostics and warnings to `err`.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace metricsig
