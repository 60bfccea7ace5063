#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace energyq::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kComputationError = 1;
inline constexpr int kUsageError = 2;

// Parses argv (argv[0] is the program name), runs one subcommand, writes the
// result to `out` or to the --output file, and diagnostics to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace energyq::cli
