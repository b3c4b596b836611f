#pragma once

#include <iosfwd>

namespace loadcouple::cli {

// Process exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kInvalidInput = 2;
inline constexpr int kInfeasible = 3;
inline constexpr int kMaxIterations = 4;

/// Entry point of the `loadcouple` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace loadcouple::cli
