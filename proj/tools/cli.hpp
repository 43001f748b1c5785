#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stlfd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for `stlfd detect|eval|synth ...`. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

}  // namespace stlfd::cli
