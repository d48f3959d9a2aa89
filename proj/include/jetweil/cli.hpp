#pragma once

#include <ostream>
#include <string_view>
#include <vector>

namespace jetweil::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point of the `jetweil` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "1, 2.5,-3" -> {1, 2.5, -3}. Throws Error on a malformed number.
std::vector<double> parse_reals(std::string_view text);

/// "1,0;0,1" -> {{1, 0}, {0, 1}}.
std::vector<std::vector<double>> parse_rows(std::string_view text);

/// Shortest decimal that round-trips.
std::string format_real(double v);

}  // namespace jetweil::cli
