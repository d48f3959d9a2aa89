#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>

#include "jetweil/program.hpp"

namespace jetweil {

/// Generator families. All of them track an enclosing interval for every
/// slot, assuming inputs in [-1, 1], and keep magnitudes bounded.
enum class ProgramFamily {
  /// Only primitives total on R: add, mul, sin, cos, tanh, and exp behind an
  /// affine rescaling of its argument into [-1, 1].
  safe,
  /// Every primitive; log/sqrt/recip/div/pow operands are chosen from slots
  /// whose interval keeps the primitive in its domain.
  guarded,
  /// add, sub, mul, neg, integer const, integer pow; bounded total degree.
  polynomial,
  /// Benchmark family dominated by add/sub and elementwise unary functions.
  add_unary_heavy,
  /// Benchmark family dominated by mul.
  mul_heavy,
};

std::string_view family_name(ProgramFamily f) noexcept;

struct RandomProgramOptions {
  /// Number of nodes (Q) in the generated program.
  std::size_t depth = 10;
  std::size_t n_inputs = 2;
  /// 0 lets the seed pick between 1 and 3 outputs.
  std::size_t n_outputs = 0;
  ProgramFamily family = ProgramFamily::safe;
  /// Total-degree ceiling for the polynomial family.
  unsigned max_degree = 6;
};

/// Deterministic in (seed, options). Throws Error when depth == 0 or
/// n_inputs == 0.
Program random_program(std::uint64_t seed, const RandomProgramOptions& options);

/// `safe` selects ProgramFamily::safe, otherwise ProgramFamily::guarded.
Program random_program(std::uint64_t seed, std::size_t depth, std::size_t n_inputs, bool safe);

}  // namespace jetweil
