#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "jetweil/program.hpp"

namespace jetweil {

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::size_t count = 100;
  bool parallel = false;
  double delta_const = 4.0;
};

struct SuiteResult {
  std::string suite;
  std::size_t instances = 0;
  std::size_t violations = 0;
  /// Largest residual seen, in the suite's own metric.
  double max_residual = 0.0;
  double tolerance = 0.0;
  /// Up to a handful of failing instances, for diagnostics.
  std::vector<std::string> failures;

  bool pass() const noexcept { return violations == 0; }
};

/// duality, functoriality, exactness, stability, envelope, truncation.
const std::vector<std::string>& suite_names();

/// Throws Error for an unknown suite name.
SuiteResult run_suite(std::string_view name, const SuiteOptions& opts);

nlohmann::ordered_json to_json(const SuiteResult& result);

/// Seed of instance i in a run seeded with `seed`.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t i) noexcept;

/// Appends tanh to every output, so the result maps into [-1, 1]^m.
Program squash_outputs(const Program& prog);

/// Runs body(i) for i in [0, count), on all hardware threads when `parallel`
/// is set. Exceptions are rethrown after every worker finishes.
void for_each_instance(std::size_t count, bool parallel,
                       const std::function<void(std::size_t)>& body);

}  // namespace jetweil
