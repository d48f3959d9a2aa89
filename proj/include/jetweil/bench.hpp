#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "jetweil/program.hpp"
#include "jetweil/random_program.hpp"
#include "jetweil/weil.hpp"

namespace jetweil {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (log x_i, log y_i).
LinearFit fit_loglog(std::span<const double> x, std::span<const double> y);

/// Hypercube caps [1]^p for p = 1..6: dim W = 2, 4, ..., 64.
std::vector<std::vector<unsigned>> default_cap_schedule();

/// Parses "1;1,1;1,1,1" into cap vectors.
std::vector<std::vector<unsigned>> parse_cap_schedule(const std::string& text);

struct BenchOptions {
  std::vector<std::vector<unsigned>> schedule = default_cap_schedule();
  std::size_t repetitions = 5;
  std::size_t warmups = 2;
  /// Each repetition loops until at least this much time has passed, and
  /// reports the per-evaluation time.
  double min_repetition_seconds = 2e-3;
  std::uint64_t seed = 1;
  std::size_t max_dim = kDefaultMaxDim;
  bool run_nested = true;
  unsigned nested_p = 2;
  unsigned nested_k = 2;
  /// Slope window applied when the report is gated.
  double slope_lo = 0.8;
  double slope_hi = 1.3;
};

struct BenchRun {
  std::vector<unsigned> caps;
  std::size_t dim = 0;
  double median_seconds = 0.0;
  double min_seconds = 0.0;
  std::size_t repetitions = 0;
  std::size_t inner_iterations = 0;
  /// Coefficient storage held by one evaluation: every slot keeps a
  /// dim-length array.
  std::size_t coeff_bytes = 0;
  std::size_t lifted = 0;
};

struct NestedBaseline {
  unsigned p = 0;
  unsigned k = 0;
  std::uint64_t passes = 0;
  std::uint64_t expected_passes = 0;
  double median_seconds = 0.0;
  /// Weil evaluation at caps [k]^p, for comparison.
  double weil_median_seconds = 0.0;
};

struct BenchReport {
  std::string program_id;
  std::string mode = "weil";
  std::size_t q = 0;
  std::size_t n_inputs = 0;
  std::vector<BenchRun> runs;
  LinearFit fit;
  bool gated = false;
  bool slope_ok = true;
  double slope_lo = 0.0;
  double slope_hi = 0.0;
  /// Instrumentation over all Weil evaluations; both must be zero.
  std::uint64_t weil_tapes = 0;
  std::uint64_t weil_adjoint_slots = 0;
  /// One vjp on the same program: n + Q slots in total, Q of them for nodes.
  std::uint64_t vjp_adjoint_slots = 0;
  std::uint64_t vjp_node_adjoint_slots = 0;
  std::optional<NestedBaseline> nested;
  std::size_t repetitions = 0;
  std::size_t warmups = 0;
  std::string timestamp;

  /// Lifted count equals Q on every run, no tape was touched, and the slope
  /// is inside the window when gated.
  bool pass() const noexcept;
};

BenchReport bench_program(const Program& prog, const std::string& id, bool gated,
                          const BenchOptions& opts);

/// Generates a Q-node program of the given family and benchmarks it. Only
/// the add/unary family is gated on the slope window.
BenchReport bench_family(ProgramFamily family, std::size_t q, std::size_t n_inputs,
                         const BenchOptions& opts);

nlohmann::ordered_json to_json(const BenchReport& report);

}  // namespace jetweil
