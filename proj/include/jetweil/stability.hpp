#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "json.hpp"

#include "jetweil/modes.hpp"
#include "jetweil/program.hpp"

namespace jetweil {

inline constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

/// Norm of the local adjoint map of one primitive at its recorded primal
/// operands: sqrt(2) for add/sub (one seed fanned out to two targets),
/// sqrt(a^2 + b^2) for mul, |phi'(a)| for unary, 0 for constants.
double adjoint_lipschitz(const Node& node, std::span<const double> operands);

struct ConditionEstimate {
  double kappa;
  /// The relative condition number is infinite (or undefined) here and
  /// kappa was capped at 1/u.
  bool singular;
};

/// Componentwise relative condition number |a phi'(a) / phi(a)| of the
/// primitive (summed over operands for binary ones).
ConditionEstimate condition_estimate(const Node& node, std::span<const double> operands);

/// delta = c * u * kappa.
double relative_error_term(double kappa, double delta_const = 4.0);

/// Operator 2-norm of the full-state reverse step  s <- s + g * s[k]  where
/// g holds the local partials on the operand slots (never on slot k itself):
///   (t + sqrt(t^2 + 4)) / 2,  t = ||g||.
double reverse_step_norm(const Node& node, std::span<const double> operands);

struct StabilityRow {
  std::size_t node;
  PrimitiveKind op;
  double lipschitz;
  double step_norm;
  double kappa;
  double delta;
  bool singular;
};

struct StabilityReport {
  /// In reverse-sweep order (last node first).
  std::vector<StabilityRow> per_node;
  double omega_norm = 0.0;
  /// sqrt of the largest number of times one slot is listed as an output.
  double seed_factor = 1.0;
  /// prod(L_i) * ||omega||, the local-norm chain.
  double lipschitz_product = 0.0;
  /// seed_factor * prod((1 + delta_i) * step_norm_i) * ||omega||.
  double product_bound = 0.0;
  /// ||vjp(omega)|| as computed.
  double observed_norm = 0.0;
  /// sum(delta_i).
  double first_order_error = 0.0;

  bool holds() const noexcept { return observed_norm <= product_bound; }
};

struct StabilityOptions {
  double delta_const = 4.0;
};

StabilityReport stability_bound(const Program& prog, std::span<const double> x,
                                const CoVector& omega, const StabilityOptions& opts = {});

nlohmann::ordered_json to_json(const StabilityReport& report);

}  // namespace jetweil
