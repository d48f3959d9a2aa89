#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

#include "jetweil/evaluate.hpp"
#include "jetweil/program.hpp"
#include "jetweil/weil.hpp"

namespace jetweil {

/// W-point x_W = x + sum_j eps_j v^(j), together with the caps rho_j.
struct SeedSpec {
  std::vector<double> base;
  std::vector<std::vector<double>> directions;
  std::vector<unsigned> caps;

  /// p = n with v^(j) = e_j: every mixed partial up to the caps.
  static SeedSpec basis(std::vector<double> base, unsigned cap);
  static SeedSpec basis(std::vector<double> base, std::vector<unsigned> caps);

  /// Throws DimensionMismatch when directions and caps disagree in count or
  /// a direction does not have the base dimension.
  void validate() const;
};

/// One coefficient array per input: degree 0 holds x_i, the eps_j slot holds
/// v^(j)_i, everything else is zero.
std::vector<WeilValue> seed(const SeedSpec& spec, const ShapePtr& shape);
std::vector<WeilValue> seed(const SeedSpec& spec, std::size_t max_dim = kDefaultMaxDim);

/// Weil-algebra semantics for the generic evaluator. Counts lifted
/// primitive applications.
struct WeilSemantics {
  using value_type = WeilValue;

  explicit WeilSemantics(ShapePtr s) : shape(std::move(s)) {}

  WeilValue constant(const Node& node);
  WeilValue unary(const Node& node, const WeilValue& a);
  WeilValue binary(const Node& node, const WeilValue& a, const WeilValue& b);

  ShapePtr shape;
  std::size_t lifted = 0;
};

struct DerivativeEntry {
  MultiIndex alpha;
  /// D^{|alpha|} f(x)[v1^{x alpha_1}, ..., vp^{x alpha_p}], one per output.
  std::vector<double> value;
  /// Raw coefficient of eps^alpha, one per output.
  std::vector<double> coeff;
};

/// Mixed directional derivatives read off one Weil evaluation:
///   Coeff_{eps^alpha} f(x_W) = D^{|alpha|} f(x)[...] / alpha!
class DerivativeTable {
 public:
  DerivativeTable(ShapePtr shape, SeedSpec spec, std::vector<WeilValue> raw,
                  std::size_t lifted_primitives);

  const WeilShape& shape() const noexcept { return *shape_; }
  const ShapePtr& shape_ptr() const noexcept { return shape_; }
  const SeedSpec& spec() const noexcept { return spec_; }
  std::size_t n_outputs() const noexcept { return raw_.size(); }
  const std::vector<WeilValue>& raw_coeffs() const noexcept { return raw_; }
  std::size_t lifted_primitives() const noexcept { return lifted_; }

  std::vector<double> coeff(const MultiIndex& alpha) const;
  /// alpha! * coeff(alpha), componentwise.
  std::vector<double> entry(const MultiIndex& alpha) const;
  double entry(const MultiIndex& alpha, std::size_t output) const;

  /// All multi-indices of the box, ordered by (|alpha|, lexicographic).
  std::vector<DerivativeEntry> entries() const;

 private:
  ShapePtr shape_;
  SeedSpec spec_;
  std::vector<WeilValue> raw_;
  std::size_t lifted_;
};

/// A single Weil-mode evaluation of `prog` at the seeded point.
DerivativeTable taylor_eval(const Program& prog, const SeedSpec& spec,
                            std::size_t max_dim = kDefaultMaxDim);

/// Taylor coefficients c_0..c_k of t -> f_output(x + t v) at t = 0.
std::vector<double> directional_taylor(const Program& prog, std::span<const double> x,
                                       std::span<const double> v, unsigned k,
                                       std::size_t output = 0);

/// Coefficients are computed in floating point, so an equality case of the
/// envelope may exceed its bound by rounding; this relative allowance
/// absorbs that and nothing more.
inline constexpr double kEnvelopeRoundoff = 1e-13;

struct EnvelopeRow {
  MultiIndex alpha;
  double coeff_norm;
  double bound;
  bool violation;
};

struct EnvelopeReport {
  std::vector<EnvelopeRow> rows;
  bool pass = true;
};

/// Checks ||c_alpha|| <= M_{|alpha|} / alpha! for every alpha. Requires one
/// bound per total degree present and unit-or-shorter directions; throws
/// Error otherwise.
EnvelopeReport coefficient_envelope(const DerivativeTable& table, std::span<const double> bounds,
                                    double roundoff = kEnvelopeRoundoff);

/// Cauchy tail estimate M_{k+1} rho^{k+1} / (k+1)!.
double tail_bound(double m_next, unsigned k, double rho);

nlohmann::ordered_json to_json(const DerivativeTable& table);
nlohmann::ordered_json to_json(const EnvelopeReport& report);

}  // namespace jetweil
