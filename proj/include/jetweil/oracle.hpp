#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "jetweil/jet.hpp"
#include "jetweil/program.hpp"

namespace jetweil {

/// Exact multivariate polynomial over the program inputs, keyed by exponent
/// vector. Zero coefficients are never stored.
class SparsePoly {
 public:
  using Exponents = std::vector<unsigned>;

  explicit SparsePoly(std::size_t n_vars) : n_(n_vars) {}

  static SparsePoly constant(std::size_t n_vars, double c);
  static SparsePoly variable(std::size_t n_vars, std::size_t i);

  std::size_t n_vars() const noexcept { return n_; }
  const std::map<Exponents, double>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  unsigned total_degree() const noexcept;
  double coefficient(const Exponents& e) const;

  SparsePoly operator+(const SparsePoly& o) const;
  SparsePoly operator-(const SparsePoly& o) const;
  SparsePoly operator*(const SparsePoly& o) const;
  SparsePoly operator-() const;
  SparsePoly pow(unsigned e) const;

  /// d^alpha / dx^alpha.
  SparsePoly partial(std::span<const unsigned> alpha) const;
  double evaluate(std::span<const double> x) const;

  bool operator==(const SparsePoly&) const = default;
  std::string to_string() const;

 private:
  void accumulate(const Exponents& e, double c);

  std::size_t n_;
  std::map<Exponents, double> terms_;
};

/// One polynomial per output. Only add, sub, mul, neg, const and pow with a
/// non-negative integer exponent are accepted; anything else is Unsupported.
std::vector<SparsePoly> symbolic_eval(const Program& prog);

/// The alpha-th partial of each output polynomial, evaluated at x.
std::vector<double> symbolic_partial(const std::vector<SparsePoly>& polys,
                                     std::span<const unsigned> alpha, std::span<const double> x);

/// Default step u^(1/(order+2)) * (||x||_inf + 1).
double default_fd_step(std::span<const double> x, unsigned order);

/// Central-difference estimate of the alpha mixed partial (per output), as a
/// tensor product of second-order-accurate 1-D stencils. |alpha| <= 4.
/// h <= 0 selects the default step.
std::vector<double> finite_difference(const Program& prog, std::span<const double> x,
                                      std::span<const unsigned> alpha, double h = 0.0);

/// Same stencil applied to t -> f(x + sum_j t_j v^(j)): estimates
/// D^{|alpha|} f(x)[v1^{x alpha_1}, ...].
std::vector<double> finite_difference_directional(const Program& prog, std::span<const double> x,
                                                  const std::vector<std::vector<double>>& dirs,
                                                  std::span<const unsigned> alpha,
                                                  double h = 0.0);

/// Taylor coefficients c_0..c_order of t -> f(x + t d), one row per output.
/// Propagates truncated univariate series with the classical ODE recurrences
/// of each primitive; shares no arithmetic with the Weil engine.
std::vector<std::vector<double>> univariate_taylor(const Program& prog, std::span<const double> x,
                                                   std::span<const double> d, unsigned order);

std::uint64_t binomial(unsigned n, unsigned k);

struct ScheduleCount {
  unsigned p = 0;
  unsigned k = 0;
  std::uint64_t passes = 0;
};

struct NestedResult {
  /// Entries for every |alpha| <= k, sorted by (|alpha|, lexicographic).
  std::vector<DerivativeEntry> entries;
  ScheduleCount count;
  /// Largest relative residual of the per-order interpolation solves.
  double residual = 0.0;
  /// max |pivot| / min |pivot| over the solves.
  double pivot_ratio = 1.0;
  bool ill_conditioned = false;
  std::string warning;
};

/// Recovers every mixed directional derivative of order <= k from
/// univariate samples along d_t = sum_j t_j v^(j), t on the simplex lattice
/// |t| = l, one sample per pass. Order 0 is the primal and order 1 uses
/// jvp. Passes total C(p+k, k).
NestedResult nested_jvp_schedule(const Program& prog, std::span<const double> x,
                                 const std::vector<std::vector<double>>& directions, unsigned k);

/// Multi-indices of total degree exactly l over p directions, lexicographic.
std::vector<std::vector<unsigned>> compositions(unsigned p, unsigned l);

}  // namespace jetweil
