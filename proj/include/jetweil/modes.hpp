#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "jetweil/evaluate.hpp"
#include "jetweil/program.hpp"

namespace jetweil {

/// Counters for adjoint storage, so callers can assert that a computation
/// ran without a reverse tape. Process-wide and thread-safe.
namespace instrumentation {

std::uint64_t tapes_created() noexcept;
/// Adjoint accumulators allocated across all tapes.
std::uint64_t adjoint_slots_allocated() noexcept;
void reset_counters() noexcept;

}  // namespace instrumentation

/// An element of T_x R^n (or of T_{f(x)} R^m): pushed forward by jvp.
struct TangentVector {
  std::vector<double> components;
};

/// An element of the cotangent space: pulled back by vjp.
struct CoVector {
  std::vector<double> components;
};

/// Primal intermediates of one forward sweep plus one adjoint accumulator
/// per slot. Single use: a second pullback needs reset() first.
class Tape {
 public:
  /// Records the forward sweep at `x`.
  Tape(const Program& prog, std::span<const double> x);

  const Program& program() const noexcept { return *prog_; }
  std::span<const double> primals() const noexcept { return primals_; }
  std::span<const double> adjoints() const noexcept { return adjoints_; }
  std::vector<double> outputs() const;

  /// Seeds the output adjoints with omega and runs the reverse sweep,
  ///   u = a + b   =>  a_bar += u_bar, b_bar += u_bar
  ///   u = a * b   =>  a_bar += b u_bar, b_bar += a u_bar
  ///   u = phi(a)  =>  a_bar += phi'(a) u_bar
  /// returning the input adjoints J^T omega.
  std::vector<double> pullback(std::span<const double> omega);

  void reset() noexcept;

  /// Nodes processed by the last reverse sweep.
  std::size_t nodes_visited() const noexcept { return visited_; }

 private:
  const Program* prog_;
  std::vector<double> primals_;
  std::vector<double> adjoints_;
  std::size_t visited_ = 0;
  bool swept_ = false;
};

/// (value, tangent) pair propagated by forward mode.
struct Tangent {
  double value = 0.0;
  double dot = 0.0;
};

struct TangentSemantics {
  using value_type = Tangent;

  Tangent constant(const Node& node) const { return {node.payload, 0.0}; }
  Tangent unary(const Node& node, const Tangent& a) const;
  Tangent binary(const Node& node, const Tangent& a, const Tangent& b) const;
};

/// J_f(x) v, by propagating tangent pairs; the Jacobian is never formed.
TangentVector jvp(const Program& prog, std::span<const double> x, const TangentVector& v);

/// J_f(x)^T omega, via a recorded Tape and one reverse sweep.
CoVector vjp(const Program& prog, std::span<const double> x, const CoVector& omega);

/// |<vjp(omega), v> - <omega, jvp(v)>| / max(1, |<omega, jvp(v)>|).
double pairing_residual(const Program& prog, std::span<const double> x, const TangentVector& v,
                        const CoVector& omega);

/// Syntactic composition g o f: g's inputs are wired to f's outputs.
Program compose(const Program& f, const Program& g);

/// Relative 2-norm discrepancy between vjp(g o f, x, omega) and
/// vjp(f, x, vjp(g, f(x), omega)).
double compose_vjp_check(const Program& f, const Program& g, std::span<const double> x,
                         const CoVector& omega);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

}  // namespace jetweil
