#include "jetweil/modes.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

namespace jetweil {

namespace instrumentation {
namespace {
std::atomic<std::uint64_t> g_tapes{0};
std::atomic<std::uint64_t> g_adjoint_slots{0};
}  // namespace

std::uint64_t tapes_created() noexcept { return g_tapes.load(); }
std::uint64_t adjoint_slots_allocated() noexcept { return g_adjoint_slots.load(); }
void reset_counters() noexcept {
  g_tapes.store(0);
  g_adjoint_slots.store(0);
}

}  // namespace instrumentation

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Tape

Tape::Tape(const Program& prog, std::span<const double> x) : prog_(&prog) {
  RealSemantics real;
  primals_ = evaluate_slots(prog, x, real);
  adjoints_.assign(primals_.size(), 0.0);
  instrumentation::g_tapes.fetch_add(1);
  instrumentation::g_adjoint_slots.fetch_add(adjoints_.size());
}

std::vector<double> Tape::outputs() const {
  std::vector<double> y;
  for (Slot s : prog_->outputs()) y.push_back(primals_[s]);
  return y;
}

void Tape::reset() noexcept {
  std::fill(adjoints_.begin(), adjoints_.end(), 0.0);
  visited_ = 0;
  swept_ = false;
}

std::vector<double> Tape::pullback(std::span<const double> omega) {
  const Program& prog = *prog_;
  if (omega.size() != prog.n_outputs()) {
    throw DimensionMismatch("covector has " + std::to_string(omega.size()) +
                            " components, program has " + std::to_string(prog.n_outputs()) +
                            " outputs");
  }
  if (swept_) throw Error("tape already swept; reset() before reuse");
  swept_ = true;

  const auto& outs = prog.outputs();
  for (std::size_t i = 0; i < outs.size(); ++i) adjoints_[outs[i]] += omega[i];

  const auto& nodes = prog.nodes();
  const std::size_t n = prog.n_inputs();
  visited_ = 0;
  for (std::size_t k = nodes.size(); k-- > 0;) {
    const Node& node = nodes[k];
    ++visited_;
    const double ubar = adjoints_[n + k];
    if (ubar == 0.0) continue;
    switch (node.arity()) {
      case 0:
        break;
      case 1: {
        const Slot a = node.operands[0];
        adjoints_[a] += unary_derivative(node.op, primals_[a], node.payload) * ubar;
        break;
      }
      default: {
        const Slot a = node.operands[0];
        const Slot b = node.operands[1];
        const auto d = binary_partials(node.op, primals_[a], primals_[b]);
        adjoints_[a] += d.da * ubar;
        adjoints_[b] += d.db * ubar;
        break;
      }
    }
  }
  return {adjoints_.begin(), adjoints_.begin() + static_cast<std::ptrdiff_t>(n)};
}

// ---------------------------------------------------------------------------
// Forward mode

Tangent TangentSemantics::unary(const Node& node, const Tangent& a) const {
  const double v = apply_unary(node.op, a.value, node.payload);
  const double d = unary_derivative(node.op, a.value, node.payload);
  return {v, d * a.dot};
}

Tangent TangentSemantics::binary(const Node& node, const Tangent& a, const Tangent& b) const {
  switch (node.op) {
    case PrimitiveKind::add: return {a.value + b.value, a.dot + b.dot};
    case PrimitiveKind::sub: return {a.value - b.value, a.dot - b.dot};
    case PrimitiveKind::mul: return {a.value * b.value, a.dot * b.value + a.value * b.dot};
    default: throw Error("TangentSemantics: unexpected binary primitive");
  }
}

TangentVector jvp(const Program& prog, std::span<const double> x, const TangentVector& v) {
  if (v.components.size() != prog.n_inputs() || x.size() != prog.n_inputs()) {
    throw DimensionMismatch("jvp: point and tangent must have the input dimension");
  }
  std::vector<Tangent> seeds(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) seeds[i] = {x[i], v.components[i]};
  TangentSemantics sem;
  const auto out = eval_generic<TangentSemantics>(prog, seeds, sem);
  TangentVector result;
  result.components.reserve(out.size());
  for (const Tangent& t : out) result.components.push_back(t.dot);
  return result;
}

CoVector vjp(const Program& prog, std::span<const double> x, const CoVector& omega) {
  Tape tape(prog, x);
  return {tape.pullback(omega.components)};
}

double pairing_residual(const Program& prog, std::span<const double> x, const TangentVector& v,
                        const CoVector& omega) {
  const CoVector xbar = vjp(prog, x, omega);
  const TangentVector ydot = jvp(prog, x, v);
  const double lhs = dot(xbar.components, v.components);
  const double rhs = dot(omega.components, ydot.components);
  return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
}

// ---------------------------------------------------------------------------
// Composition

Program compose(const Program& f, const Program& g) {
  if (f.n_outputs() != g.n_inputs()) {
    throw DimensionMismatch("compose: f has " + std::to_string(f.n_outputs()) +
                            " outputs but g has " + std::to_string(g.n_inputs()) + " inputs");
  }
  ProgramBuilder b(f.input_names());
  // f keeps its slot numbering
  for (const Node& node : f.nodes()) b.add(node.op, node.args(), node.payload);

  std::vector<Slot> g_slot(g.slot_count());
  for (std::size_t i = 0; i < g.n_inputs(); ++i) g_slot[i] = f.outputs()[i];
  for (std::size_t k = 0; k < g.node_count(); ++k) {
    const Node& node = g.nodes()[k];
    std::array<Slot, 2> ops{};
    const auto args = node.args();
    for (std::size_t j = 0; j < args.size(); ++j) ops[j] = g_slot[args[j]];
    g_slot[g.n_inputs() + k] =
        b.add(node.op, std::span<const Slot>(ops.data(), args.size()), node.payload);
  }
  for (Slot s : g.outputs()) b.output(g_slot[s]);
  return std::move(b).build();
}

double compose_vjp_check(const Program& f, const Program& g, std::span<const double> x,
                         const CoVector& omega) {
  const Program gf = compose(f, g);
  const CoVector direct = vjp(gf, x, omega);
  const std::vector<double> y = eval_primal(f, x);
  const CoVector chained = vjp(f, x, vjp(g, y, omega));
  std::vector<double> diff(direct.components.size());
  for (std::size_t i = 0; i < diff.size(); ++i) {
    diff[i] = direct.components[i] - chained.components[i];
  }
  return norm2(diff) / std::max(1.0, norm2(chained.components));
}

}  // namespace jetweil
