#include "jetweil/evaluate.hpp"

#include <cmath>
#include <string>

namespace jetweil {

namespace {

// shared by both evaluators so that they agree bit-for-bit
double real_step(const Node& node, double a, double b) {
  switch (node.arity()) {
    case 0: return node.payload;
    case 1: return apply_unary(node.op, a, node.payload);
    default: return apply_binary(node.op, a, b);
  }
}

}  // namespace

double RealSemantics::unary(const Node& node, double a) const {
  const double v = real_step(node, a, 0.0);
  if (!std::isfinite(v)) throw NumericOverflow(0, v);
  return v;
}

double RealSemantics::binary(const Node& node, double a, double b) const {
  const double v = real_step(node, a, b);
  if (!std::isfinite(v)) throw NumericOverflow(0, v);
  return v;
}

std::vector<double> eval_primal_slots(const Program& prog, std::span<const double> x) {
  if (x.size() != prog.n_inputs()) {
    throw DimensionMismatch("expected " + std::to_string(prog.n_inputs()) + " inputs, got " +
                            std::to_string(x.size()));
  }
  std::vector<double> u(prog.slot_count());
  std::copy(x.begin(), x.end(), u.begin());
  const auto& nodes = prog.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Node& node = nodes[k];
    const double a = node.arity() > 0 ? u[node.operands[0]] : 0.0;
    const double b = node.arity() > 1 ? u[node.operands[1]] : 0.0;
    double v;
    try {
      v = real_step(node, a, b);
    } catch (const DomainError& e) {
      throw e.at_node(k);
    }
    if (!std::isfinite(v)) throw NumericOverflow(k, v);
    u[prog.n_inputs() + k] = v;
  }
  return u;
}

std::vector<double> eval_primal(const Program& prog, std::span<const double> x) {
  const auto u = eval_primal_slots(prog, x);
  std::vector<double> y;
  y.reserve(prog.n_outputs());
  for (Slot s : prog.outputs()) y.push_back(u[s]);
  return y;
}

}  // namespace jetweil
