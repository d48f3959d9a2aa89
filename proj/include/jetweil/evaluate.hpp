#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <vector>

#include "jetweil/error.hpp"
#include "jetweil/program.hpp"

namespace jetweil {

/// Scalar semantics for the generic evaluator. Primal evaluation, forward
/// tangents, Weil lifting, and tape recording are all instances.
template <class S>
concept ScalarSemantics = requires(S& sem, const Node& node, const typename S::value_type& a) {
  typename S::value_type;
  { sem.constant(node) } -> std::convertible_to<typename S::value_type>;
  { sem.unary(node, a) } -> std::convertible_to<typename S::value_type>;
  { sem.binary(node, a, a) } -> std::convertible_to<typename S::value_type>;
};

/// Evaluates every slot of `prog` in topological order. Slot i < n_inputs is
/// inputs[i]; the rest are node results. DomainErrors raised by the semantics
/// and NumericOverflow are re-thrown annotated with the node index.
template <ScalarSemantics S>
std::vector<typename S::value_type> evaluate_slots(const Program& prog,
                                                   std::span<const typename S::value_type> inputs,
                                                   S& sem) {
  using V = typename S::value_type;
  if (inputs.size() != prog.n_inputs()) {
    throw DimensionMismatch("expected " + std::to_string(prog.n_inputs()) + " inputs, got " +
                            std::to_string(inputs.size()));
  }
  std::vector<V> slots;
  slots.reserve(prog.slot_count());
  slots.insert(slots.end(), inputs.begin(), inputs.end());

  const auto& nodes = prog.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Node& node = nodes[k];
    try {
      switch (node.arity()) {
        case 0:
          slots.push_back(sem.constant(node));
          break;
        case 1:
          slots.push_back(sem.unary(node, slots[node.operands[0]]));
          break;
        default:
          slots.push_back(sem.binary(node, slots[node.operands[0]], slots[node.operands[1]]));
          break;
      }
    } catch (const DomainError& e) {
      if (e.node()) throw;
      throw e.at_node(k);
    } catch (const NumericOverflow& e) {
      throw NumericOverflow(k, e.value());
    }
  }
  return slots;
}

template <ScalarSemantics S>
std::vector<typename S::value_type> eval_generic(const Program& prog,
                                                 std::span<const typename S::value_type> inputs,
                                                 S& sem) {
  auto slots = evaluate_slots(prog, inputs, sem);
  std::vector<typename S::value_type> out;
  out.reserve(prog.n_outputs());
  for (Slot s : prog.outputs()) out.push_back(slots[s]);
  return out;
}

/// Plain real semantics. Non-finite results raise NumericOverflow.
struct RealSemantics {
  using value_type = double;

  double constant(const Node& node) const { return node.payload; }
  double unary(const Node& node, double a) const;
  double binary(const Node& node, double a, double b) const;
};

/// Reference primal evaluator: a direct loop over the nodes, independent of
/// the generic evaluator. Throws DomainError (with node index) or
/// NumericOverflow.
std::vector<double> eval_primal(const Program& prog, std::span<const double> x);

/// All slot values of a primal evaluation, as eval_primal computes them.
std::vector<double> eval_primal_slots(const Program& prog, std::span<const double> x);

}  // namespace jetweil
