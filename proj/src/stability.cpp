#include "jetweil/stability.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace jetweil {

namespace {

constexpr double kKappaCap = 1.0 / kUnitRoundoff;

ConditionEstimate capped(double kappa) {
  if (!std::isfinite(kappa) || kappa > kKappaCap) return {kKappaCap, true};
  return {kappa, false};
}

// (|a| + |b|) / |a +- b|; 1 when every term vanishes.
ConditionEstimate cancellation(double a, double b, double result) {
  const double num = std::abs(a) + std::abs(b);
  if (num == 0.0) return {1.0, false};
  if (result == 0.0) return {kKappaCap, true};
  return capped(num / std::abs(result));
}

}  // namespace

double adjoint_lipschitz(const Node& node, std::span<const double> operands) {
  switch (node.op) {
    case PrimitiveKind::const_val:
      return 0.0;
    case PrimitiveKind::add:
    case PrimitiveKind::sub:
      return std::sqrt(2.0);
    case PrimitiveKind::mul:
      return std::hypot(operands[0], operands[1]);
    default:
      return std::abs(unary_derivative(node.op, operands[0], node.payload));
  }
}

ConditionEstimate condition_estimate(const Node& node, std::span<const double> operands) {
  switch (node.op) {
    case PrimitiveKind::const_val:
      return {0.0, false};
    case PrimitiveKind::add:
      return cancellation(operands[0], operands[1], operands[0] + operands[1]);
    case PrimitiveKind::sub:
      return cancellation(operands[0], operands[1], operands[0] - operands[1]);
    case PrimitiveKind::mul:
    case PrimitiveKind::neg:
    case PrimitiveKind::recip:
      return {1.0, false};
    case PrimitiveKind::sqrt:
      return {0.5, false};
    case PrimitiveKind::pow_const:
      return {std::abs(node.payload), false};
    case PrimitiveKind::exp:
      return capped(std::abs(operands[0]));
    case PrimitiveKind::log: {
      const double l = std::log(operands[0]);
      if (l == 0.0) return {kKappaCap, true};
      return capped(1.0 / std::abs(l));
    }
    case PrimitiveKind::sin: {
      const double a = operands[0];
      if (a == 0.0) return {1.0, false};
      const double s = std::sin(a);
      if (s == 0.0) return {kKappaCap, true};
      return capped(std::abs(a * std::cos(a) / s));
    }
    case PrimitiveKind::cos: {
      const double a = operands[0];
      const double c = std::cos(a);
      if (c == 0.0) return {kKappaCap, true};
      return capped(std::abs(a * std::sin(a) / c));
    }
    case PrimitiveKind::tanh: {
      const double a = operands[0];
      if (a == 0.0) return {1.0, false};
      const double t = std::tanh(a);
      if (t == 0.0) return {kKappaCap, true};
      return capped(std::abs(a * (1.0 - t * t) / t));
    }
    case PrimitiveKind::div:
      break;
  }
  throw Error("condition_estimate: div must be desugared before evaluation");
}

double relative_error_term(double kappa, double delta_const) {
  return delta_const * kUnitRoundoff * kappa;
}

double reverse_step_norm(const Node& node, std::span<const double> operands) {
  double t = 0.0;
  switch (node.arity()) {
    case 0:
      break;
    case 1:
      t = std::abs(unary_derivative(node.op, operands[0], node.payload));
      break;
    default: {
      const auto d = binary_partials(node.op, operands[0], operands[1]);
      // a repeated operand accumulates into one slot
      if (node.operands[0] == node.operands[1]) {
        t = std::abs(d.da + d.db);
      } else {
        t = std::hypot(d.da, d.db);
      }
      break;
    }
  }
  return 0.5 * (t + std::sqrt(t * t + 4.0));
}

StabilityReport stability_bound(const Program& prog, std::span<const double> x,
                                const CoVector& omega, const StabilityOptions& opts) {
  Tape tape(prog, x);
  const auto xbar = tape.pullback(omega.components);
  const auto primals = tape.primals();

  StabilityReport report;
  report.omega_norm = norm2(omega.components);
  report.observed_norm = norm2(xbar);

  std::map<Slot, std::size_t> multiplicity;
  std::size_t max_mult = 1;
  for (Slot s : prog.outputs()) max_mult = std::max(max_mult, ++multiplicity[s]);
  report.seed_factor = std::sqrt(static_cast<double>(max_mult));

  double lip = 1.0;
  double bound = 1.0;
  const auto& nodes = prog.nodes();
  report.per_node.reserve(nodes.size());
  for (std::size_t k = nodes.size(); k-- > 0;) {
    const Node& node = nodes[k];
    double ops[2] = {0.0, 0.0};
    const auto args = node.args();
    for (std::size_t j = 0; j < args.size(); ++j) ops[j] = primals[args[j]];
    const std::span<const double> operands(ops, args.size());

    StabilityRow row;
    row.node = k;
    row.op = node.op;
    row.lipschitz = adjoint_lipschitz(node, operands);
    row.step_norm = reverse_step_norm(node, operands);
    const ConditionEstimate c = condition_estimate(node, operands);
    row.kappa = c.kappa;
    row.singular = c.singular;
    row.delta = relative_error_term(c.kappa, opts.delta_const);

    lip *= row.lipschitz;
    bound *= (1.0 + row.delta) * row.step_norm;
    report.first_order_error += row.delta;
    report.per_node.push_back(row);
  }
  report.lipschitz_product = lip * report.omega_norm;
  report.product_bound = report.seed_factor * bound * report.omega_norm;
  return report;
}

nlohmann::ordered_json to_json(const StabilityReport& report) {
  nlohmann::ordered_json j;
  auto rows = nlohmann::ordered_json::array();
  for (const StabilityRow& r : report.per_node) {
    nlohmann::ordered_json row;
    row["node"] = r.node;
    row["op"] = std::string(keyword(r.op));
    row["L"] = r.lipschitz;
    row["step_norm"] = r.step_norm;
    row["kappa"] = r.kappa;
    row["delta"] = r.delta;
    row["singular"] = r.singular;
    rows.push_back(std::move(row));
  }
  j["per_node"] = std::move(rows);
  j["omega_norm"] = report.omega_norm;
  j["seed_factor"] = report.seed_factor;
  j["lipschitz_product"] = report.lipschitz_product;
  j["product_bound"] = report.product_bound;
  j["observed_norm"] = report.observed_norm;
  j["first_order_error"] = report.first_order_error;
  j["holds"] = report.holds();
  return j;
}

}  // namespace jetweil
