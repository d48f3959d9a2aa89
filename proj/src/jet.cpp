#include "jetweil/jet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jetweil/modes.hpp"

namespace jetweil {

SeedSpec SeedSpec::basis(std::vector<double> base, unsigned cap) {
  std::vector<unsigned> caps(base.size(), cap);
  return basis(std::move(base), std::move(caps));
}

SeedSpec SeedSpec::basis(std::vector<double> base, std::vector<unsigned> caps) {
  SeedSpec spec;
  const std::size_t n = base.size();
  spec.directions.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) spec.directions[j][j] = 1.0;
  spec.base = std::move(base);
  spec.caps = std::move(caps);
  return spec;
}

void SeedSpec::validate() const {
  if (directions.size() != caps.size()) {
    throw DimensionMismatch("seed has " + std::to_string(directions.size()) +
                            " directions but " + std::to_string(caps.size()) + " caps");
  }
  for (const auto& v : directions) {
    if (v.size() != base.size()) {
      throw DimensionMismatch("direction length " + std::to_string(v.size()) +
                              " does not match base dimension " + std::to_string(base.size()));
    }
  }
}

std::vector<WeilValue> seed(const SeedSpec& spec, const ShapePtr& shape) {
  spec.validate();
  if (shape->caps() != spec.caps) throw IncompatibleShapes("seed caps differ from shape caps");
  const auto& strides = shape->strides();
  std::vector<WeilValue> out;
  out.reserve(spec.base.size());
  for (std::size_t i = 0; i < spec.base.size(); ++i) {
    std::vector<double> c(shape->dim(), 0.0);
    c[0] = spec.base[i];
    for (std::size_t j = 0; j < spec.directions.size(); ++j) {
      c[strides[j]] = spec.directions[j][i];
    }
    out.emplace_back(shape, std::move(c));
  }
  return out;
}

std::vector<WeilValue> seed(const SeedSpec& spec, std::size_t max_dim) {
  spec.validate();
  return seed(spec, make_shape(spec.caps, max_dim));
}

// ---------------------------------------------------------------------------

WeilValue WeilSemantics::constant(const Node& node) {
  ++lifted;
  return WeilValue::constant(shape, node.payload);
}

WeilValue WeilSemantics::unary(const Node& node, const WeilValue& a) {
  ++lifted;
  return weil_unary(node.op, a, node.payload);
}

WeilValue WeilSemantics::binary(const Node& node, const WeilValue& a, const WeilValue& b) {
  ++lifted;
  switch (node.op) {
    case PrimitiveKind::add: return weil_add(a, b);
    case PrimitiveKind::sub: return weil_sub(a, b);
    case PrimitiveKind::mul: return weil_mul(a, b);
    default: throw Error("WeilSemantics: unexpected binary primitive");
  }
}

// ---------------------------------------------------------------------------

DerivativeTable::DerivativeTable(ShapePtr shape, SeedSpec spec, std::vector<WeilValue> raw,
                                 std::size_t lifted_primitives)
    : shape_(std::move(shape)),
      spec_(std::move(spec)),
      raw_(std::move(raw)),
      lifted_(lifted_primitives) {}

std::vector<double> DerivativeTable::coeff(const MultiIndex& alpha) const {
  const std::size_t idx = shape_->index(alpha);
  std::vector<double> c;
  c.reserve(raw_.size());
  for (const WeilValue& w : raw_) c.push_back(w.coeffs()[idx]);
  return c;
}

std::vector<double> DerivativeTable::entry(const MultiIndex& alpha) const {
  auto c = coeff(alpha);
  const double f = alpha.factorial();
  for (double& v : c) v *= f;
  return c;
}

double DerivativeTable::entry(const MultiIndex& alpha, std::size_t output) const {
  return raw_.at(output).coeffs()[shape_->index(alpha)] * alpha.factorial();
}

std::vector<DerivativeEntry> DerivativeTable::entries() const {
  std::vector<DerivativeEntry> out;
  out.reserve(shape_->dim());
  for (std::size_t idx = 0; idx < shape_->dim(); ++idx) {
    DerivativeEntry e;
    e.alpha = shape_->multi_index(idx);
    const double f = e.alpha.factorial();
    for (const WeilValue& w : raw_) {
      e.coeff.push_back(w.coeffs()[idx]);
      e.value.push_back(w.coeffs()[idx] * f);
    }
    out.push_back(std::move(e));
  }
  std::stable_sort(out.begin(), out.end(), [](const DerivativeEntry& a, const DerivativeEntry& b) {
    return graded_less(a.alpha, b.alpha);
  });
  return out;
}

DerivativeTable taylor_eval(const Program& prog, const SeedSpec& spec, std::size_t max_dim) {
  spec.validate();
  if (spec.base.size() != prog.n_inputs()) {
    throw DimensionMismatch("base point has " + std::to_string(spec.base.size()) +
                            " components, program has " + std::to_string(prog.n_inputs()) +
                            " inputs");
  }
  ShapePtr shape = make_shape(spec.caps, max_dim);
  const auto inputs = seed(spec, shape);
  WeilSemantics sem(shape);
  auto outputs = eval_generic<WeilSemantics>(prog, inputs, sem);
  return DerivativeTable(std::move(shape), spec, std::move(outputs), sem.lifted);
}

std::vector<double> directional_taylor(const Program& prog, std::span<const double> x,
                                       std::span<const double> v, unsigned k,
                                       std::size_t output) {
  if (k < 1) throw Error("directional_taylor: order must be at least 1");
  SeedSpec spec;
  spec.base.assign(x.begin(), x.end());
  spec.directions.emplace_back(v.begin(), v.end());
  spec.caps = {k};
  const DerivativeTable table = taylor_eval(prog, spec);
  const auto c = table.raw_coeffs().at(output).coeffs();
  return {c.begin(), c.end()};
}

// ---------------------------------------------------------------------------

EnvelopeReport coefficient_envelope(const DerivativeTable& table, std::span<const double> bounds,
                                    double roundoff) {
  const WeilShape& shape = table.shape();
  if (bounds.size() <= shape.max_degree()) {
    throw Error("coefficient_envelope: missing bound for total degree " +
                std::to_string(bounds.size()) + " (need M_0..M_" +
                std::to_string(shape.max_degree()) + ")");
  }
  constexpr double kUnit = std::numeric_limits<double>::epsilon() / 2;
  for (std::size_t j = 0; j < table.spec().directions.size(); ++j) {
    if (norm2(table.spec().directions[j]) > 1.0 + 4 * kUnit) {
      throw Error("coefficient_envelope: direction " + std::to_string(j) +
                  " has norm > 1; the envelope assumes unit directions");
    }
  }
  for (double m : bounds) {
    if (!(m >= 0.0)) throw Error("coefficient_envelope: bounds must be non-negative");
  }

  EnvelopeReport report;
  for (const DerivativeEntry& e : table.entries()) {
    EnvelopeRow row;
    row.alpha = e.alpha;
    row.coeff_norm = norm2(e.coeff);
    row.bound = bounds[e.alpha.total_degree()] / e.alpha.factorial();
    row.violation = row.coeff_norm > row.bound * (1.0 + roundoff);
    report.pass = report.pass && !row.violation;
    report.rows.push_back(std::move(row));
  }
  return report;
}

double tail_bound(double m_next, unsigned k, double rho) {
  if (!(rho > 0.0) || !(m_next >= 0.0)) {
    throw Error("tail_bound: need rho > 0 and M >= 0");
  }
  double t = m_next;
  for (unsigned i = 1; i <= k + 1; ++i) t *= rho / static_cast<double>(i);
  return t;
}

// ---------------------------------------------------------------------------

nlohmann::ordered_json to_json(const DerivativeTable& table) {
  nlohmann::ordered_json j;
  j["caps"] = table.spec().caps;
  j["base"] = table.spec().base;
  j["directions"] = table.spec().directions;
  auto entries = nlohmann::ordered_json::array();
  for (const DerivativeEntry& e : table.entries()) {
    nlohmann::ordered_json row;
    row["alpha"] = e.alpha.exponents;
    row["value"] = e.value;
    row["coeff"] = e.coeff;
    entries.push_back(std::move(row));
  }
  j["entries"] = std::move(entries);
  return j;
}

nlohmann::ordered_json to_json(const EnvelopeReport& report) {
  nlohmann::ordered_json j;
  j["pass"] = report.pass;
  auto rows = nlohmann::ordered_json::array();
  for (const EnvelopeRow& r : report.rows) {
    nlohmann::ordered_json row;
    row["alpha"] = r.alpha.exponents;
    row["coeff_norm"] = r.coeff_norm;
    row["bound"] = r.bound;
    row["violation"] = r.violation;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

}  // namespace jetweil
