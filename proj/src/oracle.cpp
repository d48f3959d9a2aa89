#include "jetweil/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "jetweil/evaluate.hpp"
#include "jetweil/modes.hpp"

namespace jetweil {

// ---------------------------------------------------------------------------
// SparsePoly

SparsePoly SparsePoly::constant(std::size_t n_vars, double c) {
  SparsePoly p(n_vars);
  p.accumulate(Exponents(n_vars, 0), c);
  return p;
}

SparsePoly SparsePoly::variable(std::size_t n_vars, std::size_t i) {
  if (i >= n_vars) throw DimensionMismatch("SparsePoly::variable: index out of range");
  SparsePoly p(n_vars);
  Exponents e(n_vars, 0);
  e[i] = 1;
  p.accumulate(e, 1.0);
  return p;
}

void SparsePoly::accumulate(const Exponents& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

unsigned SparsePoly::total_degree() const noexcept {
  unsigned d = 0;
  for (const auto& [e, c] : terms_) {
    unsigned s = 0;
    for (unsigned v : e) s += v;
    d = std::max(d, s);
  }
  return d;
}

double SparsePoly::coefficient(const Exponents& e) const {
  const auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

SparsePoly SparsePoly::operator+(const SparsePoly& o) const {
  if (o.n_ != n_) throw DimensionMismatch("SparsePoly: variable count mismatch");
  SparsePoly r = *this;
  for (const auto& [e, c] : o.terms_) r.accumulate(e, c);
  return r;
}

SparsePoly SparsePoly::operator-(const SparsePoly& o) const { return *this + (-o); }

SparsePoly SparsePoly::operator-() const {
  SparsePoly r = *this;
  for (auto& [e, c] : r.terms_) c = -c;
  return r;
}

SparsePoly SparsePoly::operator*(const SparsePoly& o) const {
  if (o.n_ != n_) throw DimensionMismatch("SparsePoly: variable count mismatch");
  SparsePoly r(n_);
  Exponents e(n_);
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : o.terms_) {
      for (std::size_t i = 0; i < n_; ++i) e[i] = ea[i] + eb[i];
      r.accumulate(e, ca * cb);
    }
  }
  return r;
}

SparsePoly SparsePoly::pow(unsigned e) const {
  SparsePoly r = constant(n_, 1.0);
  for (unsigned i = 0; i < e; ++i) r = r * *this;
  return r;
}

SparsePoly SparsePoly::partial(std::span<const unsigned> alpha) const {
  if (alpha.size() != n_) throw DimensionMismatch("SparsePoly::partial: multi-index length");
  SparsePoly r(n_);
  Exponents e(n_);
  for (const auto& [ea, c] : terms_) {
    double coeff = c;
    bool vanishes = false;
    for (std::size_t i = 0; i < n_ && !vanishes; ++i) {
      if (alpha[i] > ea[i]) {
        vanishes = true;
        break;
      }
      // falling factorial ea_i (ea_i - 1) ... (ea_i - alpha_i + 1)
      for (unsigned j = 0; j < alpha[i]; ++j) coeff *= static_cast<double>(ea[i] - j);
      e[i] = ea[i] - alpha[i];
    }
    if (!vanishes) r.accumulate(e, coeff);
  }
  return r;
}

double SparsePoly::evaluate(std::span<const double> x) const {
  if (x.size() != n_) throw DimensionMismatch("SparsePoly::evaluate: point dimension");
  double s = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (std::size_t i = 0; i < n_; ++i) {
      for (unsigned j = 0; j < e[i]; ++j) t *= x[i];
    }
    s += t;
  }
  return s;
}

std::string SparsePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << c;
    for (std::size_t i = 0; i < n_; ++i) {
      if (e[i] == 0) continue;
      os << "*x" << i;
      if (e[i] > 1) os << '^' << e[i];
    }
  }
  return os.str();
}

std::vector<SparsePoly> symbolic_eval(const Program& prog) {
  const std::size_t n = prog.n_inputs();
  std::vector<SparsePoly> slots;
  slots.reserve(prog.slot_count());
  for (std::size_t i = 0; i < n; ++i) slots.push_back(SparsePoly::variable(n, i));
  for (const Node& node : prog.nodes()) {
    const auto a = [&]() -> const SparsePoly& { return slots[node.operands[0]]; };
    const auto b = [&]() -> const SparsePoly& { return slots[node.operands[1]]; };
    switch (node.op) {
      case PrimitiveKind::const_val: slots.push_back(SparsePoly::constant(n, node.payload)); break;
      case PrimitiveKind::add: slots.push_back(a() + b()); break;
      case PrimitiveKind::sub: slots.push_back(a() - b()); break;
      case PrimitiveKind::mul: slots.push_back(a() * b()); break;
      case PrimitiveKind::neg: slots.push_back(-a()); break;
      case PrimitiveKind::pow_const:
        if (!is_integer_exponent(node.payload) || node.payload < 0) {
          throw Unsupported("symbolic_eval: pow exponent " + std::to_string(node.payload) +
                            " is not a non-negative integer");
        }
        slots.push_back(a().pow(static_cast<unsigned>(node.payload)));
        break;
      default:
        throw Unsupported("symbolic_eval: primitive '" + std::string(keyword(node.op)) +
                          "' is not polynomial");
    }
  }
  std::vector<SparsePoly> out;
  for (Slot s : prog.outputs()) out.push_back(slots[s]);
  return out;
}

std::vector<double> symbolic_partial(const std::vector<SparsePoly>& polys,
                                     std::span<const unsigned> alpha, std::span<const double> x) {
  std::vector<double> out;
  out.reserve(polys.size());
  for (const SparsePoly& p : polys) out.push_back(p.partial(alpha).evaluate(x));
  return out;
}

// ---------------------------------------------------------------------------
// Finite differences

namespace {

struct Stencil {
  std::vector<std::pair<int, double>> taps;
};

const Stencil& central_stencil(unsigned order) {
  static const Stencil kStencils[] = {
      {{{0, 1.0}}},
      {{{-1, -0.5}, {1, 0.5}}},
      {{{-1, 1.0}, {0, -2.0}, {1, 1.0}}},
      {{{-2, -0.5}, {-1, 1.0}, {1, -1.0}, {2, 0.5}}},
      {{{-2, 1.0}, {-1, -4.0}, {0, 6.0}, {1, -4.0}, {2, 1.0}}},
  };
  return kStencils[order];
}

// Tensor-product stencil over the p parameters of t -> f(x + sum t_j v_j).
std::vector<double> stencil_sum(const Program& prog, std::span<const double> x,
                                const std::vector<std::vector<double>>& dirs,
                                std::span<const unsigned> alpha, double h) {
  unsigned order = 0;
  for (unsigned a : alpha) order += a;
  if (order > 4) {
    throw Unsupported("finite_difference: order " + std::to_string(order) +
                      " exceeds 4; higher stencils are meaningless in double precision");
  }
  if (h <= 0.0) h = default_fd_step(x, order);

  const std::size_t p = alpha.size();
  std::vector<std::size_t> pos(p, 0);
  std::vector<double> acc(prog.n_outputs(), 0.0);
  std::vector<double> pt(x.size());
  bool done = false;
  while (!done) {
    double w = 1.0;
    std::copy(x.begin(), x.end(), pt.begin());
    for (std::size_t j = 0; j < p; ++j) {
      const auto& [off, wt] = central_stencil(alpha[j]).taps[pos[j]];
      w *= wt;
      if (off == 0) continue;
      for (std::size_t i = 0; i < x.size(); ++i) pt[i] += off * h * dirs[j][i];
    }
    const auto y = eval_primal(prog, pt);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += w * y[i];

    done = true;
    for (std::size_t j = p; j-- > 0;) {
      if (++pos[j] < central_stencil(alpha[j]).taps.size()) {
        done = false;
        break;
      }
      pos[j] = 0;
    }
  }
  const double scale = std::pow(h, static_cast<double>(order));
  for (double& v : acc) v /= scale;
  return acc;
}

}  // namespace

double default_fd_step(std::span<const double> x, unsigned order) {
  double xmax = 0.0;
  for (double v : x) xmax = std::max(xmax, std::abs(v));
  const double u = std::numeric_limits<double>::epsilon() / 2;
  return std::pow(u, 1.0 / (order + 2.0)) * (xmax + 1.0);
}

std::vector<double> finite_difference(const Program& prog, std::span<const double> x,
                                      std::span<const unsigned> alpha, double h) {
  if (alpha.size() != x.size() || x.size() != prog.n_inputs()) {
    throw DimensionMismatch("finite_difference: alpha, x and program inputs must agree");
  }
  std::vector<std::vector<double>> dirs(x.size(), std::vector<double>(x.size(), 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) dirs[i][i] = 1.0;
  return stencil_sum(prog, x, dirs, alpha, h);
}

std::vector<double> finite_difference_directional(const Program& prog, std::span<const double> x,
                                                  const std::vector<std::vector<double>>& dirs,
                                                  std::span<const unsigned> alpha, double h) {
  if (dirs.size() != alpha.size()) {
    throw DimensionMismatch("finite_difference_directional: one exponent per direction");
  }
  for (const auto& v : dirs) {
    if (v.size() != x.size()) throw DimensionMismatch("finite_difference_directional: direction");
  }
  return stencil_sum(prog, x, dirs, alpha, h);
}

// ---------------------------------------------------------------------------
// Univariate Taylor series

namespace {

using Series = std::vector<double>;

Series series_mul(const Series& a, const Series& b) {
  Series r(a.size(), 0.0);
  for (std::size_t k = 0; k < r.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j <= k; ++j) s += a[j] * b[k - j];
    r[k] = s;
  }
  return r;
}

Series series_recip(const Series& a) {
  Series y(a.size(), 0.0);
  y[0] = 1.0 / a[0];
  for (std::size_t k = 1; k < y.size(); ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += a[j] * y[k - j];
    y[k] = -s / a[0];
  }
  return y;
}

Series series_unary(const Node& node, const Series& a) {
  const std::size_t len = a.size();
  check_domain(node.op, a[0], node.payload);
  Series y(len, 0.0);
  switch (node.op) {
    case PrimitiveKind::neg:
      for (std::size_t k = 0; k < len; ++k) y[k] = -a[k];
      return y;
    case PrimitiveKind::exp:
      // y' = a' y
      y[0] = std::exp(a[0]);
      for (std::size_t k = 1; k < len; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * y[k - j];
        y[k] = s / static_cast<double>(k);
      }
      return y;
    case PrimitiveKind::log:
      // a y' = a'
      y[0] = std::log(a[0]);
      for (std::size_t k = 1; k < len; ++k) {
        double s = static_cast<double>(k) * a[k];
        for (std::size_t j = 1; j < k; ++j) s -= static_cast<double>(j) * y[j] * a[k - j];
        y[k] = s / (static_cast<double>(k) * a[0]);
      }
      return y;
    case PrimitiveKind::sin:
    case PrimitiveKind::cos: {
      // s' = c a', c' = -s a'
      Series s(len, 0.0), c(len, 0.0);
      s[0] = std::sin(a[0]);
      c[0] = std::cos(a[0]);
      for (std::size_t k = 1; k < len; ++k) {
        double ss = 0.0, cc = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
          ss += static_cast<double>(j) * a[j] * c[k - j];
          cc -= static_cast<double>(j) * a[j] * s[k - j];
        }
        s[k] = ss / static_cast<double>(k);
        c[k] = cc / static_cast<double>(k);
      }
      return node.op == PrimitiveKind::sin ? s : c;
    }
    case PrimitiveKind::tanh: {
      // y' = (1 - y^2) a'
      Series z(len, 0.0);
      y[0] = std::tanh(a[0]);
      z[0] = 1.0 - y[0] * y[0];
      for (std::size_t k = 1; k < len; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * a[j] * z[k - j];
        y[k] = s / static_cast<double>(k);
        double sq = 0.0;
        for (std::size_t i = 0; i <= k; ++i) sq += y[i] * y[k - i];
        z[k] = -sq;
      }
      return y;
    }
    case PrimitiveKind::sqrt:
      // y^2 = a
      y[0] = std::sqrt(a[0]);
      for (std::size_t k = 1; k < len; ++k) {
        double s = a[k];
        for (std::size_t j = 1; j < k; ++j) s -= y[j] * y[k - j];
        y[k] = s / (2.0 * y[0]);
      }
      return y;
    case PrimitiveKind::recip:
      return series_recip(a);
    case PrimitiveKind::pow_const: {
      const double r = node.payload;
      if (is_integer_exponent(r)) {
        const Series base = r < 0 ? series_recip(a) : a;
        Series acc(len, 0.0);
        acc[0] = 1.0;
        const auto e = static_cast<unsigned>(std::abs(r));
        for (unsigned i = 0; i < e; ++i) acc = series_mul(acc, base);
        return acc;
      }
      // a y' = r a' y
      y[0] = std::pow(a[0], r);
      for (std::size_t k = 1; k < len; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= k; ++j) {
          s += (r * static_cast<double>(j) - static_cast<double>(k - j)) * a[j] * y[k - j];
        }
        y[k] = s / (static_cast<double>(k) * a[0]);
      }
      return y;
    }
    default:
      throw Error("univariate_taylor: unexpected unary primitive");
  }
}

}  // namespace

std::vector<std::vector<double>> univariate_taylor(const Program& prog, std::span<const double> x,
                                                   std::span<const double> d, unsigned order) {
  if (x.size() != prog.n_inputs() || d.size() != prog.n_inputs()) {
    throw DimensionMismatch("univariate_taylor: point and direction must have the input dimension");
  }
  const std::size_t len = order + 1;
  std::vector<Series> slots;
  slots.reserve(prog.slot_count());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Series s(len, 0.0);
    s[0] = x[i];
    if (len > 1) s[1] = d[i];
    slots.push_back(std::move(s));
  }
  const auto& nodes = prog.nodes();
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const Node& node = nodes[k];
    try {
      switch (node.op) {
        case PrimitiveKind::const_val: {
          Series s(len, 0.0);
          s[0] = node.payload;
          slots.push_back(std::move(s));
          break;
        }
        case PrimitiveKind::add:
        case PrimitiveKind::sub: {
          const Series& a = slots[node.operands[0]];
          const Series& b = slots[node.operands[1]];
          const double sign = node.op == PrimitiveKind::add ? 1.0 : -1.0;
          Series s(len);
          for (std::size_t i = 0; i < len; ++i) s[i] = a[i] + sign * b[i];
          slots.push_back(std::move(s));
          break;
        }
        case PrimitiveKind::mul:
          slots.push_back(series_mul(slots[node.operands[0]], slots[node.operands[1]]));
          break;
        default:
          slots.push_back(series_unary(node, slots[node.operands[0]]));
          break;
      }
    } catch (const DomainError& e) {
      throw e.at_node(k);
    }
  }
  std::vector<std::vector<double>> out;
  for (Slot s : prog.outputs()) out.push_back(slots[s]);
  return out;
}

// ---------------------------------------------------------------------------
// Nested schedule

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::vector<unsigned>> compositions(unsigned p, unsigned l) {
  std::vector<std::vector<unsigned>> out;
  if (p == 0) {
    if (l == 0) out.emplace_back();
    return out;
  }
  std::vector<unsigned> cur(p, 0);
  // lexicographically increasing: recurse with the first slot ascending
  auto rec = [&](auto&& self, unsigned j, unsigned remaining) -> void {
    if (j + 1 == p) {
      cur[j] = remaining;
      out.push_back(cur);
      return;
    }
    for (unsigned v = 0; v <= remaining; ++v) {
      cur[j] = v;
      self(self, j + 1, remaining - v);
    }
  };
  rec(rec, 0, l);
  return out;
}

namespace {

struct SolveStats {
  double residual = 0.0;
  double pivot_ratio = 1.0;
};

// Solves A Y = B in place (B has one column per output) with partial
// pivoting; A is square.
SolveStats solve_system(std::vector<std::vector<double>> a, std::vector<std::vector<double>>& b) {
  const auto a0 = a;
  const auto b0 = b;
  const std::size_t n = a.size();
  const std::size_t m = n ? b[0].size() : 0;
  double pmax = 0.0, pmin = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    const double pv = a[c][c];
    if (pv == 0.0) throw Error("nested_jvp_schedule: singular interpolation system");
    pmax = std::max(pmax, std::abs(pv));
    pmin = std::min(pmin, std::abs(pv));
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r][c] / pv;
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      for (std::size_t k = 0; k < m; ++k) b[r][k] -= f * b[c][k];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t k = 0; k < m; ++k) {
      double s = b[c][k];
      for (std::size_t j = c + 1; j < n; ++j) s -= a[c][j] * b[j][k];
      b[c][k] = s / a[c][c];
    }
  }
  SolveStats st;
  st.pivot_ratio = n ? pmax / pmin : 1.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t k = 0; k < m; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a0[r][j] * b[j][k];
      st.residual = std::max(st.residual, std::abs(s - b0[r][k]) / std::max(1.0, std::abs(b0[r][k])));
    }
  }
  return st;
}

}  // namespace

NestedResult nested_jvp_schedule(const Program& prog, std::span<const double> x,
                                 const std::vector<std::vector<double>>& directions, unsigned k) {
  const std::size_t n = prog.n_inputs();
  if (x.size() != n) throw DimensionMismatch("nested_jvp_schedule: base point dimension");
  for (const auto& v : directions) {
    if (v.size() != n) throw DimensionMismatch("nested_jvp_schedule: direction dimension");
  }
  const auto p = static_cast<unsigned>(directions.size());
  NestedResult res;
  res.count.p = p;
  res.count.k = k;

  auto push = [&](std::vector<unsigned> alpha, const std::vector<double>& coeff) {
    DerivativeEntry e;
    e.alpha.exponents = std::move(alpha);
    const double f = e.alpha.factorial();
    e.coeff = coeff;
    for (double c : coeff) e.value.push_back(c * f);
    res.entries.push_back(std::move(e));
  };

  // order 0: the primal pass
  push(std::vector<unsigned>(p, 0), eval_primal(prog, x));
  ++res.count.passes;

  // order 1: one jvp per direction
  if (k >= 1) {
    for (const auto& alpha : compositions(p, 1)) {
      const auto j = static_cast<std::size_t>(std::find(alpha.begin(), alpha.end(), 1u) - alpha.begin());
      push(alpha, jvp(prog, x, TangentVector{directions[j]}).components);
      ++res.count.passes;
    }
  }

  // order l >= 2: sample t -> f(x + s d_t), |t| = l, and invert
  //   c_l(t) = sum_{|alpha| = l} t^alpha y_alpha
  for (unsigned l = 2; l <= k; ++l) {
    const auto lattice = compositions(p, l);
    const std::size_t count = lattice.size();
    std::vector<std::vector<double>> a(count, std::vector<double>(count));
    std::vector<std::vector<double>> rhs(count);
    for (std::size_t r = 0; r < count; ++r) {
      const auto& t = lattice[r];
      std::vector<double> d(n, 0.0);
      for (unsigned j = 0; j < p; ++j) {
        for (std::size_t i = 0; i < n; ++i) d[i] += t[j] * directions[j][i];
      }
      const auto series = univariate_taylor(prog, x, d, l);
      ++res.count.passes;
      for (const auto& s : series) rhs[r].push_back(s[l]);
      for (std::size_t c = 0; c < count; ++c) {
        double mono = 1.0;
        for (unsigned j = 0; j < p; ++j) mono *= std::pow(static_cast<double>(t[j]), lattice[c][j]);
        a[r][c] = mono;
      }
    }
    const SolveStats st = solve_system(std::move(a), rhs);
    res.residual = std::max(res.residual, st.residual);
    res.pivot_ratio = std::max(res.pivot_ratio, st.pivot_ratio);
    for (std::size_t c = 0; c < count; ++c) push(lattice[c], rhs[c]);
  }

  constexpr double kPivotLimit = 1e10;
  constexpr double kResidualLimit = 1e-8;
  if (res.pivot_ratio > kPivotLimit || res.residual > kResidualLimit) {
    res.ill_conditioned = true;
    std::ostringstream os;
    os << "interpolation system poorly conditioned: pivot ratio " << res.pivot_ratio
       << ", residual " << res.residual;
    res.warning = os.str();
  }
  return res;
}

}  // namespace jetweil
