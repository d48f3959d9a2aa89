#include "jetweil/random_program.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "jetweil/rng.hpp"

namespace jetweil {

std::string_view family_name(ProgramFamily f) noexcept {
  switch (f) {
    case ProgramFamily::safe: return "safe";
    case ProgramFamily::guarded: return "guarded";
    case ProgramFamily::polynomial: return "polynomial";
    case ProgramFamily::add_unary_heavy: return "add_unary";
    case ProgramFamily::mul_heavy: return "mul";
  }
  return "?";
}

namespace {

constexpr double kMaxMagnitude = 16.0;
// log, sqrt, recip and friends only take operands at least this far from 0
constexpr double kDomainMargin = 0.1;

struct Interval {
  double lo;
  double hi;

  double magnitude() const { return std::max(std::abs(lo), std::abs(hi)); }
  bool positive() const { return lo >= kDomainMargin; }
  bool away_from_zero() const { return lo >= kDomainMargin || hi <= -kDomainMargin; }
};

Interval hull(std::initializer_list<double> v) {
  return {std::min(v), std::max(v)};
}

Interval power(const Interval& a, double r) {
  if (is_integer_exponent(r) && r >= 0.0) {
    const auto n = static_cast<int>(r);
    const double plo = std::pow(a.lo, n);
    const double phi = std::pow(a.hi, n);
    if (n % 2 == 0 && a.lo < 0.0 && a.hi > 0.0) return {0.0, std::max(plo, phi)};
    return hull({plo, phi});
  }
  return hull({std::pow(a.lo, r), std::pow(a.hi, r)});
}

struct Weighted {
  PrimitiveKind kind;
  double weight;
};

class Generator {
 public:
  Generator(std::uint64_t seed, const RandomProgramOptions& opt)
      : rng_(seed), opt_(opt), builder_(opt.n_inputs) {
    for (std::size_t i = 0; i < opt.n_inputs; ++i) {
      range_.push_back({-1.0, 1.0});
      degree_.push_back(1);
    }
  }

  Program run() {
    while (nodes_ < opt_.depth) step();
    choose_outputs();
    return std::move(builder_).build();
  }

 private:
  std::size_t slots() const { return range_.size(); }

  Slot pick() {
    if (rng_.chance(0.5)) return static_cast<Slot>(slots() - 1);
    return static_cast<Slot>(rng_.index(slots()));
  }

  // a random slot satisfying pred, or none
  std::optional<Slot> pick_where(auto pred) {
    std::vector<Slot> ok;
    for (Slot s = 0; s < slots(); ++s) {
      if (pred(range_[s])) ok.push_back(s);
    }
    if (ok.empty()) return std::nullopt;
    // prefer the most recent candidate half the time to build depth
    if (rng_.chance(0.5)) return ok.back();
    return ok[rng_.index(ok.size())];
  }

  Slot emit(PrimitiveKind op, std::initializer_list<Slot> args, double payload, Interval r,
            unsigned degree = 0) {
    const Slot s = builder_.add(op, args, payload);
    // div expands to two nodes
    nodes_ = builder_.slot_count() - opt_.n_inputs;
    while (range_.size() < builder_.slot_count()) {
      range_.push_back(r);
      degree_.push_back(degree);
    }
    return s;
  }

  PrimitiveKind draw(std::initializer_list<Weighted> table) {
    double total = 0.0;
    for (const auto& w : table) total += w.weight;
    double u = rng_.unit() * total;
    for (const auto& w : table) {
      if (u < w.weight) return w.kind;
      u -= w.weight;
    }
    return table.begin()->kind;
  }

  // always-feasible single node that pulls a slot back into [-1, 1]
  void squash(Slot a) {
    static constexpr PrimitiveKind kinds[] = {PrimitiveKind::sin, PrimitiveKind::cos,
                                              PrimitiveKind::tanh};
    const PrimitiveKind k = kinds[rng_.index(3)];
    const Interval& ra = range_[a];
    Interval r{-1.0, 1.0};
    if (k == PrimitiveKind::tanh) r = {std::tanh(ra.lo), std::tanh(ra.hi)};
    emit(k, {a}, 0.0, r);
  }

  void emit_exp(Slot a) {
    const Interval ra = range_[a];
    const double m = ra.magnitude();
    if (m <= 1.0) {
      emit(PrimitiveKind::exp, {a}, 0.0, {std::exp(ra.lo), std::exp(ra.hi)});
      return;
    }
    if (opt_.depth - nodes_ < 3) {
      squash(a);
      return;
    }
    const double scale = 1.0 / m;
    const Slot c = emit(PrimitiveKind::const_val, {}, scale, {scale, scale});
    const Interval scaled = hull({scale * ra.lo, scale * ra.hi});
    const Slot t = emit(PrimitiveKind::mul, {c, a}, 0.0, scaled);
    emit(PrimitiveKind::exp, {t}, 0.0, {std::exp(scaled.lo), std::exp(scaled.hi)});
  }

  void emit_binary(PrimitiveKind op, Slot a, Slot b) {
    const Interval ra = range_[a];
    const Interval rb = range_[b];
    Interval r{};
    switch (op) {
      case PrimitiveKind::add: r = {ra.lo + rb.lo, ra.hi + rb.hi}; break;
      case PrimitiveKind::sub: r = {ra.lo - rb.hi, ra.hi - rb.lo}; break;
      default:
        r = hull({ra.lo * rb.lo, ra.lo * rb.hi, ra.hi * rb.lo, ra.hi * rb.hi});
        break;
    }
    if (r.magnitude() > kMaxMagnitude) {
      squash(rng_.chance(0.5) ? a : b);
      return;
    }
    emit(op, {a, b}, 0.0, r);
  }

  void step() {
    switch (opt_.family) {
      case ProgramFamily::safe:
        step_total({{PrimitiveKind::add, 2}, {PrimitiveKind::mul, 2}, {PrimitiveKind::sin, 1},
                    {PrimitiveKind::cos, 1}, {PrimitiveKind::tanh, 1}, {PrimitiveKind::exp, 1}});
        return;
      case ProgramFamily::add_unary_heavy:
        step_total({{PrimitiveKind::add, 9}, {PrimitiveKind::sub, 3}, {PrimitiveKind::neg, 1},
                    {PrimitiveKind::sin, 2}, {PrimitiveKind::cos, 1}, {PrimitiveKind::tanh, 2},
                    {PrimitiveKind::exp, 2}});
        return;
      case ProgramFamily::mul_heavy:
        step_total({{PrimitiveKind::mul, 12}, {PrimitiveKind::add, 4}, {PrimitiveKind::sin, 2},
                    {PrimitiveKind::tanh, 2}});
        return;
      case ProgramFamily::guarded:
        step_guarded();
        return;
      case ProgramFamily::polynomial:
        step_polynomial();
        return;
    }
  }

  void step_total(std::initializer_list<Weighted> table) {
    const PrimitiveKind op = draw(table);
    switch (op) {
      case PrimitiveKind::add:
      case PrimitiveKind::sub:
      case PrimitiveKind::mul:
        emit_binary(op, pick(), static_cast<Slot>(rng_.index(slots())));
        return;
      case PrimitiveKind::exp:
        emit_exp(pick());
        return;
      case PrimitiveKind::neg: {
        const Slot a = pick();
        emit(op, {a}, 0.0, {-range_[a].hi, -range_[a].lo});
        return;
      }
      default: {
        const Slot a = pick();
        const Interval ra = range_[a];
        Interval r{-1.0, 1.0};
        if (op == PrimitiveKind::tanh) r = {std::tanh(ra.lo), std::tanh(ra.hi)};
        emit(op, {a}, 0.0, r);
        return;
      }
    }
  }

  void step_guarded() {
    const PrimitiveKind op =
        draw({{PrimitiveKind::add, 2}, {PrimitiveKind::sub, 1}, {PrimitiveKind::mul, 2},
              {PrimitiveKind::div, 1}, {PrimitiveKind::neg, 0.5}, {PrimitiveKind::exp, 1},
              {PrimitiveKind::log, 1}, {PrimitiveKind::sin, 1}, {PrimitiveKind::cos, 1},
              {PrimitiveKind::tanh, 1}, {PrimitiveKind::sqrt, 1}, {PrimitiveKind::recip, 1},
              {PrimitiveKind::pow_const, 1}, {PrimitiveKind::const_val, 0.5}});
    const auto positive = [](const Interval& r) { return r.positive(); };
    const auto nonzero = [](const Interval& r) { return r.away_from_zero(); };

    switch (op) {
      case PrimitiveKind::add:
      case PrimitiveKind::sub:
      case PrimitiveKind::mul:
        emit_binary(op, pick(), static_cast<Slot>(rng_.index(slots())));
        return;
      case PrimitiveKind::div: {
        if (opt_.depth - nodes_ < 2) break;
        const auto b = pick_where(nonzero);
        if (!b) break;
        const Slot a = pick();
        const Interval ra = range_[a];
        const Interval rb = range_[*b];
        const Interval inv = hull({1.0 / rb.lo, 1.0 / rb.hi});
        const Interval r = hull({ra.lo * inv.lo, ra.lo * inv.hi, ra.hi * inv.lo, ra.hi * inv.hi});
        if (r.magnitude() > kMaxMagnitude) break;
        // recip node first, then the product
        builder_.add(PrimitiveKind::div, {a, *b});
        range_.push_back(inv);
        degree_.push_back(0);
        range_.push_back(r);
        degree_.push_back(0);
        nodes_ = builder_.slot_count() - opt_.n_inputs;
        return;
      }
      case PrimitiveKind::neg: {
        const Slot a = pick();
        emit(op, {a}, 0.0, {-range_[a].hi, -range_[a].lo});
        return;
      }
      case PrimitiveKind::exp:
        emit_exp(pick());
        return;
      case PrimitiveKind::log: {
        const auto a = pick_where(positive);
        if (!a) break;
        emit(op, {*a}, 0.0, {std::log(range_[*a].lo), std::log(range_[*a].hi)});
        return;
      }
      case PrimitiveKind::sqrt: {
        const auto a = pick_where(positive);
        if (!a) break;
        emit(op, {*a}, 0.0, {std::sqrt(range_[*a].lo), std::sqrt(range_[*a].hi)});
        return;
      }
      case PrimitiveKind::recip: {
        const auto a = pick_where(nonzero);
        if (!a) break;
        emit(op, {*a}, 0.0, hull({1.0 / range_[*a].lo, 1.0 / range_[*a].hi}));
        return;
      }
      case PrimitiveKind::pow_const: {
        static constexpr double exponents[] = {2.0, 3.0, -1.0, 0.5, 1.5};
        const double r = exponents[rng_.index(5)];
        std::optional<Slot> a;
        if (is_integer_exponent(r) && r > 0.0) {
          a = pick();
        } else {
          a = pick_where(positive);
        }
        if (!a) break;
        const Interval res = power(range_[*a], r);
        if (res.magnitude() > kMaxMagnitude) break;
        emit(op, {*a}, r, res);
        return;
      }
      case PrimitiveKind::const_val: {
        const double c = rng_.uniform(-2.0, 2.0);
        emit(op, {}, c, {c, c});
        return;
      }
      default: {
        const Slot a = pick();
        const Interval ra = range_[a];
        Interval r{-1.0, 1.0};
        if (op == PrimitiveKind::tanh) r = {std::tanh(ra.lo), std::tanh(ra.hi)};
        emit(op, {a}, 0.0, r);
        return;
      }
    }
    squash(pick());
  }

  void step_polynomial() {
    const PrimitiveKind op =
        draw({{PrimitiveKind::add, 3}, {PrimitiveKind::sub, 2}, {PrimitiveKind::mul, 4},
              {PrimitiveKind::neg, 1}, {PrimitiveKind::const_val, 1},
              {PrimitiveKind::pow_const, 1}});
    const unsigned cap = opt_.max_degree;
    switch (op) {
      case PrimitiveKind::mul: {
        const Slot a = pick();
        const Slot b = static_cast<Slot>(rng_.index(slots()));
        if (degree_[a] + degree_[b] <= cap) {
          emit(op, {a, b}, 0.0, {}, degree_[a] + degree_[b]);
          return;
        }
        break;
      }
      case PrimitiveKind::pow_const: {
        const Slot a = pick();
        const double r = rng_.chance(0.5) ? 2.0 : 3.0;
        const auto d = static_cast<unsigned>(r) * degree_[a];
        if (d <= cap) {
          emit(op, {a}, r, {}, d);
          return;
        }
        break;
      }
      case PrimitiveKind::neg: {
        const Slot a = pick();
        emit(op, {a}, 0.0, {}, degree_[a]);
        return;
      }
      case PrimitiveKind::const_val: {
        const auto c = static_cast<double>(static_cast<int>(rng_.index(7)) - 3);
        emit(op, {}, c, {}, 0);
        return;
      }
      default:
        break;
    }
    const PrimitiveKind lin = rng_.chance(0.6) ? PrimitiveKind::add : PrimitiveKind::sub;
    const Slot a = pick();
    const Slot b = static_cast<Slot>(rng_.index(slots()));
    emit(lin, {a, b}, 0.0, {}, std::max(degree_[a], degree_[b]));
  }

  void choose_outputs() {
    std::size_t m = opt_.n_outputs;
    if (m == 0) m = 1 + rng_.index(3);
    builder_.output(static_cast<Slot>(slots() - 1));
    for (std::size_t i = 1; i < m; ++i) {
      builder_.output(static_cast<Slot>(rng_.index(slots())));
    }
  }

  Rng rng_;
  RandomProgramOptions opt_;
  ProgramBuilder builder_;
  std::vector<Interval> range_;
  std::vector<unsigned> degree_;
  std::size_t nodes_ = 0;
};

}  // namespace

Program random_program(std::uint64_t seed, const RandomProgramOptions& options) {
  if (options.depth == 0) throw Error("random_program: depth must be at least 1");
  if (options.n_inputs == 0) throw Error("random_program: need at least one input");
  return Generator(seed, options).run();
}

Program random_program(std::uint64_t seed, std::size_t depth, std::size_t n_inputs, bool safe) {
  RandomProgramOptions opt;
  opt.depth = depth;
  opt.n_inputs = n_inputs;
  opt.family = safe ? ProgramFamily::safe : ProgramFamily::guarded;
  return random_program(seed, opt);
}

}  // namespace jetweil
