#include "jetweil/primitive.hpp"

#include <cmath>
#include <string>

#include "jetweil/error.hpp"

namespace jetweil {

int arity(PrimitiveKind kind) noexcept {
  switch (kind) {
    case PrimitiveKind::add:
    case PrimitiveKind::sub:
    case PrimitiveKind::mul:
    case PrimitiveKind::div:
      return 2;
    case PrimitiveKind::const_val:
      return 0;
    default:
      return 1;
  }
}

std::string_view keyword(PrimitiveKind kind) noexcept {
  switch (kind) {
    case PrimitiveKind::add: return "add";
    case PrimitiveKind::sub: return "sub";
    case PrimitiveKind::mul: return "mul";
    case PrimitiveKind::div: return "div";
    case PrimitiveKind::neg: return "neg";
    case PrimitiveKind::exp: return "exp";
    case PrimitiveKind::log: return "log";
    case PrimitiveKind::sin: return "sin";
    case PrimitiveKind::cos: return "cos";
    case PrimitiveKind::tanh: return "tanh";
    case PrimitiveKind::sqrt: return "sqrt";
    case PrimitiveKind::recip: return "recip";
    case PrimitiveKind::pow_const: return "pow";
    case PrimitiveKind::const_val: return "const";
  }
  return "?";
}

std::optional<PrimitiveKind> kind_from_keyword(std::string_view word) noexcept {
  for (PrimitiveKind k : kAllPrimitives) {
    if (keyword(k) == word) return k;
  }
  return std::nullopt;
}

bool is_integer_exponent(double r) noexcept {
  return std::isfinite(r) && std::trunc(r) == r;
}

void check_domain(PrimitiveKind kind, double a, double payload) {
  const auto fail = [&] { throw DomainError(std::string(keyword(kind)), a); };
  switch (kind) {
    case PrimitiveKind::log:
    case PrimitiveKind::sqrt:
      if (!(a > 0.0)) fail();
      break;
    case PrimitiveKind::recip:
      if (a == 0.0 || std::isnan(a)) fail();
      break;
    case PrimitiveKind::pow_const:
      if (is_integer_exponent(payload)) {
        if (payload < 0.0 && a == 0.0) fail();
      } else if (!(a > 0.0)) {
        fail();
      }
      break;
    default:
      break;
  }
}

double apply_unary(PrimitiveKind kind, double a, double payload) {
  check_domain(kind, a, payload);
  switch (kind) {
    case PrimitiveKind::neg: return -a;
    case PrimitiveKind::exp: return std::exp(a);
    case PrimitiveKind::log: return std::log(a);
    case PrimitiveKind::sin: return std::sin(a);
    case PrimitiveKind::cos: return std::cos(a);
    case PrimitiveKind::tanh: return std::tanh(a);
    case PrimitiveKind::sqrt: return std::sqrt(a);
    case PrimitiveKind::recip: return 1.0 / a;
    case PrimitiveKind::pow_const: return std::pow(a, payload);
    default:
      throw Error("apply_unary: not a unary primitive: " + std::string(keyword(kind)));
  }
}

double apply_binary(PrimitiveKind kind, double a, double b) {
  switch (kind) {
    case PrimitiveKind::add: return a + b;
    case PrimitiveKind::sub: return a - b;
    case PrimitiveKind::mul: return a * b;
    default:
      throw Error("apply_binary: not a binary primitive: " + std::string(keyword(kind)));
  }
}

double unary_derivative(PrimitiveKind kind, double a, double payload) {
  check_domain(kind, a, payload);
  switch (kind) {
    case PrimitiveKind::neg: return -1.0;
    case PrimitiveKind::exp: return std::exp(a);
    case PrimitiveKind::log: return 1.0 / a;
    case PrimitiveKind::sin: return std::cos(a);
    case PrimitiveKind::cos: return -std::sin(a);
    case PrimitiveKind::tanh: {
      const double t = std::tanh(a);
      return 1.0 - t * t;
    }
    case PrimitiveKind::sqrt: return 0.5 / std::sqrt(a);
    case PrimitiveKind::recip: return -1.0 / (a * a);
    case PrimitiveKind::pow_const:
      if (payload == 0.0) return 0.0;
      return payload * std::pow(a, payload - 1.0);
    default:
      throw Error("unary_derivative: not a unary primitive: " + std::string(keyword(kind)));
  }
}

BinaryPartials binary_partials(PrimitiveKind kind, double a, double b) noexcept {
  switch (kind) {
    case PrimitiveKind::add: return {1.0, 1.0};
    case PrimitiveKind::sub: return {1.0, -1.0};
    case PrimitiveKind::mul: return {b, a};
    default: return {0.0, 0.0};
  }
}

void taylor_coefficients(PrimitiveKind kind, double c, double payload,
                         std::span<double> out) {
  if (out.empty()) return;
  check_domain(kind, c, payload);
  const std::size_t n = out.size();
  for (double& v : out) v = 0.0;

  switch (kind) {
    case PrimitiveKind::neg:
      out[0] = -c;
      if (n > 1) out[1] = -1.0;
      return;
    case PrimitiveKind::exp: {
      double t = std::exp(c);
      for (std::size_t l = 0; l < n; ++l) {
        out[l] = t;
        t /= static_cast<double>(l + 1);
      }
      return;
    }
    case PrimitiveKind::log: {
      out[0] = std::log(c);
      // (-1)^(l+1) / (l c^l)
      double power = 1.0 / c;
      for (std::size_t l = 1; l < n; ++l) {
        out[l] = power / static_cast<double>(l);
        power = -power / c;
      }
      return;
    }
    case PrimitiveKind::sin:
    case PrimitiveKind::cos: {
      const double s = std::sin(c);
      const double co = std::cos(c);
      // derivative cycle starting at sin: s, co, -s, -co
      const double cycle_sin[4] = {s, co, -s, -co};
      const std::size_t offset = kind == PrimitiveKind::sin ? 0 : 1;
      double inv_fact = 1.0;
      for (std::size_t l = 0; l < n; ++l) {
        out[l] = cycle_sin[(l + offset) % 4] * inv_fact;
        inv_fact /= static_cast<double>(l + 1);
      }
      return;
    }
    case PrimitiveKind::tanh: {
      // y' = 1 - y^2, so (l+1) a_{l+1} = [l == 0] - sum_{i<=l} a_i a_{l-i}
      out[0] = std::tanh(c);
      for (std::size_t l = 0; l + 1 < n; ++l) {
        double sq = 0.0;
        for (std::size_t i = 0; i <= l; ++i) sq += out[i] * out[l - i];
        out[l + 1] = ((l == 0 ? 1.0 : 0.0) - sq) / static_cast<double>(l + 1);
      }
      return;
    }
    case PrimitiveKind::recip: {
      double t = 1.0 / c;
      for (std::size_t l = 0; l < n; ++l) {
        out[l] = t;
        t = -t / c;
      }
      return;
    }
    case PrimitiveKind::sqrt:
    case PrimitiveKind::pow_const: {
      const double r = kind == PrimitiveKind::sqrt ? 0.5 : payload;
      if (c == 0.0) {
        // only reachable for non-negative integer r: the binomial terminates
        const auto rl = static_cast<std::size_t>(r);
        if (rl < n) out[rl] = 1.0;
        return;
      }
      // generalized binomial: C(r, l) c^(r - l)
      double t = kind == PrimitiveKind::sqrt ? std::sqrt(c) : std::pow(c, r);
      for (std::size_t l = 0; l < n; ++l) {
        out[l] = t;
        t = t * (r - static_cast<double>(l)) / (static_cast<double>(l + 1) * c);
      }
      return;
    }
    default:
      throw Error("taylor_coefficients: not a unary primitive: " + std::string(keyword(kind)));
  }
}

}  // namespace jetweil
