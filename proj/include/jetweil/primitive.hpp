#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace jetweil {

/// The closed set of scalar primitives a straight-line program may use.
///
/// `div` exists only at the surface: programs are validated into `mul` +
/// `recip`, so evaluators never see it. `pow_const` and `const_val` carry a
/// real payload on the node (the exponent and the constant respectively).
enum class PrimitiveKind : std::uint8_t {
  add,
  sub,
  mul,
  div,
  neg,
  exp,
  log,
  sin,
  cos,
  tanh,
  sqrt,
  recip,
  pow_const,
  const_val,
};

inline constexpr PrimitiveKind kAllPrimitives[] = {
    PrimitiveKind::add,  PrimitiveKind::sub,   PrimitiveKind::mul,
    PrimitiveKind::div,  PrimitiveKind::neg,   PrimitiveKind::exp,
    PrimitiveKind::log,  PrimitiveKind::sin,   PrimitiveKind::cos,
    PrimitiveKind::tanh, PrimitiveKind::sqrt,  PrimitiveKind::recip,
    PrimitiveKind::pow_const, PrimitiveKind::const_val,
};

/// Operand count: 2 for add/sub/mul/div, 0 for const, 1 otherwise.
int arity(PrimitiveKind kind) noexcept;

/// Keyword used in the program text format ("pow" and "const" for the two
/// payload-carrying kinds).
std::string_view keyword(PrimitiveKind kind) noexcept;
std::optional<PrimitiveKind> kind_from_keyword(std::string_view word) noexcept;

/// Throws DomainError when `a` is outside the (open) domain of `kind`.
/// Total primitives never throw. `payload` is the pow exponent.
void check_domain(PrimitiveKind kind, double a, double payload = 0.0);

double apply_unary(PrimitiveKind kind, double a, double payload = 0.0);
double apply_binary(PrimitiveKind kind, double a, double b);

/// phi'(a) for a unary primitive.
double unary_derivative(PrimitiveKind kind, double a, double payload = 0.0);

/// Partial derivatives (d/da, d/db) of a binary primitive at (a, b).
struct BinaryPartials {
  double da;
  double db;
};
BinaryPartials binary_partials(PrimitiveKind kind, double a, double b) noexcept;

/// Fills out[l] = phi^(l)(c) / l! for l = 0 .. out.size()-1, from the
/// closed-form derivative sequence of each unary primitive. The domain is
/// checked first.
void taylor_coefficients(PrimitiveKind kind, double c, double payload,
                         std::span<double> out);

bool is_integer_exponent(double r) noexcept;

}  // namespace jetweil
