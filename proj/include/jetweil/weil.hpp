#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "jetweil/primitive.hpp"

namespace jetweil {

/// Default ceiling on dim W; overridable per call and through JETWEIL_MAX_DIM
/// at the CLI.
inline constexpr std::size_t kDefaultMaxDim = std::size_t{1} << 20;

/// Exponent vector alpha selecting the monomial eps_1^a_1 ... eps_p^a_p.
struct MultiIndex {
  std::vector<unsigned> exponents;

  std::size_t size() const noexcept { return exponents.size(); }
  unsigned operator[](std::size_t j) const { return exponents[j]; }

  /// |alpha|
  unsigned total_degree() const noexcept;
  /// alpha! = prod alpha_j!, as a double.
  double factorial() const noexcept;

  bool operator==(const MultiIndex&) const = default;
};

/// Graded order used for serialized tables: by |alpha|, then lexicographic.
bool graded_less(const MultiIndex& a, const MultiIndex& b) noexcept;

/// Descriptor of the truncated polynomial algebra
///   W = R[eps_1..eps_p] / (eps_1^(rho_1+1), ..., eps_p^(rho_p+1)).
///
/// Monomials are laid out in mixed-radix row-major order: index(alpha) =
/// sum_j alpha_j * stride_j with the last direction contiguous, so the
/// degree-0 coefficient is entry 0. Shapes compare by caps, not identity.
class WeilShape {
 public:
  /// Throws ShapeError for empty caps or a zero cap and ShapeTooLarge when
  /// prod(rho_j + 1) exceeds `max_dim`.
  static std::shared_ptr<const WeilShape> make(const std::vector<unsigned>& caps,
                                               std::size_t max_dim = kDefaultMaxDim);

  /// Dimension without building a shape; saturates instead of overflowing.
  static std::size_t dimension_of(const std::vector<unsigned>& caps) noexcept;

  std::size_t directions() const noexcept { return caps_.size(); }
  const std::vector<unsigned>& caps() const noexcept { return caps_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::size_t>& strides() const noexcept { return strides_; }
  /// Largest total degree present, sum_j rho_j.
  unsigned max_degree() const noexcept { return max_degree_; }

  std::size_t index(const MultiIndex& alpha) const;
  MultiIndex multi_index(std::size_t index) const;
  /// alpha_j of the monomial at `index`, without allocating.
  std::span<const std::uint16_t> digits(std::size_t index) const noexcept {
    return {digits_.data() + index * caps_.size(), caps_.size()};
  }
  unsigned degree(std::size_t index) const noexcept { return degree_[index]; }

  bool operator==(const WeilShape& other) const noexcept { return caps_ == other.caps_; }

 private:
  WeilShape() = default;

  std::vector<unsigned> caps_;
  std::vector<std::size_t> strides_;
  std::size_t dim_ = 0;
  unsigned max_degree_ = 0;
  std::vector<std::uint16_t> digits_;
  std::vector<unsigned> degree_;
};

using ShapePtr = std::shared_ptr<const WeilShape>;

/// Alias matching the operation name used throughout the docs and CLI.
inline ShapePtr make_shape(const std::vector<unsigned>& caps,
                           std::size_t max_dim = kDefaultMaxDim) {
  return WeilShape::make(caps, max_dim);
}

/// An element of W stored as its dense coefficient array over the monomial
/// basis. Immutable once built.
class WeilValue {
 public:
  /// The zero element.
  explicit WeilValue(ShapePtr shape);
  /// Takes ownership of `coeffs`; throws DimensionMismatch if the length is
  /// not shape->dim().
  WeilValue(ShapePtr shape, std::vector<double> coeffs);

  static WeilValue constant(ShapePtr shape, double value);
  /// The generator eps_j.
  static WeilValue generator(ShapePtr shape, std::size_t direction);

  const WeilShape& shape() const noexcept { return *shape_; }
  const ShapePtr& shape_ptr() const noexcept { return shape_; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double primal() const noexcept { return coeffs_[0]; }
  double coeff(const MultiIndex& alpha) const { return coeffs_[shape_->index(alpha)]; }
  bool is_constant() const noexcept;

 private:
  ShapePtr shape_;
  std::vector<double> coeffs_;
};

WeilValue weil_add(const WeilValue& a, const WeilValue& b);
WeilValue weil_sub(const WeilValue& a, const WeilValue& b);
WeilValue weil_neg(const WeilValue& a);
WeilValue weil_scale(const WeilValue& a, double s);

/// Truncated convolution c_gamma = sum_{alpha+beta=gamma} a_alpha b_beta;
/// products leaving the box 0 <= gamma_j <= rho_j are dropped.
WeilValue weil_mul(const WeilValue& a, const WeilValue& b);

/// phi(w) = sum_{l=0}^{K} phi^(l)(c0)/l! n^l with n = w - c0 and K the
/// maximal total degree, evaluated by Horner accumulation in n. Throws
/// DomainError when c0 is outside the domain of `kind`.
WeilValue weil_unary(PrimitiveKind kind, const WeilValue& w, double payload = 0.0);

/// 1/w as the truncated geometric series 1/c0 * sum (-n/c0)^l. Throws
/// DivisionByNilpotent when c0 == 0.
WeilValue weil_recip(const WeilValue& w);

inline WeilValue operator+(const WeilValue& a, const WeilValue& b) { return weil_add(a, b); }
inline WeilValue operator-(const WeilValue& a, const WeilValue& b) { return weil_sub(a, b); }
inline WeilValue operator-(const WeilValue& a) { return weil_neg(a); }
inline WeilValue operator*(const WeilValue& a, const WeilValue& b) { return weil_mul(a, b); }

namespace detail {

/// out += a * b restricted to output degree <= max_degree. `out` must not
/// alias either input.
void mul_accumulate(const WeilShape& shape, std::span<const double> a,
                    std::span<const double> b, std::span<double> out,
                    unsigned max_degree);

}  // namespace detail

}  // namespace jetweil
