#include "jetweil/weil.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <string>

#include "jetweil/error.hpp"

namespace jetweil {

unsigned MultiIndex::total_degree() const noexcept {
  unsigned d = 0;
  for (unsigned a : exponents) d += a;
  return d;
}

double MultiIndex::factorial() const noexcept {
  double f = 1.0;
  for (unsigned a : exponents) {
    for (unsigned i = 2; i <= a; ++i) f *= static_cast<double>(i);
  }
  return f;
}

bool graded_less(const MultiIndex& a, const MultiIndex& b) noexcept {
  const unsigned da = a.total_degree();
  const unsigned db = b.total_degree();
  if (da != db) return da < db;
  return a.exponents < b.exponents;
}

// ---------------------------------------------------------------------------
// WeilShape

std::size_t WeilShape::dimension_of(const std::vector<unsigned>& caps) noexcept {
  std::size_t dim = 1;
  for (unsigned rho : caps) {
    const std::size_t radix = static_cast<std::size_t>(rho) + 1;
    if (dim > std::numeric_limits<std::size_t>::max() / radix) {
      return std::numeric_limits<std::size_t>::max();
    }
    dim *= radix;
  }
  return dim;
}

ShapePtr WeilShape::make(const std::vector<unsigned>& caps, std::size_t max_dim) {
  if (caps.empty()) throw ShapeError("caps must name at least one direction");
  for (std::size_t j = 0; j < caps.size(); ++j) {
    if (caps[j] == 0) {
      std::ostringstream os;
      os << "cap " << j << " is zero; every truncation order must be >= 1";
      throw ShapeError(os.str());
    }
  }
  const std::size_t dim = dimension_of(caps);
  if (dim > max_dim) throw ShapeTooLarge(dim, max_dim);

  auto shape = std::shared_ptr<WeilShape>(new WeilShape());
  const std::size_t p = caps.size();
  shape->caps_ = caps;
  shape->dim_ = dim;
  shape->strides_.assign(p, 1);
  for (std::size_t j = p - 1; j-- > 0;) {
    shape->strides_[j] = shape->strides_[j + 1] * (caps[j + 1] + 1);
  }
  shape->max_degree_ = 0;
  for (unsigned rho : caps) shape->max_degree_ += rho;

  shape->digits_.resize(dim * p);
  shape->degree_.resize(dim);
  std::vector<unsigned> alpha(p, 0);
  for (std::size_t idx = 0; idx < dim; ++idx) {
    unsigned deg = 0;
    for (std::size_t j = 0; j < p; ++j) {
      shape->digits_[idx * p + j] = static_cast<std::uint16_t>(alpha[j]);
      deg += alpha[j];
    }
    shape->degree_[idx] = deg;
    // odometer, last digit fastest
    for (std::size_t j = p; j-- > 0;) {
      if (++alpha[j] <= caps[j]) break;
      alpha[j] = 0;
    }
  }
  return shape;
}

std::size_t WeilShape::index(const MultiIndex& alpha) const {
  if (alpha.size() != caps_.size()) {
    throw DimensionMismatch("multi-index length does not match direction count");
  }
  std::size_t idx = 0;
  for (std::size_t j = 0; j < caps_.size(); ++j) {
    if (alpha[j] > caps_[j]) throw DimensionMismatch("multi-index exceeds cap");
    idx += alpha[j] * strides_[j];
  }
  return idx;
}

MultiIndex WeilShape::multi_index(std::size_t index) const {
  const auto d = digits(index);
  return MultiIndex{std::vector<unsigned>(d.begin(), d.end())};
}

// ---------------------------------------------------------------------------
// WeilValue

WeilValue::WeilValue(ShapePtr shape) : shape_(std::move(shape)), coeffs_(shape_->dim(), 0.0) {}

WeilValue::WeilValue(ShapePtr shape, std::vector<double> coeffs)
    : shape_(std::move(shape)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != shape_->dim()) {
    throw DimensionMismatch("coefficient array length does not match dim W");
  }
}

WeilValue WeilValue::constant(ShapePtr shape, double value) {
  std::vector<double> c(shape->dim(), 0.0);
  c[0] = value;
  return WeilValue(std::move(shape), std::move(c));
}

WeilValue WeilValue::generator(ShapePtr shape, std::size_t direction) {
  if (direction >= shape->directions()) throw DimensionMismatch("generator index out of range");
  std::vector<double> c(shape->dim(), 0.0);
  c[shape->strides()[direction]] = 1.0;
  return WeilValue(std::move(shape), std::move(c));
}

bool WeilValue::is_constant() const noexcept {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](double v) { return v == 0.0; });
}

namespace {

void require_same_shape(const WeilValue& a, const WeilValue& b) {
  if (a.shape_ptr() != b.shape_ptr() && !(a.shape() == b.shape())) {
    throw IncompatibleShapes("Weil values have different caps");
  }
}

template <class Op>
WeilValue coefficientwise(const WeilValue& a, const WeilValue& b, Op op) {
  require_same_shape(a, b);
  const auto ca = a.coeffs();
  const auto cb = b.coeffs();
  std::vector<double> out(ca.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(ca[i], cb[i]);
  return WeilValue(a.shape_ptr(), std::move(out));
}

}  // namespace

WeilValue weil_add(const WeilValue& a, const WeilValue& b) {
  return coefficientwise(a, b, [](double x, double y) { return x + y; });
}

WeilValue weil_sub(const WeilValue& a, const WeilValue& b) {
  return coefficientwise(a, b, [](double x, double y) { return x - y; });
}

WeilValue weil_neg(const WeilValue& a) { return weil_scale(a, -1.0); }

WeilValue weil_scale(const WeilValue& a, double s) {
  const auto ca = a.coeffs();
  std::vector<double> out(ca.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * ca[i];
  return WeilValue(a.shape_ptr(), std::move(out));
}

namespace detail {

void mul_accumulate(const WeilShape& shape, std::span<const double> a,
                    std::span<const double> b, std::span<double> out,
                    unsigned max_degree) {
  const std::size_t p = shape.directions();
  const auto& caps = shape.caps();
  const auto& strides = shape.strides();
  const std::size_t dim = shape.dim();
  const std::size_t last = p - 1;

  // Sub-box odometer over the leading p-1 directions; the last direction is
  // contiguous and handled by the inner loop.
  unsigned counter[64];
  unsigned limit[64];
  std::vector<unsigned> counter_heap;
  std::vector<unsigned> limit_heap;
  unsigned* cnt = counter;
  unsigned* lim = limit;
  if (p > 64) {
    counter_heap.resize(p);
    limit_heap.resize(p);
    cnt = counter_heap.data();
    lim = limit_heap.data();
  }

  for (std::size_t ia = 0; ia < dim; ++ia) {
    const double av = a[ia];
    if (av == 0.0) continue;
    const unsigned da = shape.degree(ia);
    if (da > max_degree) continue;
    const auto alpha = shape.digits(ia);
    for (std::size_t j = 0; j < last; ++j) {
      cnt[j] = 0;
      lim[j] = caps[j] - alpha[j];
    }
    const unsigned last_room = caps[last] - alpha[last];
    const unsigned degree_room = max_degree - da;

    std::size_t ib = 0;
    unsigned degb = 0;
    double* dst = out.data() + ia;
    while (true) {
      if (degb <= degree_room) {
        const std::size_t len = std::min(last_room, degree_room - degb) + 1;
        const double* src = b.data() + ib;
        double* d = dst + ib;
        for (std::size_t t = 0; t < len; ++t) d[t] += av * src[t];
      }
      std::size_t j = last;
      while (j-- > 0) {
        ++cnt[j];
        ib += strides[j];
        ++degb;
        if (cnt[j] <= lim[j]) break;
        ib -= cnt[j] * strides[j];
        degb -= cnt[j];
        cnt[j] = 0;
      }
      if (j == static_cast<std::size_t>(-1)) break;
    }
  }
}

}  // namespace detail

WeilValue weil_mul(const WeilValue& a, const WeilValue& b) {
  require_same_shape(a, b);
  const WeilShape& shape = a.shape();
  std::vector<double> out(shape.dim(), 0.0);
  detail::mul_accumulate(shape, a.coeffs(), b.coeffs(), out, shape.max_degree());
  return WeilValue(a.shape_ptr(), std::move(out));
}

WeilValue weil_unary(PrimitiveKind kind, const WeilValue& w, double payload) {
  if (kind == PrimitiveKind::neg) return weil_neg(w);
  if (kind == PrimitiveKind::recip && w.primal() == 0.0) throw DivisionByNilpotent();

  const WeilShape& shape = w.shape();
  const std::size_t dim = shape.dim();
  const double c0 = w.primal();

  if (w.is_constant()) {
    double t = 0.0;
    taylor_coefficients(kind, c0, payload, std::span<double>(&t, 1));
    return WeilValue::constant(w.shape_ptr(), t);
  }

  const unsigned K = shape.max_degree();
  std::vector<double> t(K + 1);
  taylor_coefficients(kind, c0, payload, t);

  std::vector<double> n(w.coeffs().begin(), w.coeffs().end());
  n[0] = 0.0;

  // R_K = t_K; R_l = R_{l+1} * n + t_l. R_l only feeds degrees >= l of the
  // result through n^l, so it is kept to degree <= K - l.
  std::vector<double> acc(dim, 0.0);
  std::vector<double> next(dim, 0.0);
  acc[0] = t[K];
  for (unsigned l = K; l-- > 0;) {
    std::fill(next.begin(), next.end(), 0.0);
    detail::mul_accumulate(shape, acc, n, next, K - l);
    next[0] += t[l];
    acc.swap(next);
  }
  return WeilValue(w.shape_ptr(), std::move(acc));
}

WeilValue weil_recip(const WeilValue& w) {
  if (w.primal() == 0.0) throw DivisionByNilpotent();
  return weil_unary(PrimitiveKind::recip, w);
}

}  // namespace jetweil
