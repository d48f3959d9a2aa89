#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "jetweil/error.hpp"
#include "jetweil/rng.hpp"
#include "jetweil/weil.hpp"

using namespace jetweil;

namespace {

// Brute-force truncated product over explicit exponent vectors, decoding
// indices by repeated division (independent of the shape's tables).
std::vector<unsigned> decode(std::size_t idx, const std::vector<unsigned>& caps) {
  std::vector<unsigned> a(caps.size());
  for (std::size_t j = caps.size(); j-- > 0;) {
    a[j] = static_cast<unsigned>(idx % (caps[j] + 1));
    idx /= caps[j] + 1;
  }
  return a;
}

std::vector<double> naive_mul(const std::vector<unsigned>& caps, std::span<const double> a,
                              std::span<const double> b) {
  const std::size_t dim = a.size();
  std::vector<double> out(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t k = 0; k < dim; ++k) {
      const auto ai = decode(i, caps);
      const auto bk = decode(k, caps);
      bool fits = true;
      std::size_t idx = 0;
      for (std::size_t j = 0; j < caps.size(); ++j) {
        const unsigned e = ai[j] + bk[j];
        if (e > caps[j]) fits = false;
        idx = idx * (caps[j] + 1) + e;
      }
      if (fits) out[idx] += a[i] * b[k];
    }
  }
  return out;
}

WeilValue random_value(const ShapePtr& s, Rng& rng, double c0_lo = -1.0, double c0_hi = 1.0) {
  auto c = rng.vector(s->dim(), -1.0, 1.0);
  c[0] = rng.uniform(c0_lo, c0_hi);
  return WeilValue(s, c);
}

void expect_coeffs_near(const WeilValue& w, const std::vector<double>& expected, double tol) {
  ASSERT_EQ(w.coeffs().size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(w.coeffs()[i], expected[i], tol * std::max(1.0, std::abs(expected[i])))
        << "coefficient " << i;
  }
}

void expect_values_near(const WeilValue& a, const WeilValue& b, double tol) {
  expect_coeffs_near(a, std::vector<double>(b.coeffs().begin(), b.coeffs().end()), tol);
}

}  // namespace

TEST(WeilShape, DimensionIsProductOfCapsPlusOne) {
  EXPECT_EQ(make_shape({2, 1})->dim(), 6u);
  EXPECT_EQ(make_shape({1})->dim(), 2u);
  EXPECT_EQ(make_shape({3, 3, 3})->dim(), 64u);
}

TEST(WeilShape, RejectsInvalidCaps) {
  EXPECT_THROW(make_shape({}), ShapeError);
  EXPECT_THROW(make_shape({2, 0}), ShapeError);
  EXPECT_THROW(make_shape({1000, 1000, 1000}), ShapeTooLarge);
  EXPECT_THROW(make_shape({3, 3}, 15), ShapeTooLarge);
  EXPECT_NO_THROW(make_shape({3, 3}, 16));
}

TEST(WeilShape, IndexIsABijectionWithDegreeZeroFirst) {
  const auto s = make_shape({2, 3, 1});
  EXPECT_EQ(s->strides().back(), 1u);
  std::vector<bool> seen(s->dim(), false);
  for (std::size_t i = 0; i < s->dim(); ++i) {
    const MultiIndex a = s->multi_index(i);
    EXPECT_EQ(s->index(a), i);
    EXPECT_EQ(s->degree(i), a.total_degree());
    EXPECT_EQ(a.exponents, decode(i, s->caps()));
    seen[i] = true;
  }
  EXPECT_EQ(s->multi_index(0).total_degree(), 0u);
  EXPECT_EQ(s->max_degree(), 6u);
}

TEST(WeilShape, ComparesByCaps) {
  EXPECT_EQ(*make_shape({2, 1}), *make_shape({2, 1}));
  EXPECT_FALSE(*make_shape({2, 1}) == *make_shape({1, 2}));
}

TEST(MultiIndex, FactorialAndGradedOrder) {
  EXPECT_DOUBLE_EQ((MultiIndex{{3, 2}}).factorial(), 12.0);
  EXPECT_TRUE(graded_less(MultiIndex{{2, 0}}, MultiIndex{{0, 3}}));
  EXPECT_TRUE(graded_less(MultiIndex{{0, 2}}, MultiIndex{{1, 1}}));
  EXPECT_FALSE(graded_less(MultiIndex{{1, 1}}, MultiIndex{{1, 1}}));
}

TEST(WeilAdd, Examples) {
  const auto s = make_shape({1});
  const WeilValue a(s, {1, 1}), b(s, {2, 3});
  expect_coeffs_near(a + b, {3, 4}, 0);
  expect_coeffs_near(a + WeilValue(s), {1, 1}, 0);
  expect_coeffs_near(a + (-a), {0, 0}, 0);
  EXPECT_THROW(a + WeilValue(make_shape({2})), IncompatibleShapes);
}

TEST(WeilMul, Examples) {
  const auto s2 = make_shape({2});
  const WeilValue one_eps(s2, {1, 1, 0});
  expect_coeffs_near(one_eps * one_eps, {1, 2, 1}, 0);
  expect_coeffs_near(one_eps * WeilValue::constant(s2, 1.0), {1, 1, 0}, 0);

  const auto s1 = make_shape({1});
  const WeilValue eps = WeilValue::generator(s1, 0);
  expect_coeffs_near(eps * eps, {0, 0}, 0);
  EXPECT_THROW(eps * one_eps, IncompatibleShapes);
}

TEST(WeilMul, MatchesBruteForceConvolution) {
  Rng rng(7);
  for (const std::vector<unsigned>& caps :
       {std::vector<unsigned>{4}, {2, 1}, {1, 1, 1}, {3, 2, 2}, {1, 4}, {2, 2, 1, 1}}) {
    const auto s = make_shape(caps);
    for (int t = 0; t < 5; ++t) {
      const WeilValue a = random_value(s, rng), b = random_value(s, rng);
      expect_coeffs_near(a * b, naive_mul(caps, a.coeffs(), b.coeffs()), 1e-14);
    }
  }
}

TEST(WeilMul, GeneratorPowersVanishExactlyPastTheCap) {
  const auto s = make_shape({3, 1, 2});
  for (std::size_t j = 0; j < s->directions(); ++j) {
    const WeilValue g = WeilValue::generator(s, j);
    WeilValue pw = WeilValue::constant(s, 1.0);
    for (unsigned e = 0; e <= s->caps()[j]; ++e) pw = pw * g;
    for (double c : pw.coeffs()) EXPECT_EQ(c, 0.0);
  }
}

TEST(WeilRing, CommutativeAssociativeDistributive) {
  Rng rng(11);
  const auto s = make_shape({2, 2, 1});
  for (int t = 0; t < 50; ++t) {
    const WeilValue a = random_value(s, rng), b = random_value(s, rng), c = random_value(s, rng);
    expect_values_near(a + b, b + a, 1e-14);
    expect_values_near(a * b, b * a, 1e-14);
    expect_values_near((a + b) + c, a + (b + c), 1e-14);
    expect_values_near((a * b) * c, a * (b * c), 1e-14);
    expect_values_near(a * (b + c), a * b + a * c, 1e-14);
  }
}

TEST(WeilUnary, ExpLogExamples) {
  const auto s = make_shape({2});
  expect_coeffs_near(weil_unary(PrimitiveKind::exp, WeilValue(s, {0, 1, 0})), {1, 1, 0.5}, 1e-15);
  expect_coeffs_near(weil_unary(PrimitiveKind::log, WeilValue(s, {1, 1, 0})), {0, 1, -0.5}, 1e-15);
}

TEST(WeilUnary, ConstantArgumentGivesConstantJet) {
  const auto s = make_shape({1});
  for (PrimitiveKind k : {PrimitiveKind::exp, PrimitiveKind::sin, PrimitiveKind::tanh,
                          PrimitiveKind::sqrt, PrimitiveKind::log}) {
    const WeilValue r = weil_unary(k, WeilValue::constant(s, 0.7));
    EXPECT_DOUBLE_EQ(r.coeffs()[0], apply_unary(k, 0.7));
    EXPECT_EQ(r.coeffs()[1], 0.0);
  }
}

TEST(WeilUnary, SeriesOfEachPrimitiveAtAPoint) {
  // Maclaurin-type expansions of phi(c + eps) with hand-derived coefficients.
  const auto s = make_shape({3});
  const double c = 0.5;
  const WeilValue w(s, {c, 1, 0, 0});
  const double sc = std::sin(c), cc = std::cos(c), th = std::tanh(c);
  const double sech2 = 1 - th * th;
  expect_coeffs_near(weil_unary(PrimitiveKind::sin, w), {sc, cc, -sc / 2, -cc / 6}, 1e-15);
  expect_coeffs_near(weil_unary(PrimitiveKind::cos, w), {cc, -sc, -cc / 2, sc / 6}, 1e-15);
  expect_coeffs_near(weil_unary(PrimitiveKind::tanh, w),
                     {th, sech2, -th * sech2, sech2 * (3 * th * th - 1) / 3}, 1e-15);
  expect_coeffs_near(weil_unary(PrimitiveKind::sqrt, w),
                     {std::sqrt(c), 0.5 / std::sqrt(c), -0.125 / std::pow(c, 1.5),
                      0.0625 / std::pow(c, 2.5)},
                     1e-14);
  expect_coeffs_near(weil_unary(PrimitiveKind::recip, w), {2, -4, 8, -16}, 1e-15);
  expect_coeffs_near(weil_unary(PrimitiveKind::pow_const, w, 3.0), {0.125, 0.75, 1.5, 1}, 1e-15);
  expect_coeffs_near(weil_unary(PrimitiveKind::neg, w), {-c, -1, 0, 0}, 0);
}

TEST(WeilUnary, DomainErrorsCarryThePrimal) {
  const auto s = make_shape({1});
  try {
    weil_unary(PrimitiveKind::log, WeilValue(s, {-2, 1}));
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.primal(), -2.0);
    EXPECT_EQ(e.primitive(), "log");
  }
  EXPECT_THROW(weil_unary(PrimitiveKind::sqrt, WeilValue(s, {0, 1})), DomainError);
}

TEST(WeilUnary, ExpOfLogIsIdentity) {
  Rng rng(3);
  const auto s = make_shape({2, 2});
  for (int t = 0; t < 50; ++t) {
    const WeilValue w = random_value(s, rng, 0.1, 3.0);
    const WeilValue r = weil_unary(PrimitiveKind::exp, weil_unary(PrimitiveKind::log, w));
    expect_values_near(r, w, 1e-10);
  }
}

TEST(WeilRecip, Examples) {
  const auto s1 = make_shape({1});
  expect_coeffs_near(weil_recip(WeilValue(s1, {2, 1})), {0.5, -0.25}, 0);
  expect_coeffs_near(weil_recip(WeilValue::constant(s1, 1.0)), {1, 0}, 0);
  const auto s2 = make_shape({2});
  expect_coeffs_near(weil_recip(WeilValue(s2, {1, 1, 0})), {1, -1, 1}, 0);
  EXPECT_THROW(weil_recip(WeilValue::generator(s1, 0)), DivisionByNilpotent);
}

TEST(WeilRecip, ProductWithInverseIsOne) {
  Rng rng(5);
  const auto s = make_shape({2, 1, 2});
  for (int t = 0; t < 50; ++t) {
    WeilValue w = random_value(s, rng, 0.5, 2.0);
    if (rng.chance(0.5)) w = -w;
    const WeilValue one = w * weil_recip(w);
    std::vector<double> expected(s->dim(), 0.0);
    expected[0] = 1.0;
    expect_coeffs_near(one, expected, 1e-12);
  }
}
