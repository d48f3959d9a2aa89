#include <gtest/gtest.h>

#include <cmath>

#include "jetweil/error.hpp"
#include "jetweil/jet.hpp"
#include "jetweil/oracle.hpp"
#include "jetweil/random_program.hpp"
#include "jetweil/rng.hpp"

using namespace jetweil;

TEST(SparsePoly, Arithmetic) {
  const SparsePoly a = SparsePoly::variable(2, 0), b = SparsePoly::variable(2, 1);
  const SparsePoly p = (a + b) * a;
  EXPECT_EQ(p, a * a + a * b);
  EXPECT_EQ(p.coefficient({2, 0}), 1.0);
  EXPECT_EQ(p.coefficient({1, 1}), 1.0);
  EXPECT_EQ(p.total_degree(), 2u);
  EXPECT_TRUE((p - p).is_zero());
  EXPECT_EQ(a.pow(3).coefficient({3, 0}), 1.0);
  EXPECT_EQ(a.pow(0), SparsePoly::constant(2, 1.0));
  EXPECT_DOUBLE_EQ(p.evaluate(std::vector<double>{2, 3}), 10.0);
}

TEST(SparsePoly, Partials) {
  const SparsePoly x = SparsePoly::variable(2, 0), y = SparsePoly::variable(2, 1);
  const SparsePoly x2y = x * x * y;
  const SparsePoly d = x2y.partial(std::vector<unsigned>{1, 1});
  EXPECT_EQ(d, SparsePoly::constant(2, 2.0) * x);
  EXPECT_DOUBLE_EQ(d.evaluate(std::vector<double>{1, 5}), 2.0);
  EXPECT_EQ(x2y.partial(std::vector<unsigned>{0, 0}), x2y);
  EXPECT_TRUE((x * x).partial(std::vector<unsigned>{3, 0}).is_zero());
}

TEST(SymbolicEval, PolynomialPrograms) {
  const auto sq = symbolic_eval(parse_program("input x\ny = mul x x\noutput y"));
  ASSERT_EQ(sq.size(), 1u);
  EXPECT_EQ(sq[0], SparsePoly::variable(1, 0) * SparsePoly::variable(1, 0));

  const auto p = symbolic_eval(parse_program("input x\nc = const 2\ny = pow x 3\nz = sub y c\noutput z"));
  EXPECT_EQ(p[0].coefficient({3}), 1.0);
  EXPECT_EQ(p[0].coefficient({0}), -2.0);

  EXPECT_THROW(symbolic_eval(parse_program("input x\ny = sin x\noutput y")), Unsupported);
  EXPECT_THROW(symbolic_eval(parse_program("input x\ny = pow x 0.5\noutput y")), Unsupported);
  EXPECT_THROW(symbolic_eval(parse_program("input x\ny = pow x -1\noutput y")), Unsupported);
}

TEST(FiniteDifference, Examples) {
  const Program sq = parse_program("input x\ny = mul x x\noutput y");
  EXPECT_NEAR(finite_difference(sq, std::vector<double>{0.7}, std::vector<unsigned>{2}, 1e-3)[0],
              2.0, 1e-6);
  const Program c = parse_program("input x\ny = const 3\noutput y");
  EXPECT_EQ(finite_difference(c, std::vector<double>{0.7}, std::vector<unsigned>{1})[0], 0.0);
  const Program e = parse_program("input x\ny = exp x\noutput y");
  EXPECT_NEAR(finite_difference(e, std::vector<double>{0.0}, std::vector<unsigned>{1}, 1e-5)[0],
              1.0, 1e-9);
  EXPECT_THROW(finite_difference(e, std::vector<double>{0.0}, std::vector<unsigned>{5}), Unsupported);
  EXPECT_GT(default_fd_step(std::vector<double>{0.0}, 1), 0.0);
}

TEST(FiniteDifference, MixedPartialOfPolynomial) {
  const Program p = parse_program("input x y\nx2 = mul x x\nz = mul x2 y\noutput z");
  EXPECT_NEAR(finite_difference(p, std::vector<double>{1, 2}, std::vector<unsigned>{1, 1})[0], 2.0,
              1e-6);
  EXPECT_NEAR(finite_difference(p, std::vector<double>{1, 2}, std::vector<unsigned>{2, 1})[0], 2.0,
              1e-4);
}

TEST(UnivariateTaylor, KnownSeries) {
  const double one = 1.0, zero = 0.0;
  const auto e = univariate_taylor(parse_program("input x\ny = exp x\noutput y"), {&zero, 1},
                                   {&one, 1}, 5);
  double f = 1.0;
  for (unsigned l = 0; l <= 5; ++l) {
    if (l > 0) f *= l;
    EXPECT_NEAR(e[0][l], 1.0 / f, 1e-16);
  }
  const auto lg = univariate_taylor(parse_program("input x\ny = log x\noutput y"), {&one, 1},
                                    {&one, 1}, 4);
  const std::vector<double> log_series{0, 1, -0.5, 1.0 / 3, -0.25};
  for (unsigned l = 0; l <= 4; ++l) EXPECT_NEAR(lg[0][l], log_series[l], 1e-15);

  const double four = 4.0;
  const auto s = univariate_taylor(parse_program("input x\ny = sqrt x\noutput y"), {&four, 1},
                                   {&one, 1}, 3);
  const std::vector<double> sqrt_series{2, 0.25, -1.0 / 64, 1.0 / 512};
  for (unsigned l = 0; l <= 3; ++l) EXPECT_NEAR(s[0][l], sqrt_series[l], 1e-15);

  const double half = 0.5;
  const auto r = univariate_taylor(parse_program("input x\ny = recip x\noutput y"), {&half, 1},
                                   {&one, 1}, 3);
  const std::vector<double> recip_series{2, -4, 8, -16};
  for (unsigned l = 0; l <= 3; ++l) EXPECT_NEAR(r[0][l], recip_series[l], 1e-13);

  const double two = 2.0;
  const auto pw = univariate_taylor(parse_program("input x\ny = pow x 2.5\noutput y"), {&two, 1},
                                    {&one, 1}, 2);
  EXPECT_NEAR(pw[0][0], std::pow(2.0, 2.5), 1e-14);
  EXPECT_NEAR(pw[0][1], 2.5 * std::pow(2.0, 1.5), 1e-14);
  EXPECT_NEAR(pw[0][2], 2.5 * 1.5 / 2 * std::pow(2.0, 0.5), 1e-14);
}

TEST(NestedSchedule, PassCounts) {
  EXPECT_EQ(binomial(4, 2), 6u);
  EXPECT_EQ(binomial(6, 3), 20u);
  EXPECT_EQ(compositions(2, 2),
            (std::vector<std::vector<unsigned>>{{0, 2}, {1, 1}, {2, 0}}));

  const Program p = parse_program("input x y\nt = mul x y\ns = sin t\noutput s");
  const std::vector<double> x{0.3, 0.4};
  const std::vector<std::vector<double>> e2{{1, 0}, {0, 1}};
  EXPECT_EQ(nested_jvp_schedule(p, x, e2, 2).count.passes, 6u);
  EXPECT_EQ(nested_jvp_schedule(p, x, {{1, 0}}, 1).count.passes, 2u);
  for (unsigned pp = 1; pp <= 4; ++pp) {
    for (unsigned k = 0; k <= 4; ++k) {
      std::vector<std::vector<double>> dirs(pp, std::vector<double>(2, 0.0));
      for (unsigned j = 0; j < pp; ++j) dirs[j][j % 2] = 1.0 + j;
      const NestedResult r = nested_jvp_schedule(p, x, dirs, k);
      EXPECT_EQ(r.count.passes, binomial(pp + k, k)) << pp << " " << k;
      EXPECT_EQ(r.entries.size(), binomial(pp + k, k));
    }
  }
}

TEST(NestedSchedule, MatchesWeilEvaluation) {
  Rng rng(8);
  const Program p = random_program(8, 25, 3, true);
  const auto x = rng.vector(3, -1, 1);
  const std::vector<std::vector<double>> dirs{rng.vector(3, -1, 1), rng.vector(3, -1, 1),
                                              rng.vector(3, -1, 1)};
  const NestedResult r = nested_jvp_schedule(p, x, dirs, 3);
  EXPECT_EQ(r.count.passes, 20u);
  EXPECT_FALSE(r.ill_conditioned);
  const DerivativeTable t = taylor_eval(p, SeedSpec{x, dirs, {3, 3, 3}});
  for (const DerivativeEntry& e : r.entries) {
    const auto w = t.entry(e.alpha);
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_LE(std::abs(w[i] - e.value[i]) / std::max(1.0, std::abs(w[i])), 1e-8);
    }
  }
}

TEST(NestedSchedule, PolynomialAgreesWithSymbolicPartials) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RandomProgramOptions o;
    o.depth = 12;
    o.n_inputs = 2;
    o.family = ProgramFamily::polynomial;
    const Program p = random_program(seed, o);
    Rng rng(seed);
    const auto x = rng.vector(2, -1, 1);
    const NestedResult r = nested_jvp_schedule(p, x, {{1, 0}, {0, 1}}, 3);
    const auto polys = symbolic_eval(p);
    for (const DerivativeEntry& e : r.entries) {
      const auto ref = symbolic_partial(polys, e.alpha.exponents, x);
      for (std::size_t i = 0; i < ref.size(); ++i) {
        EXPECT_LE(std::abs(ref[i] - e.value[i]) / std::max(1.0, std::abs(ref[i])), 1e-8);
      }
    }
  }
}
