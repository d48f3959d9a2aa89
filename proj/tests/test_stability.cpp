#include <gtest/gtest.h>

#include <cmath>

#include "jetweil/modes.hpp"
#include "jetweil/random_program.hpp"
#include "jetweil/rng.hpp"
#include "jetweil/stability.hpp"
#include "jetweil/verify.hpp"

using namespace jetweil;

namespace {

Node node_of(PrimitiveKind op, double payload = 0.0) {
  Node n;
  n.op = op;
  n.payload = payload;
  return n;
}

double lip(PrimitiveKind op, std::vector<double> a) { return adjoint_lipschitz(node_of(op), a); }
ConditionEstimate cond(PrimitiveKind op, std::vector<double> a, double payload = 0.0) {
  return condition_estimate(node_of(op, payload), a);
}

}  // namespace

TEST(Lipschitz, LocalAdjointNorms) {
  EXPECT_DOUBLE_EQ(lip(PrimitiveKind::mul, {3, 4}), 5.0);
  EXPECT_DOUBLE_EQ(lip(PrimitiveKind::sin, {0}), 1.0);
  EXPECT_DOUBLE_EQ(lip(PrimitiveKind::add, {1, 2}), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(lip(PrimitiveKind::sub, {1, 2}), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(lip(PrimitiveKind::exp, {1}), std::exp(1.0));
  EXPECT_DOUBLE_EQ(lip(PrimitiveKind::neg, {5}), 1.0);
  EXPECT_DOUBLE_EQ(adjoint_lipschitz(node_of(PrimitiveKind::const_val), {}), 0.0);
}

TEST(Condition, PrimitiveValues) {
  EXPECT_DOUBLE_EQ(cond(PrimitiveKind::mul, {2, 7}).kappa, 1.0);
  EXPECT_DOUBLE_EQ(cond(PrimitiveKind::exp, {0}).kappa, 0.0);
  EXPECT_DOUBLE_EQ(cond(PrimitiveKind::exp, {10}).kappa, 10.0);
  EXPECT_DOUBLE_EQ(cond(PrimitiveKind::sqrt, {4}).kappa, 0.5);
  EXPECT_DOUBLE_EQ(cond(PrimitiveKind::pow_const, {2}, -3.0).kappa, 3.0);
  EXPECT_DOUBLE_EQ(cond(PrimitiveKind::add, {1, 1}).kappa, 1.0);
  EXPECT_DOUBLE_EQ(cond(PrimitiveKind::sub, {3, 1}).kappa, 2.0);
  EXPECT_FALSE(cond(PrimitiveKind::exp, {10}).singular);

  const ConditionEstimate at_one = cond(PrimitiveKind::log, {1});
  EXPECT_TRUE(at_one.singular);
  EXPECT_DOUBLE_EQ(at_one.kappa, 1.0 / kUnitRoundoff);
  EXPECT_TRUE(cond(PrimitiveKind::sub, {1, 1}).singular);
  EXPECT_DOUBLE_EQ(relative_error_term(1.0), 4 * kUnitRoundoff);
}

TEST(ReverseStep, NormOfRankOneUpdate) {
  // t = 6 for x*x at 3: both partials land on the same slot
  const double t = 6.0;
  Node sq = node_of(PrimitiveKind::mul);
  EXPECT_DOUBLE_EQ(reverse_step_norm(sq, std::vector<double>{3, 3}), (t + std::sqrt(t * t + 4)) / 2);
  EXPECT_DOUBLE_EQ(reverse_step_norm(node_of(PrimitiveKind::const_val), {}), 1.0);
}

TEST(StabilityBound, IdentityIsTight) {
  const Program id = parse_program("input x y\noutput x y");
  const StabilityReport r = stability_bound(id, std::vector<double>{1, 2}, {{3, 4}});
  EXPECT_DOUBLE_EQ(r.omega_norm, 5.0);
  EXPECT_DOUBLE_EQ(r.product_bound, 5.0);
  EXPECT_DOUBLE_EQ(r.observed_norm, 5.0);
  EXPECT_TRUE(r.holds());
}

TEST(StabilityBound, SquareAtThree) {
  const Program sq = parse_program("input x\ny = mul x x\noutput y");
  const StabilityReport r = stability_bound(sq, std::vector<double>{3}, {{1}});
  ASSERT_EQ(r.per_node.size(), 1u);
  EXPECT_DOUBLE_EQ(r.per_node[0].lipschitz, std::sqrt(18.0));
  EXPECT_DOUBLE_EQ(r.observed_norm, 6.0);
  EXPECT_GE(r.product_bound, 6.0);
  EXPECT_TRUE(r.holds());
}

TEST(StabilityBound, ZeroDeltaAndMonotoneInConstant) {
  const Program p = random_program(12, 40, 3, true);
  const std::vector<double> x{0.2, -0.5, 0.9};
  const CoVector omega{std::vector<double>(p.n_outputs(), 1.0)};
  const StabilityReport r0 = stability_bound(p, x, omega, {0.0});
  const StabilityReport r4 = stability_bound(p, x, omega, {4.0});
  const StabilityReport r8 = stability_bound(p, x, omega, {8.0});
  EXPECT_EQ(r0.first_order_error, 0.0);
  for (const StabilityRow& row : r0.per_node) EXPECT_EQ(row.delta, 0.0);
  EXPECT_TRUE(r0.holds());
  EXPECT_LE(r0.product_bound, r4.product_bound);
  EXPECT_LE(r4.product_bound, r8.product_bound);
  EXPECT_LE(r4.first_order_error, r8.first_order_error);
}

TEST(StabilityBound, ReverseSweepOrder) {
  const Program p = random_program(4, 10, 2, true);
  const StabilityReport r = stability_bound(p, std::vector<double>{0.1, 0.2}, {std::vector<double>(p.n_outputs(), 1.0)});
  ASSERT_EQ(r.per_node.size(), p.node_count());
  for (std::size_t i = 0; i < r.per_node.size(); ++i) {
    EXPECT_EQ(r.per_node[i].node, p.node_count() - 1 - i);
  }
}

TEST(StabilityBound, RandomSafePrograms) {
  SuiteOptions o;
  o.seed = 31;
  o.count = 100;
  const SuiteResult r = run_suite("stability", o);
  EXPECT_EQ(r.violations, 0u);
  EXPECT_TRUE(r.pass());
}

TEST(StabilityBound, HoldsForRepeatedOutputs) {
  // the same slot listed twice as an output receives both seeds
  const Program p = parse_program("input x\ny = sin x\noutput y y");
  const StabilityReport r = stability_bound(p, std::vector<double>{0.0}, {{1, 1}});
  EXPECT_DOUBLE_EQ(r.observed_norm, 2.0);
  EXPECT_TRUE(r.holds());
}
