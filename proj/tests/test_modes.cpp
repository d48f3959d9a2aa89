#include <gtest/gtest.h>

#include <cmath>

#include "jetweil/error.hpp"
#include "jetweil/jet.hpp"
#include "jetweil/modes.hpp"
#include "jetweil/oracle.hpp"
#include "jetweil/program.hpp"
#include "jetweil/random_program.hpp"
#include "jetweil/rng.hpp"
#include "jetweil/verify.hpp"

using namespace jetweil;

namespace {

const Program& product_program() {
  static const Program p = parse_program("input a b\nz = mul a b\noutput z");
  return p;
}

Program identity_program(std::size_t n) {
  ProgramBuilder b(n);
  for (std::size_t i = 0; i < n; ++i) b.output(b.input(i));
  return std::move(b).build();
}

}  // namespace

TEST(Jvp, Examples) {
  EXPECT_EQ(jvp(product_program(), std::vector<double>{3, 5}, {{1, 0}}).components,
            std::vector<double>{5});
  const Program id = identity_program(3);
  EXPECT_EQ(jvp(id, std::vector<double>{1, 2, 3}, {{0.5, -1, 2}}).components,
            (std::vector<double>{0.5, -1, 2}));
  const Program s = parse_program("input x\ny = sin x\noutput y");
  EXPECT_EQ(jvp(s, std::vector<double>{0}, {{1}}).components, std::vector<double>{1});
  EXPECT_THROW(jvp(s, std::vector<double>{0}, {{1, 2}}), DimensionMismatch);
}

TEST(Vjp, Examples) {
  EXPECT_EQ(vjp(product_program(), std::vector<double>{3, 5}, {{1}}).components,
            (std::vector<double>{5, 3}));
  const Program id = identity_program(2);
  EXPECT_EQ(vjp(id, std::vector<double>{7, 8}, {{0.25, -4}}).components,
            (std::vector<double>{0.25, -4}));
  const Program sq = parse_program("input x\ny = mul x x\noutput y");
  EXPECT_EQ(vjp(sq, std::vector<double>{3}, {{1}}).components, std::vector<double>{6});
  EXPECT_THROW(vjp(sq, std::vector<double>{3}, {{1, 1}}), DimensionMismatch);
}

TEST(Vjp, FanOutAccumulates) {
  // y = sin(x) * x + x: x feeds three uses
  const Program p = parse_program("input x\ns = sin x\nm = mul s x\ny = add m x\noutput y");
  const double x = 0.7;
  const double expected = std::cos(x) * x + std::sin(x) + 1.0;
  EXPECT_NEAR(vjp(p, std::vector<double>{x}, {{1}}).components[0], expected, 1e-15);
}

TEST(Tape, RecordsEverySlotAndIsSingleUse) {
  const Program p = random_program(3, 20, 3, true);
  const std::vector<double> x{0.1, -0.2, 0.3};
  Tape tape(p, x);
  EXPECT_EQ(tape.primals().size(), p.n_inputs() + p.node_count());
  EXPECT_EQ(tape.adjoints().size(), tape.primals().size());
  for (double a : tape.adjoints()) EXPECT_EQ(a, 0.0);

  const std::vector<double> omega(p.n_outputs(), 1.0);
  const auto first = tape.pullback(omega);
  EXPECT_EQ(tape.nodes_visited(), p.node_count());
  EXPECT_THROW(tape.pullback(omega), Error);
  tape.reset();
  for (double a : tape.adjoints()) EXPECT_EQ(a, 0.0);
  EXPECT_EQ(tape.pullback(omega), first);
}

TEST(Instrumentation, CountsTapesAndAdjointSlots) {
  instrumentation::reset_counters();
  const Program p = random_program(5, 40, 4, true);
  const std::vector<double> x(4, 0.3);
  (void)vjp(p, x, CoVector{std::vector<double>(p.n_outputs(), 1.0)});
  EXPECT_EQ(instrumentation::tapes_created(), 1u);
  EXPECT_EQ(instrumentation::adjoint_slots_allocated(), p.n_inputs() + p.node_count());

  instrumentation::reset_counters();
  (void)jvp(p, x, TangentVector{std::vector<double>(4, 1.0)});
  (void)taylor_eval(p, SeedSpec::basis(x, 2u));
  EXPECT_EQ(instrumentation::tapes_created(), 0u);
  EXPECT_EQ(instrumentation::adjoint_slots_allocated(), 0u);
}

TEST(Pairing, LinearProgramsAreExact) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    ProgramBuilder b(3);
    Slot acc = b.add(PrimitiveKind::mul, {b.constant(rng.uniform(-2, 2)), b.input(0)});
    for (int k = 0; k < 10; ++k) {
      const Slot term =
          b.add(PrimitiveKind::mul, {b.constant(rng.uniform(-2, 2)), b.input(rng.index(3))});
      acc = b.add(rng.chance(0.5) ? PrimitiveKind::add : PrimitiveKind::sub, {acc, term});
    }
    b.output(acc);
    b.output(b.add(PrimitiveKind::neg, {acc}));
    const Program p = std::move(b).build();
    const auto x = rng.vector(3, -1, 1);
    EXPECT_LE(pairing_residual(p, x, {rng.vector(3, -1, 1)}, {rng.vector(2, -1, 1)}), 1e-13);
  }
}

TEST(Pairing, ZeroTangentGivesZero) {
  const Program p = random_program(9, 25, 3, true);
  EXPECT_EQ(pairing_residual(p, std::vector<double>{0.1, 0.2, 0.3}, {{0, 0, 0}},
                             {std::vector<double>(p.n_outputs(), 1.0)}),
            0.0);
}

TEST(Pairing, RandomSafePrograms) {
  SuiteOptions o;
  o.seed = 2024;
  o.count = 300;
  const SuiteResult r = run_suite("duality", o);
  EXPECT_TRUE(r.pass()) << r.max_residual;
  EXPECT_LE(r.max_residual, 1e-10);
}

TEST(Compose, IdentityAndHandChainRule) {
  const Program id = identity_program(1);
  EXPECT_EQ(compose_vjp_check(id, id, std::vector<double>{0.4}, {{1}}), 0.0);

  const Program f = parse_program("input x\ny = mul x x\noutput y");
  const Program g = parse_program("input y\nz = sin y\noutput z");
  EXPECT_LE(compose_vjp_check(f, g, std::vector<double>{1.0}, {{1}}), 1e-13);
  const Program gf = compose(f, g);
  EXPECT_EQ(gf.n_inputs(), 1u);
  EXPECT_EQ(gf.node_count(), 2u);
  EXPECT_NEAR(vjp(gf, std::vector<double>{1.0}, {{1}}).components[0], 2 * std::cos(1.0), 1e-15);
  EXPECT_THROW(compose(parse_program("input a b\noutput a b"), g), DimensionMismatch);
}

TEST(Compose, RandomPairs) {
  SuiteOptions o;
  o.seed = 77;
  o.count = 200;
  const SuiteResult r = run_suite("functoriality", o);
  EXPECT_TRUE(r.pass()) << r.max_residual;
}

TEST(Gradient, MatchesCentralDifferences) {
  // step 1e-5, inputs in [-1, 1], relative error 1e-6
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const Program p = random_program(seed, 1 + seed % 30, 1 + seed % 4, true);
    const auto x = rng.vector(p.n_inputs(), -1, 1);
    const CoVector omega{rng.vector(p.n_outputs(), -1, 1)};
    const auto g = vjp(p, x, omega).components;
    for (std::size_t i = 0; i < p.n_inputs(); ++i) {
      std::vector<unsigned> alpha(p.n_inputs(), 0);
      alpha[i] = 1;
      const double fd = dot(omega.components, finite_difference(p, x, alpha, 1e-5));
      EXPECT_LE(std::abs(g[i] - fd) / std::max(1.0, std::abs(fd)), 1e-6) << "seed " << seed;
    }
  }
}

TEST(CrossMode, JvpEqualsFirstOrderWeilCoefficient) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    const Program p = random_program(seed, 1 + seed % 50, 1 + seed % 6, seed % 2 == 0);
    const auto x = rng.vector(p.n_inputs(), -1, 1);
    const auto v = rng.vector(p.n_inputs(), -1, 1);
    const auto ydot = jvp(p, x, {v}).components;
    SeedSpec spec{x, {v}, {1}};
    const DerivativeTable t = taylor_eval(p, spec);
    const auto w = t.coeff(MultiIndex{{1}});
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_LE(std::abs(w[i] - ydot[i]), 1e-13 * std::max(1.0, std::abs(ydot[i])));
    }
  }
}
