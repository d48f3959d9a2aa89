#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "jetweil/error.hpp"
#include "jetweil/evaluate.hpp"
#include "jetweil/jet.hpp"
#include "jetweil/modes.hpp"
#include "jetweil/program.hpp"
#include "jetweil/random_program.hpp"
#include "jetweil/rng.hpp"

using namespace jetweil;

namespace {

ParseError::Kind parse_error_kind(const std::string& text) {
  try {
    parse_program(text);
  } catch (const ParseError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no ParseError for:\n" << text;
  return ParseError::Kind::syntax;
}

}  // namespace

TEST(Parse, MinimalSquareProgram) {
  const Program p = parse_program("input x\n y = mul x x\n output y");
  EXPECT_EQ(p.n_inputs(), 1u);
  EXPECT_EQ(p.node_count(), 1u);
  EXPECT_EQ(p.n_outputs(), 1u);
  EXPECT_EQ(p.nodes()[0].op, PrimitiveKind::mul);
}

TEST(Parse, RoundTripThroughPrinter) {
  const Program p = parse_program("input a b\n t = mul a b\n s = sin t\n output s");
  EXPECT_EQ(p.n_inputs(), 2u);
  EXPECT_EQ(p.node_count(), 2u);
  EXPECT_EQ(parse_program(print_program(p)), p);
}

TEST(Parse, RoundTripRandomPrograms) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    RandomProgramOptions o;
    o.depth = 1 + seed % 40;
    o.n_inputs = 1 + seed % 5;
    o.family = seed % 2 ? ProgramFamily::guarded : ProgramFamily::polynomial;
    const Program p = random_program(seed, o);
    EXPECT_EQ(parse_program(print_program(p)), p) << print_program(p);
  }
}

TEST(Parse, CommentsConstantsAndPow) {
  const Program p = parse_program(
      "# leading comment\n"
      "input x\n"
      "c = const 3.5   # trailing\n"
      "\n"
      "y = pow x 2.5\n"
      "z = mul c y\n"
      "output z\n");
  ASSERT_EQ(p.node_count(), 3u);
  EXPECT_EQ(p.nodes()[0].payload, 3.5);
  EXPECT_EQ(p.nodes()[1].payload, 2.5);
  const double x = 1.7;
  EXPECT_DOUBLE_EQ(eval_primal(p, std::vector<double>{x})[0], 3.5 * std::pow(x, 2.5));
}

TEST(Parse, DivIsDesugaredToRecipAndMul) {
  const Program p = parse_program("input a b\nq = div a b\noutput q\n");
  ASSERT_EQ(p.node_count(), 2u);
  EXPECT_EQ(p.nodes()[0].op, PrimitiveKind::recip);
  EXPECT_EQ(p.nodes()[1].op, PrimitiveKind::mul);
  EXPECT_DOUBLE_EQ(eval_primal(p, std::vector<double>{3.0, 4.0})[0], 0.75);
}

TEST(Parse, DistinctDiagnostics) {
  EXPECT_EQ(parse_error_kind("output z"), ParseError::Kind::undefined_name);
  EXPECT_EQ(parse_error_kind("input x\ny = mul x q\noutput y"), ParseError::Kind::undefined_name);
  EXPECT_EQ(parse_error_kind("input x\ny = mul x z\nz = sin x\noutput y"),
            ParseError::Kind::use_before_definition);
  EXPECT_EQ(parse_error_kind("input x\ny = sin x x\noutput y"), ParseError::Kind::arity_mismatch);
  EXPECT_EQ(parse_error_kind("input x\ny = add x\noutput y"), ParseError::Kind::arity_mismatch);
  EXPECT_EQ(parse_error_kind("input x\ny = sin x\ny = cos x\noutput y"),
            ParseError::Kind::duplicate_name);
  EXPECT_EQ(parse_error_kind("input x x\noutput x"), ParseError::Kind::duplicate_name);
  EXPECT_EQ(parse_error_kind("input x\ny = frob x\noutput y"), ParseError::Kind::syntax);
  EXPECT_EQ(parse_error_kind("input x\ny = const abc\noutput y"), ParseError::Kind::syntax);
  EXPECT_EQ(parse_error_kind("input x\n1y = sin x\noutput 1y"), ParseError::Kind::syntax);
}

TEST(Parse, ReportsLineAndColumn) {
  try {
    parse_program("input x\ny = mul x x\nz = frobnicate y\noutput z\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 5u);
  }
}

TEST(EvalPrimal, Examples) {
  const Program sq = parse_program("input x\ny = mul x x\noutput y");
  EXPECT_EQ(eval_primal(sq, std::vector<double>{3.0})[0], 9.0);

  const Program sab = parse_program("input a b\nt = mul a b\ns = sin t\noutput s");
  EXPECT_NEAR(eval_primal(sab, std::vector<double>{1.0, std::numbers::pi})[0], 0.0, 1e-15);

  const Program lg = parse_program("input x\ny = sin x\nz = log x\noutput z");
  try {
    eval_primal(lg, std::vector<double>{-1.0});
    FAIL();
  } catch (const DomainError& e) {
    ASSERT_TRUE(e.node().has_value());
    EXPECT_EQ(*e.node(), 1u);
    EXPECT_EQ(e.primitive(), "log");
  }
}

TEST(EvalPrimal, OverflowAndArity) {
  const Program p = parse_program("input x\na = exp x\nb = exp a\nc = exp b\noutput c");
  try {
    eval_primal(p, std::vector<double>{5.0});
    FAIL();
  } catch (const NumericOverflow& e) {
    EXPECT_EQ(e.node(), 2u);
  }
  EXPECT_THROW(eval_primal(p, std::vector<double>{1.0, 2.0}), DimensionMismatch);
}

TEST(EvalGeneric, RealSemanticsMatchesPrimalBitForBit) {
  RealSemantics real;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Rng rng(seed);
    const Program p = random_program(seed, 1 + seed % 50, 1 + seed % 6, seed % 3 != 0);
    const auto x = rng.vector(p.n_inputs(), -1.0, 1.0);
    const auto a = eval_primal(p, x);
    const auto b = eval_generic(p, std::span<const double>(x), real);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]) << "seed " << seed;
  }
}

TEST(EvalGeneric, EmptyProgramIsIdentity) {
  ProgramBuilder b(2);
  b.output(b.input(0));
  b.output(b.input(1));
  const Program p = std::move(b).build();
  EXPECT_EQ(eval_primal(p, std::vector<double>{1.5, -2.0}), (std::vector<double>{1.5, -2.0}));
  const DerivativeTable t = taylor_eval(p, SeedSpec::basis({1.5, -2.0}, 1u));
  EXPECT_EQ(t.entry(MultiIndex{{1, 0}}), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(jvp(p, std::vector<double>{1.5, -2.0}, TangentVector{{3, 4}}).components,
            (std::vector<double>{3, 4}));
}

TEST(RandomProgram, Deterministic) {
  for (auto fam : {ProgramFamily::safe, ProgramFamily::guarded, ProgramFamily::polynomial,
                   ProgramFamily::add_unary_heavy, ProgramFamily::mul_heavy}) {
    RandomProgramOptions o;
    o.depth = 30;
    o.n_inputs = 3;
    o.family = fam;
    EXPECT_EQ(random_program(42, o), random_program(42, o));
    EXPECT_FALSE(random_program(42, o) == random_program(43, o));
  }
}

TEST(RandomProgram, DepthIsNodeCount) {
  EXPECT_EQ(random_program(1, 1, 2, true).node_count(), 1u);
  EXPECT_EQ(random_program(1, 37, 2, true).node_count(), 37u);
  EXPECT_THROW(random_program(1, 0, 2, true), Error);
}

TEST(RandomProgram, SafeAndGuardedNeverLeaveTheDomain) {
  std::size_t evaluations = 0;
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    Rng rng(seed ^ 0xabcdef);
    for (bool safe : {true, false}) {
      const Program p = random_program(seed, 1 + seed % 50, 1 + seed % 8, safe);
      if (safe) {
        for (const Node& n : p.nodes()) {
          EXPECT_TRUE(n.op == PrimitiveKind::add || n.op == PrimitiveKind::mul ||
                      n.op == PrimitiveKind::sin || n.op == PrimitiveKind::cos ||
                      n.op == PrimitiveKind::tanh || n.op == PrimitiveKind::exp ||
                      n.op == PrimitiveKind::const_val)
              << keyword(n.op);
        }
      }
      for (int t = 0; t < 10; ++t) {
        EXPECT_NO_THROW(eval_primal(p, rng.vector(p.n_inputs(), -1.0, 1.0)));
        ++evaluations;
      }
    }
  }
  EXPECT_EQ(evaluations, 10000u);
}

TEST(RandomProgram, PolynomialFamilyUsesOnlyPolynomialPrimitives) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RandomProgramOptions o;
    o.depth = 1 + seed % 30;
    o.n_inputs = 1 + seed % 4;
    o.family = ProgramFamily::polynomial;
    const Program p = random_program(seed, o);
    for (const Node& n : p.nodes()) {
      EXPECT_TRUE(n.op == PrimitiveKind::add || n.op == PrimitiveKind::sub ||
                  n.op == PrimitiveKind::mul || n.op == PrimitiveKind::neg ||
                  n.op == PrimitiveKind::const_val || n.op == PrimitiveKind::pow_const);
    }
  }
}
