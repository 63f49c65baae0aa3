#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "cli/expr.hpp"

using namespace sublin::cli;

namespace {

const std::vector<std::string> kVars = {"x1", "x2", "x3", "r", "t"};

double eval(const std::string& text, std::vector<double> env = {0, 0, 0, 0, 0}) {
  return parse_expr(text, kVars).evaluate(env);
}

int syntax_column(const std::string& text) {
  try {
    parse_expr(text, kVars);
  } catch (const ExprSyntaxError& e) {
    return e.column();
  }
  return -1;
}

Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
  switch (pick(rng)) {
    case 0: {
      std::uniform_int_distribution<int> mant(0, 2000);
      std::uniform_int_distribution<int> expo(-3, 3);
      return Expr::number(mant(rng) * std::pow(10.0, expo(rng)) / 7.0);
    }
    case 1: {
      std::uniform_int_distribution<int> v(0, static_cast<int>(kVars.size()) - 1);
      const int slot = v(rng);
      return Expr::variable(kVars[slot], slot);
    }
    case 2: return Expr::unary(random_expr(rng, depth - 1));
    case 3: return Expr::binary(Expr::Kind::add, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 4: return Expr::binary(Expr::Kind::sub, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 5: return Expr::binary(Expr::Kind::mul, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 6: return Expr::binary(Expr::Kind::div, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 7: return Expr::binary(Expr::Kind::power, random_expr(rng, depth - 1), random_expr(rng, depth - 1));
    case 8: {
      std::uniform_int_distribution<int> f(0, 5);
      return Expr::call(static_cast<Func>(f(rng)), {random_expr(rng, depth - 1)});
    }
    default: {
      std::uniform_int_distribution<int> f(6, 8);
      return Expr::call(static_cast<Func>(f(rng)), {random_expr(rng, depth - 1), random_expr(rng, depth - 1)});
    }
  }
}

}  // namespace

TEST(Expr, Precedence) {
  EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
  EXPECT_DOUBLE_EQ(eval("2 ^ 3 ^ 2"), 512.0);
  EXPECT_DOUBLE_EQ(eval("-2 ^ 2"), -4.0);
  EXPECT_DOUBLE_EQ(eval("2 ^ -1"), 0.5);
  EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
  EXPECT_DOUBLE_EQ(eval("10 - 4 - 3"), 3.0);
  EXPECT_DOUBLE_EQ(eval("1.5e1 + .5"), 15.5);
}

TEST(Expr, SpecExamples) {
  EXPECT_DOUBLE_EQ(eval("(1+r)^(-3)", {0, 0, 0, 1, 0}), 0.125);
  EXPECT_DOUBLE_EQ(eval("min(x1, 1-x1)", {0.25, 0, 0, 0, 0}), 0.25);
  EXPECT_EQ(syntax_column("2*^3"), 3);
}

TEST(Expr, Functions) {
  EXPECT_NEAR(eval("exp(log(3)) + sqrt(16) + abs(-2) + sin(0) + cos(0)"), 10.0, 1e-14);
  EXPECT_DOUBLE_EQ(eval("max(1, t) + pow(2, 10)", {0, 0, 0, 0, 3}), 1027.0);
}

TEST(Expr, SyntaxErrors) {
  EXPECT_EQ(syntax_column("1 +"), 4);
  EXPECT_EQ(syntax_column("(1 + 2"), 7);
  EXPECT_EQ(syntax_column("1 $ 2"), 3);
  EXPECT_EQ(syntax_column("y + 1"), 1);
  EXPECT_EQ(syntax_column("x1 + foo(2)"), 6);
  EXPECT_GT(syntax_column("min(1)"), 0);
  EXPECT_GT(syntax_column("sqrt(1, 2)"), 0);
  EXPECT_GT(syntax_column("1 2"), 0);
}

TEST(Expr, DomainErrorsCarrySpans) {
  try {
    eval("1 + sqrt(x1 - 1)");
    FAIL();
  } catch (const ExprDomainError& e) {
    EXPECT_EQ(e.begin(), 5);
    EXPECT_EQ(e.end(), 17);
  }
  EXPECT_THROW(eval("1 / x1"), ExprDomainError);
  EXPECT_THROW(eval("log(0)"), ExprDomainError);
  EXPECT_THROW(eval("(-2) ^ 0.5"), ExprDomainError);
  EXPECT_DOUBLE_EQ(eval("(-2) ^ 3"), -8.0);
}

TEST(Expr, PrintParseRoundTripOnRandomTrees) {
  std::mt19937_64 rng(20240601);
  for (int k = 0; k < 2000; ++k) {
    const Expr e = random_expr(rng, 1 + k % 6);
    const std::string text = print_expr(e);
    const Expr back = parse_expr(text, kVars);
    ASSERT_TRUE(back == e) << text;
    ASSERT_EQ(print_expr(back), text);
  }
}

TEST(Expr, UsesSlot) {
  const Expr e = parse_expr("x1 * t", kVars);
  EXPECT_TRUE(e.uses(4));
  EXPECT_FALSE(e.uses(3));
}
