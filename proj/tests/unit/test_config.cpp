#include <gtest/gtest.h>

#include "cli/config.hpp"
#include "cli/setup.hpp"
#include "sublin/error.hpp"

using namespace sublin;
using namespace sublin::cli;

TEST(Config, ParsesSectionsAndValues) {
  const Config c = Config::parse(R"(
# comment
[geometry]
dim = 2
shape = [9, 17]   # trailing comment
bounds = [[-1, 1], [0, 2]]
mask = "1 - r # not a comment"

[phi]
family = power
exponent = 0.5
majorant = true
)");
  const Section g = c.section("geometry");
  EXPECT_EQ(g.integer("dim", 0), 2);
  EXPECT_EQ(g.at("shape").as_numbers(), (std::vector<double>{9, 17}));
  EXPECT_EQ(g.at("bounds").items.size(), 2u);
  EXPECT_EQ(g.string("mask", ""), "1 - r # not a comment");
  const Section p = c.section("phi");
  EXPECT_EQ(p.string("family", ""), "power");
  EXPECT_TRUE(p.flag("majorant", false));
  EXPECT_DOUBLE_EQ(p.number("exponent", 0), 0.5);
  EXPECT_FALSE(c.has_section("solver"));
  EXPECT_TRUE(c.section("solver").values().empty());
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_THROW(Config::parse("[a]\nx = 1\nx = 2\n"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\n[a]\n"), ConfigError);
  EXPECT_THROW(Config::parse("x = 1\n"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\nx = [1, 2\n"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\nx = \"open\n"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\njust words\n"), ConfigError);
  EXPECT_THROW(Config::parse("[a]\nx = abc\n").section("a").integer("x", 0), ConfigError);
  EXPECT_THROW(Config::load("/nonexistent/run.toml"), ConfigError);
}

TEST(Setup, GeometryWithMask) {
  const Config c = Config::parse("[geometry]\ndim = 2\nshape = [21]\nbounds = [-1, 1]\nmask = \"0.8 - r\"\n");
  const Geometry g = build_geometry(c.section("geometry"));
  EXPECT_EQ(g.grid->size(), 441u);
  for (std::size_t i : g.mask->interior()) {
    const Point x = g.grid->point(i);
    EXPECT_LT(x[0] * x[0] + x[1] * x[1], 0.64);
  }
}

TEST(Setup, DimensionalConsistency) {
  auto coeffs = [](const std::string& body) {
    return build_coefficients(Config::parse("[operator]\n" + body).section("operator"), 2);
  };
  EXPECT_NO_THROW(coeffs("a = [[1, 0], [0, \"1 + x1^2\"]]\nb = [0, x2]\nc = \"-1\"\n"));
  EXPECT_THROW(coeffs("a = [[1, 0, 0], [0, 1, 0]]\n"), ConfigError);
  EXPECT_THROW(coeffs("b = [1]\n"), ConfigError);
  EXPECT_THROW(coeffs("c = \"t\"\n"), ExprSyntaxError);
  const CoefficientSet cs = coeffs("a = [[2, 0], [0, \"1 + x1^2\"]]\n");
  EXPECT_DOUBLE_EQ(cs.a_sym(1, 1, Point{2, 0, 0}), 5.0);
}

TEST(Setup, PhiFamilies) {
  auto phi = [](const std::string& body) {
    const Config c = Config::parse("[geometry]\ndim = 1\nshape = [5]\nbounds = [0, 1]\n[phi]\n" + body);
    const Geometry g = build_geometry(c.section("geometry"));
    return build_phi(c, 1, g.mask);
  };
  const Site s{2, Point{0.5, 0, 0}};
  EXPECT_DOUBLE_EQ(phi("family = power\nexponent = 2\np = \"1 + x1\"\n")(s, 3.0), 13.5);
  EXPECT_DOUBLE_EQ(phi("family = unit_cap\np = 2\n")(s, 3.0), 2.0);
  EXPECT_DOUBLE_EQ(phi("family = expression\nexpression = \"p * t / (1 + t)\"\np = 4\n"
                       "claims = [sh1, h2, h3, h4]\n")(s, 1.0),
                   2.0);
  EXPECT_EQ(phi("family = zero\n")(s, 5.0), 0.0);
  EXPECT_THROW(phi("family = nope\n"), ConfigError);
  const Phi maj = phi("family = power\nexponent = 0.5\np = 1\nmajorant = true\n");
  EXPECT_GE(maj(s, 0.3), std::sqrt(0.3));
  EXPECT_TRUE(maj.claims().h4);
}

TEST(Setup, SolverParams) {
  const Config c = Config::parse("[solver]\ntolerance = 1e-9\nlambda = 3\nlinear = iterative\n");
  const SemilinearParams p = build_solver_params(c.section("solver"));
  EXPECT_DOUBLE_EQ(p.tolerance, 1e-9);
  ASSERT_TRUE(p.shift_lambda.has_value());
  EXPECT_DOUBLE_EQ(*p.shift_lambda, 3.0);
  EXPECT_EQ(p.linear.method, SolverMethod::iterative);
  EXPECT_FALSE(build_solver_params(Config::parse("[solver]\nlambda = adaptive\n").section("solver"))
                   .shift_lambda.has_value());
  EXPECT_THROW(build_solver_params(Config::parse("[solver]\nlinear = magic\n").section("solver")),
               std::exception);
}
