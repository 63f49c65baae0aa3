#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sublin/potential.hpp"
#include "support.hpp"

using namespace sublin;

TEST(Potential, HarmonicExtensionReproducesAffineData) {
  auto mask = fixtures::ball_mask(3, 13, 0.9);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(3));
  auto affine = [](const Point& x) { return 2.0 + x[0] - 0.5 * x[1] + 0.25 * x[2]; };
  const Field h = harmonic_extension(op, Field::from_function(mask, affine));
  for (std::size_t i : mask->interior()) EXPECT_NEAR(h[i], affine(mask->grid().point(i)), 1e-10);
}

TEST(Potential, GreenPotentialOfConstantIn1D) {
  // -u'' = 2 on (0, 1), u(0) = u(1) = 0 has u = x (1 - x); the 3-point stencil is exact.
  auto mask = fixtures::box_mask(1, 33);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(1));
  const Field u = green_apply(op, Field(mask, 2.0));
  for (std::size_t i : mask->interior()) {
    const double x = mask->grid().point(i)[0];
    EXPECT_NEAR(u[i], x * (1 - x), 1e-13);
  }
}

TEST(Potential, KernelIsSymmetricAndPositive) {
  auto mask = fixtures::box_mask(2, 11);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(2));
  const PotentialSolver solver(op);
  const std::size_t y1 = mask->grid().flat({3, 4, 0});
  const std::size_t y2 = mask->grid().flat({6, 2, 0});
  const Field g1 = solver.kernel_column(y1);
  const Field g2 = solver.kernel_column(y2);
  EXPECT_NEAR(g1[y2], g2[y1], 1e-12);
  for (std::size_t i : mask->interior()) EXPECT_GT(g1[i], 0.0);
  for (std::size_t b : mask->boundary()) EXPECT_EQ(g1[b], 0.0);
}

TEST(Potential, IterativeMatchesDirect) {
  std::mt19937_64 rng(3);
  auto mask = fixtures::box_mask(3, 9);
  const AssembledOperator op = assemble(mask, fixtures::random_coefficients(3, rng));
  const Field src = Field::from_function(mask, [](const Point& x) { return 1.0 + x[0] * x[1]; });
  LinearSolverParams direct, iterative;
  direct.method = SolverMethod::direct;
  iterative.method = SolverMethod::iterative;
  iterative.tolerance = 1e-13;
  const Field a = green_apply(op, src, direct);
  const Field b = green_apply(op, src, iterative);
  for (std::size_t i : mask->interior()) EXPECT_NEAR(a[i], b[i], 1e-10);
}

TEST(Potential, KatoCellIntegralMatchesRadialBound) {
  // The cell integral of |z|^-1 over [-h/2, h/2]^3 lies between the integrals
  // over the inscribed and circumscribed balls.
  auto g = build_grid(3, {9}, {Interval{-1, 1}});
  const double h = 0.25;
  const double v = kato_cell_integral(*g, 1.0);
  EXPECT_GT(v, 2 * std::numbers::pi * (h / 2) * (h / 2));
  EXPECT_LT(v, 2 * std::numbers::pi * 3 * (h / 2) * (h / 2));
}

TEST(Potential, KatoEstimateOfZeroDensity) {
  auto mask = fixtures::box_mask(3, 9, -1, 1);
  EXPECT_EQ(kato_norm_estimate(Field(mask, 0.0), 0.5, *mask), 0.0);
}

TEST(Potential, ProxyStrictlyBelowOnSubdomains) {
  auto grid = build_grid(2, {17}, {Interval{-1, 1}});
  auto outer = mask_from_predicate(grid, [](const Point&) { return true; });
  const AssembledOperator op = assemble(outer, CoefficientSet::laplacian(2));
  auto sub = mask_from_predicate(grid, [](const Point& x) { return std::abs(x[0]) < 0.5 && std::abs(x[1]) < 0.5; });
  const PotentialProxyReport r =
      potential_property_proxy(op, CoefficientSet::laplacian(2), grid->flat({8, 8, 0}), {sub});
  ASSERT_EQ(r.levels.size(), 1u);
  EXPECT_TRUE(r.strictly_below);
  EXPECT_GT(r.levels[0].gap_at_pole, 0.0);
}
