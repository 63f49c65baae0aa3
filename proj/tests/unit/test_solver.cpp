#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sublin/error.hpp"
#include "sublin/potential.hpp"
#include "sublin/solver.hpp"
#include "support.hpp"

using namespace sublin;

namespace {

// Tridiagonal solve (Thomas algorithm), no pivoting.
std::vector<double> thomas(std::vector<double> lower, std::vector<double> diag, std::vector<double> upper,
                           std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

// Damped Newton for (u_{i-1} - 2u_i + u_{i+1}) / h^2 = p sqrt(u_i), u = 1 at both ends.
std::vector<double> newton_sqrt_1d(std::size_t n_interior, double h, double p) {
  std::vector<double> u(n_interior, 1.0);
  auto residual = [&](const std::vector<double>& v) {
    std::vector<double> r(n_interior);
    for (std::size_t i = 0; i < n_interior; ++i) {
      const double left = i == 0 ? 1.0 : v[i - 1];
      const double right = i + 1 == n_interior ? 1.0 : v[i + 1];
      r[i] = (left - 2 * v[i] + right) / (h * h) - p * std::sqrt(std::max(v[i], 0.0));
    }
    return r;
  };
  for (int it = 0; it < 100; ++it) {
    const auto r = residual(u);
    double rn = 0;
    for (double x : r) rn = std::max(rn, std::abs(x));
    if (rn < 1e-12) break;
    std::vector<double> lo(n_interior, 1 / (h * h)), up(n_interior, 1 / (h * h)), d(n_interior), rhs(n_interior);
    for (std::size_t i = 0; i < n_interior; ++i) {
      d[i] = -2 / (h * h) - 0.5 * p / std::sqrt(u[i]);
      rhs[i] = -r[i];
    }
    const auto du = thomas(lo, d, up, rhs);
    double step = 1.0;
    while (true) {
      bool ok = true;
      for (std::size_t i = 0; i < n_interior; ++i) ok = ok && u[i] + step * du[i] > 0;
      if (ok) break;
      step *= 0.5;
    }
    for (std::size_t i = 0; i < n_interior; ++i) u[i] += step * du[i];
  }
  return u;
}

}  // namespace

TEST(Solver, LinearReactionMatchesCoshOracle) {
  auto mask = fixtures::box_mask(1, 65);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(1));
  const Phi phi = Phi::affine(constant_density(1.0), 1.0, 0.0);
  auto [u, report] = solve_semilinear_dirichlet(op, phi, Field(mask, 1.0));
  EXPECT_TRUE(report.converged);
  const double h = 1.0 / 64;
  for (std::size_t i : mask->interior()) {
    const double x = mask->grid().point(i)[0];
    EXPECT_NEAR(u[i], std::cosh(x - 0.5) / std::cosh(0.5), 5 * h * h);
  }
  const Field v = solve_linear_reaction(op, Field(mask, 1.0), Field(mask, 1.0));
  for (std::size_t i : mask->interior()) EXPECT_NEAR(u[i], v[i], 1e-9);
}

TEST(Solver, SquareRootMatchesNewtonOracle) {
  const std::size_t n = 41;
  auto mask = fixtures::box_mask(1, n);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(1));
  const double p = 6.0;
  auto [u, report] = solve_semilinear_dirichlet(op, Phi::power(constant_density(p), 0.5), Field(mask, 1.0));
  const auto oracle = newton_sqrt_1d(n - 2, 1.0 / (n - 1), p);
  for (std::size_t k = 0; k < oracle.size(); ++k) EXPECT_NEAR(u[k + 1], oracle[k], 1e-8);
  EXPECT_TRUE(report.monotone_history);
  EXPECT_LE(report.identity_residual, 1e-8);
  EXPECT_EQ(classify_super_sub(op, Phi::power(constant_density(p), 0.5), u), SolutionClass::solution);
}

TEST(Solver, ZeroPhiGivesHarmonicExtension) {
  auto mask = fixtures::ball_mask(2, 17, 0.9);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(2));
  const Field f = Field::from_function(mask, [](const Point& x) { return 1.0 + x[0] * x[0]; });
  auto [u, report] = solve_semilinear_dirichlet(op, Phi::zero(), f);
  const Field h = harmonic_extension(op, f);
  for (std::size_t i : mask->interior()) EXPECT_NEAR(u[i], h[i], 1e-12);
  EXPECT_LE(report.iterations, 1);
}

TEST(Solver, ZeroDataGivesZero) {
  auto mask = fixtures::box_mask(2, 9);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(2));
  auto [u, report] = solve_semilinear_dirichlet(op, Phi::power(constant_density(1.0), 0.5), Field(mask, 0.0));
  for (std::size_t i : mask->interior()) EXPECT_EQ(u[i], 0.0);
}

TEST(Solver, RejectsBadInput) {
  auto mask = fixtures::box_mask(1, 9);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(1));
  Field f(mask, 1.0);
  f[0] = -1.0;
  EXPECT_THROW(solve_semilinear_dirichlet(op, Phi::power(constant_density(1.0), 0.5), f), PreconditionError);
  const Phi unclaimed = Phi::general([](const Site&, double t) { return t; }, "t", HypothesisFlags{});
  EXPECT_THROW(solve_semilinear_dirichlet(op, unclaimed, Field(mask, 1.0)), HypothesisError);
}

TEST(Solver, BoundedByHarmonicExtensionAndComparison) {
  std::mt19937_64 rng(11);
  auto mask = fixtures::box_mask(2, 13, -1, 1);
  const AssembledOperator op = assemble(mask, fixtures::random_coefficients(2, rng));
  const Phi phi = Phi::power(fixtures::random_density(rng), 0.5);
  const Field f = Field::from_function(mask, fixtures::random_boundary(rng));
  const Field g = f + Field(mask, 0.3);
  const Field u = solve_semilinear_dirichlet(op, phi, f).first;
  const Field v = solve_semilinear_dirichlet(op, phi, g).first;
  const Field h = harmonic_extension(op, f);
  for (std::size_t i : mask->interior()) {
    EXPECT_LE(u[i], h[i] + 1e-10);
    EXPECT_LE(u[i], v[i] + 1e-10);
    EXPECT_GE(u[i], 0.0);
  }
  EXPECT_EQ(classify_super_sub(op, phi, h), SolutionClass::supersolution);
  EXPECT_EQ(classify_super_sub(op, phi, Field(mask, 0.0)), SolutionClass::solution);
}

TEST(Solver, ConstantShiftAndHistory) {
  auto mask = fixtures::box_mask(2, 11);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(2));
  SemilinearParams params;
  params.shift_lambda = 5.0;
  params.record_history = true;
  const Phi phi = Phi::unit_cap(constant_density(3.0));
  auto [u, report] = solve_semilinear_dirichlet(op, phi, Field(mask, 2.0), params);
  EXPECT_TRUE(report.converged);
  EXPECT_EQ(report.fixed_steps, report.iterations);
  EXPECT_EQ(report.history.size(), static_cast<std::size_t>(report.iterations));
  EXPECT_LE(report.final_increment, params.tolerance * std::max(1.0, u.interior_max()));
}

TEST(Solver, ConvergenceErrorCarriesReport) {
  auto mask = fixtures::box_mask(2, 11);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(2));
  SemilinearParams params;
  params.max_iterations = 1;
  try {
    solve_semilinear_dirichlet(op, Phi::power(constant_density(50.0), 0.5), Field(mask, 1.0), params);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.report().iterations, 1);
    EXPECT_FALSE(e.report().converged);
  }
}
