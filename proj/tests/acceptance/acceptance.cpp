// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "sublin/experiments.hpp"
#include "sublin/potential.hpp"
#include "sublin/solver.hpp"
#include "support.hpp"

using namespace sublin;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool pass, double elapsed, double budget, const std::string& detail) {
  const bool ok = pass && elapsed < budget;
  if (!ok) ++failures;
  std::printf("[%s] criterion %d: %s (%.2f s, budget %.0f s)\n", ok ? "PASS" : "FAIL", id, detail.c_str(), elapsed,
              budget);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

SemilinearParams tight() {
  SemilinearParams p;
  p.tolerance = 1e-12;
  p.linear.tolerance = 1e-14;
  return p;
}

Field solve(const AssembledOperator& op, const Phi& phi, const Field& f) {
  return solve_semilinear_dirichlet(op, phi, f, tight()).first;
}

/// sup over interior of H f - u - G phi(., u), assembled from the potential module.
double identity_gap(const AssembledOperator& op, const Phi& phi, const Field& u) {
  const PotentialSolver ps(op);
  Field f(op.mask_ptr(), 0.0);
  Field src(op.mask_ptr(), 0.0);
  for (std::size_t b : op.mask().boundary()) f[b] = u[b];
  for (std::size_t i : op.mask().interior()) src[i] = phi({i, op.mask().grid().point(i)}, u[i]);
  const Field h = ps.harmonic_extension(f);
  const Field g = ps.green_apply(src);
  double gap = 0.0;
  for (std::size_t i : op.mask().interior()) gap = std::max(gap, std::abs(h[i] - u[i] - g[i]));
  return gap;
}

void criterion1() {
  const auto t0 = Clock::now();
  auto mask = fixtures::box_mask(1, 129);
  const AssembledOperator op = assemble(mask, CoefficientSet::laplacian(1));
  const Field u = solve_semilinear_dirichlet(op, Phi::affine(constant_density(1.0), 1.0, 0.0), Field(mask, 1.0)).first;
  double err = 0.0;
  for (std::size_t i : mask->interior()) {
    const double x = mask->grid().point(i)[0];
    err = std::max(err, std::abs(u[i] - std::cosh(x - 0.5) / std::cosh(0.5)));
  }
  const double h = 1.0 / 128;
  report(1, err <= 5 * h * h, seconds_since(t0), 1.0,
         "1D cosh oracle, max error " + fmt("%.3e", err) + " <= 5h^2 = " + fmt("%.3e", 5 * h * h));
}

void criterion2() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const std::size_t dim = k % 2 ? 3 : 2;
    const std::size_t n = dim == 3 ? 9 + 4 * (k % 3) : 11 + 3 * (k % 3);
    auto mask = k % 4 < 2 ? fixtures::box_mask(dim, n, -1, 1) : fixtures::ball_mask(dim, n, 0.9);
    const AssembledOperator op = assemble(mask, fixtures::random_coefficients(dim, rng));
    const Density p = fixtures::random_density(rng);
    Phi phi = Phi::zero();
    switch (k % 3) {
      case 0: phi = Phi::power(p, 0.5); break;
      case 1: phi = Phi::affine(p, 1.0, 0.0); break;
      default: {
        Field pf(mask, 0.0);
        for (const Site& s : sites_of(*mask)) pf[s.index] = p(s);
        phi = build_concave_majorant(Phi::unit_cap(p), pf).phi();
      }
    }
    const Field f = Field::from_function(mask, fixtures::random_boundary(rng, 1.0 + k));
    const Field u = solve_semilinear_dirichlet(op, phi, f).first;
    worst = std::max(worst, identity_gap(op, phi, u));
  }
  report(2, worst <= 1e-7, seconds_since(t0), 120.0, "identity residual over 20 instances " + fmt("%.3e", worst));
}

struct OrderTally {
  int checks = 0;
  int violations = 0;
  double worst = 0.0;
  /// Records a check that `lhs <= rhs` holds pointwise on `points`.
  void le(const Field& lhs, const Field& rhs, std::span<const std::size_t> points) {
    ++checks;
    double excess = 0.0;
    for (std::size_t i : points) excess = std::max(excess, lhs[i] - rhs[i]);
    worst = std::max(worst, excess);
    if (excess > 1e-8) ++violations;
  }
  void fail() {
    ++checks;
    ++violations;
  }
};

void criterion3() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OrderTally tally;
  auto h4_phi = [&](int k, const Density& p) {
    switch (k % 3) {
      case 0: return Phi::power(p, 0.5);
      case 1: return Phi::power(p, 0.9);
      default: return Phi::unit_cap(p);
    }
  };
  for (int k = 0; k < 20; ++k) {
    const std::size_t dim = k % 5 == 4 ? 3 : 2;
    const std::size_t n = dim == 3 ? 9 : 13 + 2 * (k % 3);
    auto mask = k % 2 ? fixtures::ball_mask(dim, n, 0.95) : fixtures::box_mask(dim, n, -1, 1);
    const CoefficientSet coeffs = fixtures::random_coefficients(dim, rng);
    const AssembledOperator op = assemble(mask, coeffs);
    const Density p = fixtures::random_density(rng);
    const Phi phi = h4_phi(k, p);
    const Field f = Field::from_function(mask, fixtures::random_boundary(rng, 1.0 + 3 * unit(rng)));
    const Field g = f + Field::from_function(mask, [&, s = unit(rng)](const Point& x) { return s * (1 + x[0] * x[0]); });
    const Field uf = solve(op, phi, f);
    const Field ug = solve(op, phi, g);
    const auto interior = mask->interior();

    // Monotonicity in the boundary data.
    tally.le(uf, ug, interior);

    // Supersolution / subsolution bounds. H g is a supersolution since phi >= 0;
    // w = H f - G phi(., H f) is a subsolution with boundary data f.
    auto counts_as = [](SolutionClass c, SolutionClass want) { return c == want || c == SolutionClass::solution; };
    if (k % 2 == 0) {
      const Field v = harmonic_extension(op, g);
      if (counts_as(classify_super_sub(op, phi, v), SolutionClass::supersolution)) {
        tally.le(solve(op, phi, v), v, interior);
      } else {
        tally.fail();
      }
    } else {
      const Field hf = harmonic_extension(op, f);
      Field src(mask, 0.0);
      for (std::size_t i : interior) src[i] = phi({i, mask->grid().point(i)}, hf[i]);
      const Field w = hf - green_apply(op, src);
      if (counts_as(classify_super_sub(op, phi, w), SolutionClass::subsolution)) {
        tally.le(w, uf, interior);
      } else {
        tally.fail();
      }
    }

    // Domain monotonicity: D' inside D, u = H_D f a supersolution.
    {
      auto inner = mask_from_predicate(mask->grid_ptr(), [&](const Point& x) {
        double r2 = 0.0;
        for (std::size_t j = 0; j < dim; ++j) r2 += x[j] * x[j];
        return r2 < 0.45;
      });
      const Field hf = harmonic_extension(op, f);
      const Field u_inner = solve(assemble(inner, coeffs), phi, restrict_to(hf, inner));
      tally.le(restrict_to(uf, inner), u_inner, inner->interior());
    }

    // Convexity and scaling under concavity.
    const double lambda = std::array{0.25, 0.5, 0.75}[k % 3];
    const Field mix = lambda * f + (1 - lambda) * g;
    tally.le(solve(op, phi, mix), lambda * uf + (1 - lambda) * ug, interior);
    const double alpha = k % 2 ? 10.0 : 2.0;
    tally.le(alpha * uf, solve(op, phi, alpha * f), interior);
  }
  report(3, tally.violations == 0 && tally.checks == 100, seconds_since(t0), 300.0,
         std::to_string(tally.checks) + " order checks, " + std::to_string(tally.violations) +
             " violations, worst excess " + fmt("%.2e", tally.worst));
}


void criterion4() {
  const auto t0 = Clock::now();
  auto mask = fixtures::ball_mask(2, 13, 0.9);
  const Field p = Field::from_function(mask, [](const Point& x) { return 1.0 + 0.5 * std::sin(3 * x[0]) * x[1]; });
  const Density dens = density_from_field(p);
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  bool pass = true;
  std::string detail;
  const std::pair<const char*, Phi> cases[] = {{"sqrt(t)", Phi::power(dens, 0.5)},
                                               {"t^0.9", Phi::power(dens, 0.9)},
                                               {"min(t,1)", Phi::unit_cap(dens)}};
  for (const auto& [name, phi] : cases) {
    const MajorantPhi maj = build_concave_majorant(phi, p);
    const MajorantReport& r = maj.report();
    // Independent samples: domination, midpoint concavity and phi_1(x, 0) = 0.
    double margin = r.domination_margin;
    double concavity = r.concavity_defect;
    bool zero = r.zero_at_origin;
    for (const Site& s : maj.sites()) {
      zero = zero && maj.phi()(s, 0.0) == 0.0;
      for (int j = 0; j < 20; ++j) {
        const double a = 3.0 * std::pow(unit(rng), 3), b = 3.0 * std::pow(unit(rng), 3);
        margin = std::min(margin, maj.phi()(s, a) - phi(s, a));
        concavity = std::min(concavity,
                             maj.phi()(s, 0.5 * (a + b)) - 0.5 * (maj.phi()(s, a) + maj.phi()(s, b)));
      }
    }
    const bool ok = margin >= -1e-12 && concavity >= -1e-9 && zero && std::isfinite(r.constant_c);
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : "; ") + name + ": margin " + fmt("%.1e", margin) + ", concavity " +
              fmt("%.1e", concavity) + ", C " + fmt("%.3g", r.constant_c);
  }
  report(4, pass, seconds_since(t0), 30.0, "majorant " + detail);
}

void criterion5() {
  const auto t0 = Clock::now();
  const TruncationFamily fam = cube_truncations(3, {2, 4, 8}, 0.5);
  const ExhaustionSequence seq = exhaustion_from_truncations(fam);
  const auto origin = fam.grid->locate(Point{0, 0, 0});
  const ExhaustionRun decay =
      run_exhaustion(seq, CoefficientSet::laplacian(3),
                     Phi::power(density_from_function([](const Point& x) {
                                  return std::pow(1.0 + std::hypot(x[0], x[1], x[2]), -3.0);
                                }),
                                0.5),
                     1.0);
  bool increasing = true;
  for (std::size_t n = 1; n < decay.level_sups.size(); ++n) increasing = increasing && decay.level_sups[n] > decay.level_sups[n - 1];
  const bool part_a = decay.decreasing_ok && decay.decreasing_violation <= 1e-8 && decay.sup_estimate >= 0.9 && increasing;

  const ExhaustionRun flat = run_exhaustion(seq, CoefficientSet::laplacian(3), Phi::power(constant_density(1.0), 0.5), 1.0);
  double worst_ratio = 0.0;
  std::string values;
  for (std::size_t n = 0; n < flat.level_solutions.size(); ++n) {
    const double v = flat.level_solutions[n][*origin];
    values += (n ? ", " : "") + fmt("%.3g", v);
    if (n) worst_ratio = std::max(worst_ratio, v / flat.level_solutions[n - 1][*origin]);
  }
  const bool part_b = flat.decreasing_ok && worst_ratio <= 0.7;
  report(5, part_a && part_b, seconds_since(t0), 600.0,
         "decaying p: sups " + fmt("%.5f", decay.level_sups[0]) + ", " + fmt("%.5f", decay.level_sups[1]) + ", " +
             fmt("%.5f", decay.level_sups[2]) + ", level violation " + fmt("%.1e", decay.decreasing_violation) +
             "; p = 1: v_c(0) = " + values + ", worst ratio " + fmt("%.3g", worst_ratio));
}

void criterion6() {
  const auto t0 = Clock::now();
  // Unit disk with h = 1/64 and the origin on the lattice.
  auto grid = build_grid(2, {131}, {Interval{-65.0 / 64, 65.0 / 64}});
  auto disk = mask_from_predicate(grid, [](const Point& x) { return std::hypot(x[0], x[1]) < 1.0; });
  const AssembledOperator op = assemble(disk, CoefficientSet::laplacian(2));
  const std::vector<double> m = {1, 10, 100, 1e3, 1e4, 1e5, 1e6};
  const BlowupSweep sub = blowup_sweep(op, Phi::power(constant_density(1.0), 0.5), m, {Point{}});
  const BlowupSweep cubic = blowup_sweep(op, Phi::power(constant_density(1.0), 3.0), m, {Point{}});
  const bool pass = !sub.failure && !cubic.failure && sub.values.size() == m.size() && sub.min_ratio >= 0.5 &&
                    cubic.values.size() == m.size() && cubic.last_decade_increment < 0.01;
  report(6, pass, seconds_since(t0), 120.0,
         "disk sweep m = 1..1e6: sqrt(t) min u_m/m " + fmt("%.3f", sub.min_ratio) + "; t^3 last-decade increment " +
             fmt("%.2e", cubic.last_decade_increment));
}

void criterion7() {
  const auto t0 = Clock::now();
  const TruncationFamily fam = cube_truncations(3, {1, 2, 4}, 0.5);
  const ExhaustionSequence seq = exhaustion_from_truncations(fam);
  const Phi phi = Phi::power(density_from_function([](const Point& x) {
                               return std::pow(1.0 + std::hypot(x[0], x[1], x[2]), -3.0);
                             }),
                             0.5);
  const ExhaustionRun base = run_exhaustion(seq, CoefficientSet::laplacian(3), phi, 1.0);
  bool pass = true;
  std::string detail;
  for (double ratio : {1.0, 2.0, 4.0}) {
    const ExhaustionRun run = run_exhaustion(seq, CoefficientSet::laplacian(3), phi, ratio);
    const Field& v = run.v_c();
    const Field& v1 = base.v_c();
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.grid().size(); ++i)
      if (v.mask().is_active(i)) margin = std::min(margin, v[i] - ratio * v1[i]);
    const ScalingReport r = scaling_bound_check(run, base);
    pass = pass && margin >= -1e-8 && r.pass && !r.skipped;
    detail += std::string(detail.empty() ? "" : ", ") + "ratio " + fmt("%g", ratio) + " margin " + fmt("%.2e", margin);
  }
  report(7, pass, seconds_since(t0), 120.0, "scaling " + detail);
}

void criterion8() {
  const auto t0 = Clock::now();
  bool pass = true;
  std::string detail;
  for (double alpha : {0.125, 0.25}) {
    const double h = alpha / 8;
    const std::size_t n = 33;  // [-2 alpha, 2 alpha] with spacing alpha / 8
    auto grid = build_grid(3, {n}, {Interval{-2 * alpha, 2 * alpha}});
    auto support = mask_from_predicate(grid, [](const Point&) { return true; });
    auto window = mask_from_predicate(grid, [&](const Point& x) {
      return std::max({std::abs(x[0]), std::abs(x[1]), std::abs(x[2])}) < 1.5 * h;
    });
    const double est = kato_norm_estimate(Field(support, 1.0), alpha, *window);
    const double exact = 2 * std::numbers::pi * alpha * alpha;
    const double rel = std::abs(est - exact) / exact;
    pass = pass && rel <= 0.1;
    detail += std::string(detail.empty() ? "" : ", ") + "alpha " + fmt("%g", alpha) + " rel. error " + fmt("%.3f", rel);
  }
  report(8, pass, seconds_since(t0), 30.0, "Kato estimate vs 2 pi alpha^2: " + detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  return failures == 0 ? 0 : 1;
}
