#include "sublin/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sublin/error.hpp"
#include "sublin/potential.hpp"

namespace sublin {

namespace {

double sup_over(const Field& u, std::span<const std::size_t> points) {
  double s = -std::numeric_limits<double>::infinity();
  for (std::size_t i : points) s = std::max(s, u[i]);
  return s;
}

std::vector<std::size_t> closure_points(const DomainMask& mask) {
  std::vector<std::size_t> pts(mask.interior().begin(), mask.interior().end());
  pts.insert(pts.end(), mask.boundary().begin(), mask.boundary().end());
  return pts;
}

double distance_to_boundary(const DomainMask& mask, const Point& x) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t b : mask.boundary()) {
    const Point y = mask.grid().point(b);
    double r2 = 0.0;
    for (std::size_t k = 0; k < mask.grid().dim(); ++k) r2 += (x[k] - y[k]) * (x[k] - y[k]);
    best = std::min(best, r2);
  }
  return std::sqrt(best);
}

std::size_t deepest_point(const DomainMask& mask) {
  std::size_t best = mask.interior().front();
  double depth = -1.0;
  for (std::size_t i : mask.interior()) {
    const double d = distance_to_boundary(mask, mask.grid().point(i));
    if (d > depth + 1e-12) {
      depth = d;
      best = i;
    }
  }
  return best;
}

// Truncating at depth R perturbs the Green function by O(R^(2-d)), so the
// top two core values are extrapolated linearly in R^(2-d).
void extrapolate_core(ExhaustionRun& run) {
  const auto& v = run.core_values;
  const std::size_t n = v.size();
  const std::size_t dim = run.levels.front()->grid().dim();
  std::ostringstream note;
  run.core_limit = v.back();
  if (n < 2) {
    note << "single level; core limit is its core value";
  } else if (dim < 3) {
    note << "no truncation extrapolation for d < 3; core limit is the last core value";
  } else if (v[n - 1] >= v[n - 2]) {
    note << "core value stationary over the last level";
  } else {
    const double beta = static_cast<double>(dim) - 2.0;
    const double a = std::pow(run.core_depths[n - 2], beta);
    const double b = std::pow(run.core_depths[n - 1], beta);
    run.core_limit = std::clamp((b * v[n - 1] - a * v[n - 2]) / (b - a), 0.0, v[n - 1]);
    note << "extrapolated in depth^(" << -beta << ") from depths " << run.core_depths[n - 2] << ", " << run.core_depths[n - 1] << ": core limit "
         << run.core_limit;
  }
  run.richardson_note = note.str();
}

std::vector<std::size_t> locate_probes(const DomainMask& mask, const std::vector<Point>& probes) {
  std::vector<std::size_t> out;
  for (const Point& p : probes) {
    const auto idx = mask.grid().locate(p);
    if (!idx || !mask.is_interior(*idx)) throw PreconditionError("probe point is not an interior lattice point");
    out.push_back(*idx);
  }
  return out;
}

}  // namespace

ExperimentParams default_experiment_params() {
  ExperimentParams p;
  p.solver.linear.tolerance = 1e-13;
  p.solver.tolerance = 1e-10;
  return p;
}

ExhaustionRun run_exhaustion(const ExhaustionSequence& sequence, const CoefficientSet& coeffs, const Phi& phi,
                             double c, const ExperimentParams& params) {
  if (!(c > 0)) throw PreconditionError("boundary constant c must be positive");
  ExhaustionRun run;
  run.c = c;
  run.claims = phi.claims();
  run.levels.assign(sequence.levels().begin(), sequence.levels().end());
  const DomainMask& core = *run.levels.front();
  run.core_point = deepest_point(core);
  const Point core_x = core.grid().point(run.core_point);
  for (const MaskPtr& level : run.levels) {
    run.core_depths.push_back(distance_to_boundary(*level, core_x));
    const AssembledOperator op = assemble(level, coeffs, params.scheme);
    auto [u, report] = solve_semilinear_dirichlet(op, phi, Field(level, c), params.solver);
    run.level_sups.push_back(sup_over(u, level->interior()));
    run.core_sups.push_back(sup_over(u, core.interior()));
    run.core_values.push_back(u[run.core_point]);
    run.per_level.push_back(restrict_to(u, run.levels.front()));
    run.level_solutions.push_back(std::move(u));
    run.reports.push_back(std::move(report));
  }
  for (std::size_t n = 0; n + 1 < run.levels.size(); ++n) {
    const auto pts = closure_points(*run.levels[n]);
    const double worst = max_difference(run.level_solutions[n + 1], run.level_solutions[n], pts, true);
    run.decreasing_violation = std::max(run.decreasing_violation, worst);
  }
  run.decreasing_ok = run.decreasing_violation <= 1e-8;
  run.sup_estimate = run.level_sups.back();
  extrapolate_core(run);
  return run;
}

ExhaustionRun truncate_run(const ExhaustionRun& run, std::size_t k) {
  if (k == 0 || k > run.levels.size()) throw PreconditionError("truncation index out of range");
  ExhaustionRun out;
  out.c = run.c;
  out.claims = run.claims;
  out.levels.assign(run.levels.begin(), run.levels.begin() + static_cast<std::ptrdiff_t>(k));
  out.level_solutions.assign(run.level_solutions.begin(), run.level_solutions.begin() + static_cast<std::ptrdiff_t>(k));
  out.per_level.assign(run.per_level.begin(), run.per_level.begin() + static_cast<std::ptrdiff_t>(k));
  out.level_sups.assign(run.level_sups.begin(), run.level_sups.begin() + static_cast<std::ptrdiff_t>(k));
  out.core_sups.assign(run.core_sups.begin(), run.core_sups.begin() + static_cast<std::ptrdiff_t>(k));
  out.core_point = run.core_point;
  out.core_depths.assign(run.core_depths.begin(), run.core_depths.begin() + static_cast<std::ptrdiff_t>(k));
  out.core_values.assign(run.core_values.begin(), run.core_values.begin() + static_cast<std::ptrdiff_t>(k));
  out.reports.assign(run.reports.begin(), run.reports.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t n = 0; n + 1 < k; ++n) {
    const auto pts = closure_points(*out.levels[n]);
    out.decreasing_violation = std::max(
        out.decreasing_violation, max_difference(out.level_solutions[n + 1], out.level_solutions[n], pts, true));
  }
  out.decreasing_ok = out.decreasing_violation <= 1e-8;
  out.sup_estimate = out.level_sups.back();
  extrapolate_core(out);
  return out;
}

std::string to_string(SupVerdict v) {
  switch (v) {
    case SupVerdict::trivial: return "trivial";
    case SupVerdict::saturating: return "saturating";
    default: return "intermediate";
  }
}

SupIdentityReport check_sup_identity(const ExhaustionRun& run, const SupIdentityParams& params) {
  SupIdentityReport r;
  r.c = run.c;
  r.sup_estimate = run.sup_estimate;
  r.core_limit = run.core_limit;
  std::ostringstream note;
  if (run.core_limit <= params.trivial_fraction * run.c) {
    r.verdict = SupVerdict::trivial;
    note << "v_c vanishes on the core (limit " << run.core_limit << ")";
  } else if (run.sup_estimate >= (1.0 - params.band) * run.c) {
    r.verdict = SupVerdict::saturating;
    note << "sup v_c = " << run.sup_estimate << " within " << params.band << " of c";
  } else {
    r.verdict = SupVerdict::intermediate;
    note << "sup v_c = " << run.sup_estimate << " is neither 0 nor near c; likely a truncation artifact";
  }
  r.note = note.str();
  return r;
}

BoundedIndication bounded_solution_indicated(const ExhaustionRun& run, const SupIdentityParams& params) {
  BoundedIndication b;
  const std::size_t n = run.levels.size();
  if (n < 2) {
    b.note = "needs at least two truncations";
    return b;
  }
  const ExhaustionRun lower = truncate_run(run, n - 1);
  b.prefixes.push_back(check_sup_identity(lower, params));
  b.prefixes.push_back(check_sup_identity(run, params));
  b.relative_change = std::abs(run.sup_estimate - lower.sup_estimate) / std::max(run.sup_estimate, 1e-300);
  b.indicated = b.prefixes[0].verdict == SupVerdict::saturating && b.prefixes[1].verdict == SupVerdict::saturating &&
                b.relative_change < 0.05;
  std::ostringstream note;
  note << "top truncations: " << to_string(b.prefixes[0].verdict) << ", " << to_string(b.prefixes[1].verdict)
       << "; relative change of sup " << b.relative_change;
  b.note = note.str();
  return b;
}

ScalingReport scaling_bound_check(const ExhaustionRun& run_lambda, const ExhaustionRun& run_lambda1,
                                  double tolerance) {
  ScalingReport r;
  if (run_lambda.levels.empty() || run_lambda1.levels.empty() ||
      !run_lambda.levels.back()->same_as(*run_lambda1.levels.back()))
    throw PreconditionError("scaling check needs runs on the same geometry");
  if (run_lambda.c < run_lambda1.c) throw PreconditionError("scaling check needs lambda >= lambda1");
  r.ratio = run_lambda.c / run_lambda1.c;
  if (!run_lambda.claims.h4 || !run_lambda1.claims.h4) {
    r.skipped = true;
    r.warning = "phi does not claim concavity (H4); the scaling inequality is not expected";
    return r;
  }
  const Field& big = run_lambda.v_c();
  const Field& small = run_lambda1.v_c();
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t i : closure_points(big.mask())) margin = std::min(margin, big[i] - r.ratio * small[i]);
  r.min_margin = margin;
  r.pass = margin >= -tolerance;
  return r;
}

std::string to_string(SweepVerdict v) {
  switch (v) {
    case SweepVerdict::diverges: return "diverges";
    case SweepVerdict::saturates: return "saturates";
    default: return "incomplete";
  }
}

BlowupSweep blowup_sweep(const AssembledOperator& op, const Phi& phi, const std::vector<double>& m_values,
                         const std::vector<Point>& probes, const SemilinearParams& params) {
  if (m_values.size() < 4) throw PreconditionError("blow-up sweep needs at least four m values");
  for (std::size_t i = 0; i < m_values.size(); ++i) {
    if (!(m_values[i] > 0)) throw PreconditionError("m values must be positive");
    if (i && !(m_values[i] > m_values[i - 1])) throw PreconditionError("m values must be increasing");
  }
  if (m_values.back() < 100.0 * m_values.front()) throw PreconditionError("m values must span at least two decades");
  if (probes.empty()) throw PreconditionError("blow-up sweep needs probe points");

  BlowupSweep sweep;
  sweep.m_values = m_values;
  sweep.probes = probes;
  const auto probe_idx = locate_probes(op.mask(), probes);
  for (double m : m_values) {
    try {
      auto [u, report] = solve_semilinear_dirichlet(op, phi, Field(op.mask_ptr(), m), params);
      std::vector<double> row;
      for (std::size_t i : probe_idx) row.push_back(u[i]);
      sweep.values.push_back(std::move(row));
    } catch (const NumericalError& e) {
      std::ostringstream msg;
      msg << "solve failed at m = " << m << ": " << e.what();
      sweep.failure = msg.str();
      break;
    }
  }

  sweep.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < sweep.values.size(); ++i)
    for (std::size_t j = 0; j < probes.size(); ++j) {
      sweep.min_ratio = std::min(sweep.min_ratio, sweep.values[i][j] / m_values[i]);
      if (i && sweep.values[i][j] < sweep.values[i - 1][j] * (1.0 - 1e-12)) sweep.monotone_ok = false;
    }
  if (sweep.failure) return sweep;

  // Last decade: compare the largest m with the largest m' <= m / 10.
  const std::size_t last = m_values.size() - 1;
  std::size_t anchor = 0;
  for (std::size_t i = 0; i < last; ++i)
    if (m_values[i] <= m_values[last] / 10.0 * (1.0 + 1e-12)) anchor = i;
  sweep.growth_exponent = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < probes.size(); ++j) {
    const double hi = sweep.values[last][j];
    const double lo = sweep.values[anchor][j];
    sweep.last_decade_increment = std::max(sweep.last_decade_increment, (hi - lo) / std::max(hi, 1e-300));
    const double exponent = (hi > 0 && lo > 0) ? std::log(hi / lo) / std::log(m_values[last] / m_values[anchor]) : 0.0;
    sweep.growth_exponent = std::min(sweep.growth_exponent, exponent);
  }
  sweep.verdict = sweep.last_decade_increment < 0.01 ? SweepVerdict::saturates : SweepVerdict::diverges;
  return sweep;
}

std::string to_string(PotentialVerdict v) {
  return v == PotentialVerdict::apparently_finite ? "apparently finite" : "apparently divergent";
}

PotentialDiagnostic green_potential_diagnostic(const TruncationFamily& family, const CoefficientSet& coeffs,
                                               const Density& p, const MaskPtr& thin_set,
                                               const std::vector<Point>& probes, const ExperimentParams& params) {
  if (family.masks.size() < 2) throw PreconditionError("potential diagnostic needs at least two truncations");
  if (thin_set && !(thin_set->grid() == *family.grid)) throw PreconditionError("thin set must share the grid");
  PotentialDiagnostic diag;
  diag.radii = family.radii;
  diag.probes = probes;
  for (const MaskPtr& mask : family.masks) {
    const auto idx = locate_probes(*mask, probes);
    const AssembledOperator op = assemble(mask, coeffs, params.scheme);
    Field source(mask, 0.0);
    for (std::size_t i : mask->interior()) {
      if (thin_set && thin_set->is_active(i)) continue;
      const double v = p({i, mask->grid().point(i)});
      if (v < 0) throw PreconditionError("potential density must be nonnegative");
      source[i] = v;
    }
    const Field u = green_apply(op, source, params.solver.linear);
    std::vector<double> row;
    for (std::size_t i : idx) row.push_back(u[i]);
    diag.values.push_back(std::move(row));
  }
  const std::size_t n = diag.values.size();
  diag.increment_exponent = -std::numeric_limits<double>::infinity();
  bool all_zero = true;
  for (std::size_t j = 0; j < probes.size(); ++j) {
    for (std::size_t k = 1; k < n; ++k) {
      if (diag.values[k][j] < diag.values[k - 1][j] * (1.0 - 1e-9) - 1e-14) diag.monotone_ok = false;
      if (diag.values[k][j] != 0.0) all_zero = false;
    }
    // Fit log(increment) against log(radius) by least squares.
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = 1; k < n; ++k) {
      const double inc = diag.values[k][j] - diag.values[k - 1][j];
      if (inc > 0) {
        xs.push_back(std::log(diag.radii[k]));
        ys.push_back(std::log(inc));
      }
    }
    if (xs.size() >= 2) {
      double mx = 0, my = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        mx += xs[k];
        my += ys[k];
      }
      mx /= static_cast<double>(xs.size());
      my /= static_cast<double>(xs.size());
      double sxy = 0, sxx = 0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - mx) * (ys[k] - my);
        sxx += (xs[k] - mx) * (xs[k] - mx);
      }
      diag.increment_exponent = std::max(diag.increment_exponent, sxy / sxx);
    } else if (xs.size() == 1) {
      // A single positive increment gives no trend; treat it as non-decaying.
      diag.increment_exponent = std::max(diag.increment_exponent, 0.0);
    }
  }
  if (all_zero) diag.increment_exponent = -std::numeric_limits<double>::infinity();
  diag.verdict = diag.increment_exponent < -0.1 ? PotentialVerdict::apparently_finite
                                                : PotentialVerdict::apparently_divergent;
  return diag;
}

ThinnessWitnessReport check_thinness_witness(const AssembledOperator& op, const Field& s, const MaskPtr& thin_set,
                                             double tolerance) {
  if (!s.mask().same_as(op.mask())) throw PreconditionError("witness lives on another mask");
  ThinnessWitnessReport r;
  const auto pts = closure_points(op.mask());
  r.min_value = std::numeric_limits<double>::infinity();
  for (std::size_t i : pts) {
    r.min_value = std::min(r.min_value, s[i]);
    if (s[i] < 1.0 - tolerance) r.below_one_somewhere = true;
    if (thin_set && thin_set->is_active(i) && s[i] < 1.0 - tolerance) r.covers_thin_set = false;
  }
  r.nonnegative = r.min_value >= -tolerance;
  const Eigen::VectorXd as = op.apply_interior(s);
  r.max_laplacian = as.size() ? as.maxCoeff() : 0.0;
  r.superharmonic = r.max_laplacian <= tolerance;
  r.pass = r.nonnegative && r.superharmonic && r.covers_thin_set && r.below_one_somewhere;
  return r;
}

DichotomyReport dichotomy_report(const DichotomySetup& setup) {
  DichotomyReport rep;
  rep.name = setup.name;

  std::vector<double> t_grid;
  for (int j = 0; j <= 64; ++j) t_grid.push_back(4.0 * j / 64.0);
  const std::vector<Site> sites = sites_of(*setup.family.masks.back());
  rep.hypotheses = check_hypotheses(setup.phi, sites, t_grid, setup.density);
  auto require = [&](const HypothesisResult& h, const char* name) {
    if (!h.assessed || !h.pass) {
      rep.hypotheses_ok = false;
      rep.violated.emplace_back(name);
    }
  };
  require(rep.hypotheses.sh1, "SH1");
  require(rep.hypotheses.h2, "H2");
  require(rep.hypotheses.h3, "H3");

  rep.exhaustion = run_exhaustion(exhaustion_from_truncations(setup.family), setup.coeffs, setup.phi, setup.c,
                                  setup.params);
  rep.sup_identity = check_sup_identity(rep.exhaustion, setup.sup_params);
  rep.bounded = bounded_solution_indicated(rep.exhaustion, setup.sup_params);
  rep.bounded_indicated = rep.bounded.indicated;

  if (setup.sweep_domain) {
    const AssembledOperator op =
        assemble(setup.sweep_domain, setup.sweep_coeffs.value_or(setup.coeffs), setup.params.scheme);
    rep.sweep = blowup_sweep(op, setup.phi, setup.m_values, setup.sweep_probes, setup.params.solver);
    rep.large_indicated = rep.sweep.verdict == SweepVerdict::saturates;
  }
  if (setup.density && !setup.potential_probes.empty()) {
    rep.potential = green_potential_diagnostic(setup.family, setup.coeffs, *setup.density, setup.thin_set,
                                               setup.potential_probes, setup.params);
  }
  rep.contradiction = rep.hypotheses_ok && rep.bounded_indicated && rep.large_indicated;
  return rep;
}

}  // namespace sublin
