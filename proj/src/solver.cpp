#include "sublin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sublin/error.hpp"
#include "sublin/potential.hpp"

namespace sublin {

namespace {

constexpr double kShiftCap = 1e30;
constexpr int kLipschitzNodes = 16;
constexpr double kLipschitzMargin = 1.1;
constexpr double kRoundoffFactor = 1e3 * std::numeric_limits<double>::epsilon();

std::vector<Site> interior_sites(const DomainMask& mask) {
  std::vector<Site> sites;
  sites.reserve(mask.interior().size());
  for (std::size_t i : mask.interior()) sites.push_back({i, mask.grid().point(i)});
  return sites;
}

Eigen::VectorXd evaluate(const Phi& phi, const std::vector<Site>& sites, const Eigen::VectorXd& u) {
  Eigen::VectorXd out(u.size());
  for (Eigen::Index i = 0; i < u.size(); ++i) out[i] = phi(sites[static_cast<std::size_t>(i)], u[i]);
  return out;
}

double sup_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double secant_shift(const Phi& phi, const Site& s, double u, double phi_u) {
  if (!(u > 1e-300)) return 0.0;
  return std::clamp((phi_u - phi(s, 0.0)) / u, 0.0, kShiftCap);
}

double tangent_shift(const Phi& phi, const Site& s, double u, double phi_u) {
  const double base = std::max(u, 0.0);
  const double eps = 1e-7 * std::max(base, 1e-8);
  return std::clamp((phi(s, base + eps) - phi_u) / eps, 0.0, kShiftCap);
}

double lipschitz_shift(const Phi& phi, const Site& s, double u, double phi_u) {
  if (!(u > 0)) return 0.0;
  double best = 0.0;
  double prev = phi(s, 0.0);
  for (int k = 1; k <= kLipschitzNodes; ++k) {
    const double t = u * k / kLipschitzNodes;
    const double v = k == kLipschitzNodes ? phi_u : phi(s, t);
    best = std::max(best, (v - prev) / (u / kLipschitzNodes));
    prev = v;
  }
  best = std::max(best, tangent_shift(phi, s, u, phi_u));
  return std::min(kLipschitzMargin * best, kShiftCap);
}

enum class Rule { secant, tangent, lipschitz, fixed };

}  // namespace

Eigen::VectorXd semilinear_residual(const AssembledOperator& op, const Phi& phi, const Field& u) {
  const std::vector<Site> sites = interior_sites(op.mask());
  return op.apply_interior(u) - evaluate(phi, sites, u.interior_values());
}

std::pair<Field, SolveReport> solve_semilinear_dirichlet(const AssembledOperator& op, const Phi& phi,
                                                         const Field& boundary_data, const SemilinearParams& params) {
  if (!(params.tolerance > 0)) throw PreconditionError("solver tolerance must be positive");
  if (params.max_iterations < 1) throw PreconditionError("max_iterations must be positive");
  if (params.shift_lambda && !(*params.shift_lambda >= 0))
    throw PreconditionError("shift_lambda must be nonnegative");
  if (!boundary_data.mask().same_as(op.mask())) throw PreconditionError("boundary data lives on another mask");
  const Eigen::VectorXd fb = boundary_data.boundary_values();
  if (!fb.allFinite()) throw PreconditionError("boundary data must be finite");
  if (fb.size() && fb.minCoeff() < 0) throw PreconditionError("boundary data must be nonnegative");
  if (!phi.claims().h2 || !phi.claims().h3)
    throw HypothesisError("the semilinear solver needs phi to satisfy H2 and H3 (" + phi.description() + ")");

  SolveReport report;
  const MMatrixReport mm = check_m_matrix(op);
  report.m_matrix = mm.pass;
  if (!mm.pass) report.warnings.push_back("operator is not an M-matrix; comparison is not guaranteed: " + mm.message);

  const std::vector<Site> sites = interior_sites(op.mask());
  const auto& kii = op.interior_block();
  const Eigen::VectorXd kf = op.boundary_block() * fb;
  const Eigen::Index n = kii.rows();

  // Residual tests allow for the roundoff in K_II u + K_IB f, which dominates
  // once u is large compared with 1 / (tol h^2).
  const AssembledOperator::Matrix abs_kii = kii.cwiseAbs();
  const Eigen::VectorXd abs_kf = op.boundary_block().cwiseAbs() * fb.cwiseAbs();
  const double tol = params.tolerance;
  auto residual_band = [&](const Eigen::VectorXd& v, const Eigen::VectorXd& phi_v) {
    const double roundoff = n ? (abs_kii * v.cwiseAbs() + abs_kf).maxCoeff() : 0.0;
    return std::max(10.0 * tol * std::max(1.0, sup_norm(phi_v)), kRoundoffFactor * roundoff);
  };

  ShiftedSystem base(op, params.linear);
  Eigen::VectorXd u = base.solve(kf);
  Eigen::VectorXd phi_u = evaluate(phi, sites, u);

  const bool fixed = params.shift_lambda.has_value();
  ShiftedSystem system = fixed ? ShiftedSystem(op, Eigen::VectorXd::Constant(n, *params.shift_lambda), params.linear)
                               : ShiftedSystem(op, Eigen::VectorXd::Zero(n), params.linear);
  std::vector<Rule> rules;
  if (fixed) {
    rules = {Rule::fixed};
  } else if (phi.claims().h4) {
    rules = {Rule::secant, Rule::lipschitz};
  } else {
    rules = {Rule::tangent, Rule::lipschitz};
  }

  Eigen::VectorXd shift(n);
  Eigen::VectorXd next;
  Eigen::VectorXd phi_next;
  for (int k = 1; k <= params.max_iterations; ++k) {
    const double u_scale = std::max(1.0, sup_norm(u));
    const Eigen::VectorXd residual = kii * u + kf - phi_u;
    Rule used = rules.back();
    for (Rule rule : rules) {
      if (rule != Rule::fixed) {
        for (Eigen::Index i = 0; i < n; ++i) {
          const Site& s = sites[static_cast<std::size_t>(i)];
          switch (rule) {
            case Rule::secant: shift[i] = secant_shift(phi, s, u[i], phi_u[i]); break;
            case Rule::tangent: shift[i] = tangent_shift(phi, s, u[i], phi_u[i]); break;
            default: shift[i] = lipschitz_shift(phi, s, u[i], phi_u[i]); break;
          }
        }
        system.set_shift(shift);
      }
      // Correction form of the shifted step: the linear solve only has to
      // resolve the current residual, so its relative tolerance does not
      // put a floor under the nonlinear increments.
      next = u + system.solve(residual);
      phi_next = evaluate(phi, sites, next);
      used = rule;
      if (rule == Rule::fixed || rule == Rule::lipschitz) break;
      // Keep the step only if it lands on a nonnegative supersolution.
      const Eigen::VectorXd r = kii * next + kf - phi_next;
      const bool super = r.size() == 0 || r.maxCoeff() <= residual_band(next, phi_next);
      if (super && (next.size() == 0 || next.minCoeff() >= -tol * u_scale)) break;
    }
    switch (used) {
      case Rule::secant: ++report.secant_steps; break;
      case Rule::tangent: ++report.tangent_steps; break;
      case Rule::lipschitz: ++report.lipschitz_steps; break;
      case Rule::fixed: ++report.fixed_steps; break;
    }

    const Eigen::VectorXd step = next - u;
    const double increment = sup_norm(step);
    if (step.size() && step.maxCoeff() > tol * u_scale) report.monotone_history = false;
    if (next.size() && next.minCoeff() < -tol * u_scale) {
      std::ostringstream msg;
      msg << "iterate turned negative (" << next.minCoeff() << ") at iteration " << k
          << "; monotonicity of the scheme broke down";
      throw NumericalError(msg.str());
    }
    // Roundoff below zero; phi vanishes there, so phi_next is unchanged.
    u = next.cwiseMax(0.0);
    phi_u = phi_next;
    report.iterations = k;
    report.final_increment = increment;
    report.interior_residual = sup_norm(kii * u + kf - phi_u);
    if (params.record_history) report.history.push_back(increment);
    if (increment <= tol * std::max(1.0, sup_norm(u)) &&
        report.interior_residual <= residual_band(u, phi_u)) {
      report.converged = true;
      break;
    }
  }
  if (!report.monotone_history) report.warnings.push_back("iterates were not monotonically nonincreasing");

  Field solution = boundary_data;
  solution.set_interior(u);
  // H f - u - G phi(u) = (-K_II)^{-1} (K_IB f - phi(u)) - u.
  report.identity_residual = sup_norm(base.solve(kf - phi_u) - u);
  if (!report.converged) {
    std::ostringstream msg;
    msg << "semilinear iteration did not converge in " << params.max_iterations << " iterations (last increment "
        << report.final_increment << ", residual " << report.interior_residual << ")";
    throw ConvergenceError(msg.str(), report);
  }
  return {std::move(solution), std::move(report)};
}

Field solve_linear_reaction(const AssembledOperator& op, const Field& p, const Field& boundary_data,
                            const LinearSolverParams& params) {
  if (!p.mask().same_as(op.mask()) || !boundary_data.mask().same_as(op.mask()))
    throw PreconditionError("reaction data lives on another mask");
  const Eigen::VectorXd pi = p.interior_values();
  if (!pi.allFinite() || (pi.size() && pi.minCoeff() < 0)) throw PreconditionError("reaction density must be >= 0");
  const Eigen::VectorXd fb = boundary_data.boundary_values();
  if (!fb.allFinite()) throw PreconditionError("boundary data must be finite");
  ShiftedSystem system(op, pi, params);
  Field out = boundary_data;
  out.set_interior(system.solve(op.boundary_block() * fb));
  return out;
}

double identity_residual(const AssembledOperator& op, const Phi& phi, const Field& u,
                         const LinearSolverParams& params) {
  if (!u.mask().same_as(op.mask())) throw PreconditionError("field lives on another mask");
  const std::vector<Site> sites = interior_sites(op.mask());
  const Eigen::VectorXd ui = u.interior_values();
  const Eigen::VectorXd rhs = op.boundary_block() * u.boundary_values() - evaluate(phi, sites, ui);
  ShiftedSystem base(op, params);
  return sup_norm(base.solve(rhs) - ui);
}

std::string to_string(SolutionClass c) {
  switch (c) {
    case SolutionClass::solution: return "solution";
    case SolutionClass::supersolution: return "supersolution";
    case SolutionClass::subsolution: return "subsolution";
    default: return "neither";
  }
}

SolutionClass classify_super_sub(const AssembledOperator& op, const Phi& phi, const Field& u, double band) {
  if (!u.mask().same_as(op.mask())) throw PreconditionError("field lives on another mask");
  const std::vector<Site> sites = interior_sites(op.mask());
  const Eigen::VectorXd ui = u.interior_values();
  if (!ui.allFinite() || !u.boundary_values().allFinite()) throw PreconditionError("field must be finite");
  const Eigen::VectorXd phi_u = evaluate(phi, sites, ui);
  const Eigen::VectorXd r = op.apply_interior(u) - phi_u;
  if (r.size() == 0) return SolutionClass::solution;
  const double scaled = band * std::max(1.0, sup_norm(phi_u));
  const bool below = r.maxCoeff() <= scaled;
  const bool above = r.minCoeff() >= -scaled;
  if (below && above) return SolutionClass::solution;
  if (below) return SolutionClass::supersolution;
  if (above) return SolutionClass::subsolution;
  return SolutionClass::neither;
}

}  // namespace sublin
