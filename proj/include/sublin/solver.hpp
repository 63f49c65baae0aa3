#pragma once

// U_D^phi f: the nonnegative solution of  A u = phi(., u) in D,  u = f on dD,
// computed by a shifted monotone iteration started from the harmonic
// extension H_D f (a supersolution):
//
//   (Lambda - K_II) u_{k+1} = Lambda u_k - phi(u_k) + K_IB f.
//
// With an M-matrix operator and a pointwise shift Lambda that makes
// t -> Lambda t - phi(x, t) nondecreasing on [0, u_k(x)], or that keeps
// u_{k+1} a supersolution, the iterates decrease and stay above U_D^phi f.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sublin/elliptic_operator.hpp"
#include "sublin/error.hpp"
#include "sublin/field.hpp"
#include "sublin/linear_solver.hpp"
#include "sublin/nonlinearity.hpp"

namespace sublin {

struct SemilinearParams {
  /// Constant shift; nullopt selects the adaptive pointwise shift.
  std::optional<double> shift_lambda;
  double tolerance = 1e-10;
  int max_iterations = 1000;
  bool record_history = false;
  LinearSolverParams linear;
};

struct SolveReport {
  int iterations = 0;
  double final_increment = 0.0;
  double interior_residual = 0.0;
  double identity_residual = 0.0;
  bool monotone_history = true;
  bool converged = false;
  bool m_matrix = true;
  /// Steps taken with each shift rule: secant, tangent, lipschitz, fixed.
  int secant_steps = 0;
  int tangent_steps = 0;
  int lipschitz_steps = 0;
  int fixed_steps = 0;
  std::vector<std::string> warnings;
  /// Sup-norm increments per iteration when requested.
  std::vector<double> history;
};

/// Thrown when max_iterations is exhausted; carries the partial report.
class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, SolveReport report)
      : NumericalError(what), report_(std::move(report)) {}
  const SolveReport& report() const { return report_; }

 private:
  SolveReport report_;
};

/// Throws PreconditionError for negative or non-finite boundary data,
/// HypothesisError when phi does not claim H2 and H3, ConvergenceError on
/// non-convergence and NumericalError when an iterate turns negative.
std::pair<Field, SolveReport> solve_semilinear_dirichlet(const AssembledOperator& op, const Phi& phi,
                                                         const Field& boundary_data,
                                                         const SemilinearParams& params = {});

/// A u = p u in the interior, u = f on the boundary: one solve with shift p.
Field solve_linear_reaction(const AssembledOperator& op, const Field& p, const Field& boundary_data,
                            const LinearSolverParams& params = {});

/// sup over the interior of |H f - u - G phi(., u)| with f = u on the boundary.
double identity_residual(const AssembledOperator& op, const Phi& phi, const Field& u,
                         const LinearSolverParams& params = {});

/// A u - phi(., u) at interior points, in interior order.
Eigen::VectorXd semilinear_residual(const AssembledOperator& op, const Phi& phi, const Field& u);

enum class SolutionClass { solution, supersolution, subsolution, neither };
std::string to_string(SolutionClass c);

/// Sign of A u - phi(., u) with band `band * max(1, sup |phi(., u)|)`.
SolutionClass classify_super_sub(const AssembledOperator& op, const Phi& phi, const Field& u, double band = 1e-9);

}  // namespace sublin
