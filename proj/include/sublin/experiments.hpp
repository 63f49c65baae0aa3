#pragma once

// Exhaustion limits v_c, the sup identity, blow-up sweeps, Green-potential
// integrability diagnostics and the bounded-versus-large dichotomy report.

#include <optional>
#include <string>
#include <vector>

#include "sublin/elliptic_operator.hpp"
#include "sublin/field.hpp"
#include "sublin/geometry.hpp"
#include "sublin/nonlinearity.hpp"
#include "sublin/solver.hpp"

namespace sublin {

struct ExperimentParams {
  SemilinearParams solver;
  SchemeOptions scheme;
};

/// Solver settings used by the experiments: iterative linear solves with a
/// tight relative tolerance.
ExperimentParams default_experiment_params();

struct ExhaustionRun {
  std::vector<MaskPtr> levels;
  double c = 0.0;
  HypothesisFlags claims;
  /// U_{D_n}^phi c on each level.
  std::vector<Field> level_solutions;
  /// The same fields restricted to D_1.
  std::vector<Field> per_level;
  /// sup of U_{D_n}^phi c over the interior of D_n.
  std::vector<double> level_sups;
  /// sup of U_{D_n}^phi c over the interior of D_1.
  std::vector<double> core_sups;
  /// Deepest interior point of D_1 and its distance to the boundary of each level.
  std::size_t core_point = 0;
  std::vector<double> core_depths;
  /// U_{D_n}^phi c at the core point.
  std::vector<double> core_values;
  /// Core value extrapolated in depth^(2-d) from the top two levels.
  double core_limit = 0.0;
  std::string richardson_note;
  /// max over n of (U_{D_{n+1}} - U_{D_n}) on closure(D_n).
  double decreasing_violation = 0.0;
  bool decreasing_ok = true;
  /// sup of v_c (the last level solution) over the largest level.
  double sup_estimate = 0.0;
  std::vector<SolveReport> reports;

  const Field& v_c() const { return level_solutions.back(); }
};

/// Solves U_{D_n}^phi c on every level of the sequence.
ExhaustionRun run_exhaustion(const ExhaustionSequence& sequence, const CoefficientSet& coeffs, const Phi& phi,
                             double c, const ExperimentParams& params = default_experiment_params());

/// The first k levels of a run, as if the exhaustion stopped at D_k.
ExhaustionRun truncate_run(const ExhaustionRun& run, std::size_t k);

enum class SupVerdict { trivial, saturating, intermediate };
std::string to_string(SupVerdict v);

struct SupIdentityParams {
  /// Core limits at or below trivial_fraction * c count as v_c = 0.
  double trivial_fraction = 0.1;
  /// sup_estimate >= (1 - band) c counts as saturating.
  double band = 0.1;
};

struct SupIdentityReport {
  SupVerdict verdict = SupVerdict::intermediate;
  double sup_estimate = 0.0;
  double core_limit = 0.0;
  double c = 0.0;
  std::string note;
};

SupIdentityReport check_sup_identity(const ExhaustionRun& run, const SupIdentityParams& params = {});

struct BoundedIndication {
  bool indicated = false;
  std::vector<SupIdentityReport> prefixes;
  double relative_change = 0.0;
  std::string note;
};

/// Bounded nontrivial solution indicated: the runs truncated at the top two
/// levels are both saturating and their sup estimates differ by < 5%.
BoundedIndication bounded_solution_indicated(const ExhaustionRun& run, const SupIdentityParams& params = {});

struct ScalingReport {
  bool skipped = false;
  bool pass = true;
  double ratio = 1.0;
  /// min over the common level of v_lambda - ratio * v_lambda1.
  double min_margin = 0.0;
  std::string warning;
};

/// v_lambda >= (lambda / lambda1) v_lambda1 - tolerance on the last level.
/// Skipped with a warning unless both runs claim H4. Throws PreconditionError
/// on mismatched geometry or lambda < lambda1.
ScalingReport scaling_bound_check(const ExhaustionRun& run_lambda, const ExhaustionRun& run_lambda1,
                                  double tolerance = 1e-8);

enum class SweepVerdict { diverges, saturates, incomplete };
std::string to_string(SweepVerdict v);

struct BlowupSweep {
  std::vector<double> m_values;
  std::vector<Point> probes;
  /// values[i][j] = u_{m_i}(probe_j) for the m values that solved.
  std::vector<std::vector<double>> values;
  SweepVerdict verdict = SweepVerdict::incomplete;
  bool monotone_ok = true;
  /// Relative increment of u_m(x0) over the last decade of m (max over probes).
  double last_decade_increment = 0.0;
  /// log-log growth exponent over the last decade (min over probes).
  double growth_exponent = 0.0;
  /// min over the table of u_m(x0) / m.
  double min_ratio = 0.0;
  std::optional<std::string> failure;
};

/// u_m = U_D^phi m for each m; m_values increasing, >= 4 values spanning >= 2
/// decades; probes are interior points. A failed solve ends the sweep with a
/// partial table and the failure message.
BlowupSweep blowup_sweep(const AssembledOperator& op, const Phi& phi, const std::vector<double>& m_values,
                         const std::vector<Point>& probes, const SemilinearParams& params = {});

enum class PotentialVerdict { apparently_finite, apparently_divergent };
std::string to_string(PotentialVerdict v);

struct PotentialDiagnostic {
  std::vector<double> radii;
  std::vector<Point> probes;
  /// values[k][j] = sum_y G_{D_k}(x0_j, y) p(y) h^d over D_k minus A.
  std::vector<std::vector<double>> values;
  PotentialVerdict verdict = PotentialVerdict::apparently_finite;
  /// Power-law exponent of the increments against the radius (max over probes).
  double increment_exponent = 0.0;
  bool monotone_ok = true;
};

/// Zero-Dirichlet Green potentials of p 1_{not A} on each truncation.
/// `thin_set` (same grid, may be null) marks A through its interior and boundary.
PotentialDiagnostic green_potential_diagnostic(const TruncationFamily& family, const CoefficientSet& coeffs,
                                               const Density& p, const MaskPtr& thin_set,
                                               const std::vector<Point>& probes,
                                               const ExperimentParams& params = default_experiment_params());

struct ThinnessWitnessReport {
  bool nonnegative = true;
  bool superharmonic = true;
  bool covers_thin_set = true;
  bool below_one_somewhere = false;
  double min_value = 0.0;
  double max_laplacian = 0.0;
  bool pass = false;
};

/// Checks a user-supplied witness s for thinness of A at infinity on a
/// truncation: s >= 0, A s <= tol, s >= 1 on A, s(x0) < 1 at some point.
ThinnessWitnessReport check_thinness_witness(const AssembledOperator& op, const Field& s, const MaskPtr& thin_set,
                                             double tolerance = 1e-9);

struct DichotomySetup {
  std::string name;
  /// Exhaustion of the (truncated) domain.
  TruncationFamily family;
  CoefficientSet coeffs;
  Phi phi = Phi::zero();
  double c = 1.0;
  /// Density used by the sampling checks and the potential diagnostic.
  std::optional<Density> density;
  /// Bounded domain for the blow-up sweep; it may have its own dimension, in
  /// which case sweep_coeffs must match it.
  MaskPtr sweep_domain;
  std::optional<CoefficientSet> sweep_coeffs;
  std::vector<double> m_values;
  std::vector<Point> sweep_probes;
  std::vector<Point> potential_probes;
  MaskPtr thin_set;
  SupIdentityParams sup_params;
  ExperimentParams params = default_experiment_params();
};

struct DichotomyReport {
  std::string name;
  HypothesisReport hypotheses;
  /// SH1, H2, H3 hold on the samples (the hypotheses of the dichotomy).
  bool hypotheses_ok = true;
  std::vector<std::string> violated;
  ExhaustionRun exhaustion;
  SupIdentityReport sup_identity;
  BoundedIndication bounded;
  BlowupSweep sweep;
  PotentialDiagnostic potential;
  bool bounded_indicated = false;
  bool large_indicated = false;
  /// (bounded, large) = (yes, yes) under checked hypotheses.
  bool contradiction = false;
};

DichotomyReport dichotomy_report(const DichotomySetup& setup);

}  // namespace sublin
