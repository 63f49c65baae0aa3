#pragma once

// Harmonic extension, Green potentials and kernel columns of an assembled
// operator, plus the windowed Kato-norm estimator.
//
// Sign convention: G g solves A u = -g in the interior with u = 0 on the
// boundary, so G g >= 0 for g >= 0 when A is an M-matrix discretization.

#include <vector>

#include "sublin/elliptic_operator.hpp"
#include "sublin/field.hpp"
#include "sublin/linear_solver.hpp"

namespace sublin {

/// One factorization of -K_II shared by extension, potential and kernel solves.
class PotentialSolver {
 public:
  PotentialSolver(const AssembledOperator& op, const LinearSolverParams& params = {});

  const AssembledOperator& op() const { return *op_; }

  Field harmonic_extension(const Field& boundary_data) const;
  Field green_apply(const Field& source) const;
  /// Discrete G(., y) for an interior point y: source 1/h^d at y.
  Field kernel_column(std::size_t y_flat) const;

 private:
  const AssembledOperator* op_;
  ShiftedSystem system_;
};

/// Throws PreconditionError on non-finite data, NumericalError on solve failure.
Field harmonic_extension(const AssembledOperator& op, const Field& boundary_data,
                         const LinearSolverParams& params = {});
Field green_apply(const AssembledOperator& op, const Field& source, const LinearSolverParams& params = {});
Field green_kernel_column(const AssembledOperator& op, std::size_t y_flat, const LinearSolverParams& params = {});

/// Integral of the Kato kernel over one lattice cell centred at the origin:
/// |z|^(2-d) for d >= 3, log(alpha/|z|) for d = 2.
double kato_cell_integral(const Grid& grid, double alpha);

/// sup over active window points x of  sum_{|x-y| <= alpha} |p(y)| k(x-y) h^d,
/// the y = x term replaced by kato_cell_integral. p and window share a grid.
double kato_norm_estimate(const Field& p, double alpha, const DomainMask& window);

/// Potential-property proxy at a fixed pole y: on each sub-domain D' of the
/// operator's mask (containing y in its interior), H_{D'}(G(., y)|dD') is
/// compared with G(., y) on D'.
struct PotentialProxyLevel {
  std::size_t interior_points = 0;
  /// max over D' interior of H_{D'}G - G; negative means strictly below.
  double max_gap = 0.0;
  /// (G - H_{D'}G)(y).
  double gap_at_pole = 0.0;
};

struct PotentialProxyReport {
  std::vector<PotentialProxyLevel> levels;
  bool strictly_below = true;
};

PotentialProxyReport potential_property_proxy(const AssembledOperator& op, const CoefficientSet& coeffs,
                                              std::size_t y_flat, const std::vector<MaskPtr>& sub_domains,
                                              const LinearSolverParams& params = {});

}  // namespace sublin
