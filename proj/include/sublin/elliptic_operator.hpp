#pragma once

// Finite-difference assembly of the non-divergence operator
//   L = sum_ij a_ij d_i d_j + sum_i b_i d_i + c,   c <= 0,
// on a DomainMask, together with the structural checks (ellipticity and
// M-matrix sign pattern) that the comparison principle relies on.

#include <Eigen/SparseCore>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sublin/field.hpp"
#include "sublin/geometry.hpp"

namespace sublin {

using CoefficientFn = std::function<double(const Point&)>;

struct CoefficientSet {
  std::size_t dim = 0;
  /// Row-major d*d entries a_ij. Only the symmetric part enters L.
  std::vector<CoefficientFn> a;
  /// d drift components; empty means b = 0.
  std::vector<CoefficientFn> b;
  /// Zero-order term, must be nonpositive; empty means c = 0.
  CoefficientFn c;

  static CoefficientSet laplacian(std::size_t dim);
  static CoefficientSet constant(std::size_t dim, const std::vector<double>& a,
                                 const std::vector<double>& b = {}, double c = 0.0);

  double a_sym(std::size_t i, std::size_t j, const Point& x) const;
  double drift(std::size_t i, const Point& x) const;
  double reaction(const Point& x) const;
};

enum class DriftScheme { upwind, centered };

/// directional: the sign-adapted 7-point stencil (corner pair along the
/// diagonal matching sign(a_ij)); monotone when a is diagonally dominant.
/// centered: the 4-point corner stencil, never monotone for a_ij != 0.
enum class CrossScheme { directional, centered };

struct SchemeOptions {
  DriftScheme drift = DriftScheme::upwind;
  CrossScheme cross = CrossScheme::directional;
  /// Throw from assemble() when the M-matrix check fails.
  bool require_m_matrix = false;
};

/// Discrete operator on interior unknowns. Boundary points carry identity
/// rows (u = data); they are stored as the coupling block K_IB so that
///   (A u)_I = K_II u_I + K_IB u_B.
class AssembledOperator {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  AssembledOperator(MaskPtr mask, Matrix interior_block, Matrix boundary_block, SchemeOptions options);

  const DomainMask& mask() const { return *mask_; }
  const MaskPtr& mask_ptr() const { return mask_; }
  const Matrix& interior_block() const { return kii_; }
  const Matrix& boundary_block() const { return kib_; }
  const SchemeOptions& options() const { return options_; }
  std::size_t interior_size() const { return static_cast<std::size_t>(kii_.rows()); }
  bool symmetric_interior() const { return symmetric_; }

  /// A u at interior points; boundary points copy u.
  Field apply(const Field& u) const;
  /// A u restricted to interior points, in interior ordering.
  Eigen::VectorXd apply_interior(const Field& u) const;

  /// Full (interior + boundary) matrix in the mask's active ordering:
  /// interior points first, then boundary points with identity rows.
  Matrix full_matrix() const;

 private:
  MaskPtr mask_;
  Matrix kii_;
  Matrix kib_;
  SchemeOptions options_;
  bool symmetric_ = false;
};

struct EllipticityReport {
  bool pass = true;
  /// Smallest eigenvalue of the symmetric part of a over all checked points.
  double min_eigenvalue = 0.0;
  /// Smallest ratio lambda_min / lambda_max.
  double min_condition_ratio = 1.0;
  bool conditioning_warning = false;
  std::optional<Point> worst_point;
  /// Per-point smallest eigenvalue on interior and boundary points.
  std::vector<double> per_point;
  std::string message;
};

/// Ratio lambda_min / lambda_max below which a conditioning warning is issued.
inline constexpr double kConditioningWarning = 1e-8;

EllipticityReport check_ellipticity(const CoefficientSet& coeffs, const DomainMask& mask);

struct MMatrixReport {
  bool pass = true;
  bool positive_diagonal = true;
  bool nonpositive_offdiagonal = true;
  bool diagonally_dominant = true;
  bool chained_dominance = true;
  std::optional<Point> first_violation;
  std::string message;
  std::string suggestion;
};

/// Checks that -A restricted to interior rows is a (weakly chained
/// diagonally dominant) M-matrix.
MMatrixReport check_m_matrix(const AssembledOperator& op);

/// Throws PreconditionError on ellipticity failure (with location) or a
/// positive zero-order coefficient, and on M-matrix failure when requested.
AssembledOperator assemble(MaskPtr mask, const CoefficientSet& coeffs, SchemeOptions options = {});

}  // namespace sublin
