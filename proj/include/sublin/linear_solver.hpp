#pragma once

#include <Eigen/SparseCore>
#include <memory>
#include <string>

#include "sublin/elliptic_operator.hpp"

namespace sublin {

enum class SolverMethod { automatic, direct, iterative };

struct LinearSolverParams {
  SolverMethod method = SolverMethod::automatic;
  /// Relative residual target of the iterative method.
  double tolerance = 1e-10;
  int max_iterations = 20000;
  /// automatic picks the direct method up to this many unknowns.
  std::size_t direct_limit = 50000;
  /// Tighter limit in 3D, where simplicial fill-in grows quickly.
  std::size_t direct_limit_3d = 4096;
};

SolverMethod parse_solver_method(const std::string& name);
std::string to_string(SolverMethod method);

/// Factorized interior system  (diag(shift) - K_II) u = rhs.
/// With an M-matrix K_II and shift >= 0 the matrix is a nonsingular M-matrix.
/// The sparsity pattern is analysed once; set_shift() refactorizes.
class ShiftedSystem {
 public:
  ShiftedSystem(const AssembledOperator& op, const LinearSolverParams& params);
  ShiftedSystem(const AssembledOperator& op, const Eigen::VectorXd& shift, const LinearSolverParams& params);
  ~ShiftedSystem();
  ShiftedSystem(ShiftedSystem&&) noexcept;
  ShiftedSystem& operator=(ShiftedSystem&&) noexcept;

  void set_shift(const Eigen::VectorXd& shift);
  /// Throws NumericalError when the solve fails.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  SolverMethod method() const { return method_; }
  /// Iterations used by the last iterative solve (0 for direct).
  int last_iterations() const { return last_iterations_; }
  std::size_t size() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  SolverMethod method_;
  mutable int last_iterations_ = 0;
};

}  // namespace sublin
