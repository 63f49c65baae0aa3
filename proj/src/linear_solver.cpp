#include "sublin/linear_solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <optional>

#include "sublin/error.hpp"

namespace sublin {

SolverMethod parse_solver_method(const std::string& name) {
  if (name == "auto" || name == "automatic") return SolverMethod::automatic;
  if (name == "direct") return SolverMethod::direct;
  if (name == "iterative") return SolverMethod::iterative;
  throw PreconditionError("unknown linear solver method '" + name + "'");
}

std::string to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::direct: return "direct";
    case SolverMethod::iterative: return "iterative";
    default: return "auto";
  }
}

using ColMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;

struct ShiftedSystem::Impl {
  ColMatrix base;  // -K_II
  ColMatrix matrix;
  std::vector<Eigen::Index> diagonal_slot;
  bool symmetric = false;
  LinearSolverParams params;

  std::optional<Eigen::SimplicialLDLT<ColMatrix>> ldlt;
  std::optional<Eigen::SparseLU<ColMatrix>> lu;
  std::optional<Eigen::ConjugateGradient<ColMatrix, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>>> cg;
  std::optional<Eigen::BiCGSTAB<ColMatrix, Eigen::IncompleteLUT<double>>> bicg;
};

ShiftedSystem::ShiftedSystem(const AssembledOperator& op, const LinearSolverParams& params)
    : ShiftedSystem(op, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.interior_size())), params) {}

ShiftedSystem::ShiftedSystem(const AssembledOperator& op, const Eigen::VectorXd& shift,
                             const LinearSolverParams& params)
    : impl_(std::make_unique<Impl>()), method_(params.method) {
  if (!(params.tolerance > 0)) throw PreconditionError("linear solver tolerance must be positive");
  const std::size_t n = op.interior_size();
  if (method_ == SolverMethod::automatic) {
    const std::size_t limit = op.mask().grid().dim() >= 3 ? std::min(params.direct_limit, params.direct_limit_3d)
                                                           : params.direct_limit;
    method_ = n <= limit ? SolverMethod::direct : SolverMethod::iterative;
  }
  impl_->params = params;
  impl_->symmetric = op.symmetric_interior();
  impl_->base = ColMatrix(-op.interior_block());
  // Make sure every diagonal entry is stored so shifts only touch values.
  ColMatrix identity(impl_->base.rows(), impl_->base.cols());
  identity.setIdentity();
  impl_->base = impl_->base + 0.0 * identity;
  impl_->base.makeCompressed();
  impl_->matrix = impl_->base;
  impl_->diagonal_slot.assign(n, -1);
  for (Eigen::Index col = 0; col < impl_->matrix.outerSize(); ++col) {
    for (Eigen::Index k = impl_->matrix.outerIndexPtr()[col]; k < impl_->matrix.outerIndexPtr()[col + 1]; ++k)
      if (impl_->matrix.innerIndexPtr()[k] == col) impl_->diagonal_slot[static_cast<std::size_t>(col)] = k;
  }
  if (method_ == SolverMethod::direct) {
    if (impl_->symmetric) {
      impl_->ldlt.emplace();
      impl_->ldlt->analyzePattern(impl_->matrix);
    } else {
      impl_->lu.emplace();
      impl_->lu->analyzePattern(impl_->matrix);
    }
  } else if (impl_->symmetric) {
    impl_->cg.emplace();
  } else {
    impl_->bicg.emplace();
  }
  set_shift(shift);
}

ShiftedSystem::~ShiftedSystem() = default;
ShiftedSystem::ShiftedSystem(ShiftedSystem&&) noexcept = default;
ShiftedSystem& ShiftedSystem::operator=(ShiftedSystem&&) noexcept = default;

std::size_t ShiftedSystem::size() const { return static_cast<std::size_t>(impl_->matrix.rows()); }

void ShiftedSystem::set_shift(const Eigen::VectorXd& shift) {
  Impl& m = *impl_;
  if (shift.size() != m.matrix.rows()) throw PreconditionError("shift vector has the wrong length");
  double* values = m.matrix.valuePtr();
  const double* base = m.base.valuePtr();
  for (std::size_t i = 0; i < m.diagonal_slot.size(); ++i) {
    const Eigen::Index k = m.diagonal_slot[i];
    values[k] = base[k] + shift[static_cast<Eigen::Index>(i)];
  }
  if (m.ldlt) {
    m.ldlt->factorize(m.matrix);
    if (m.ldlt->info() != Eigen::Success) throw NumericalError("sparse factorization failed");
  } else if (m.lu) {
    m.lu->factorize(m.matrix);
    if (m.lu->info() != Eigen::Success) throw NumericalError("sparse factorization failed: " + m.lu->lastErrorMessage());
  } else if (m.cg) {
    m.cg->setTolerance(m.params.tolerance);
    m.cg->setMaxIterations(m.params.max_iterations);
    m.cg->compute(m.matrix);
    if (m.cg->info() != Eigen::Success) throw NumericalError("preconditioner setup failed");
  } else {
    m.bicg->setTolerance(m.params.tolerance);
    m.bicg->setMaxIterations(m.params.max_iterations);
    m.bicg->compute(m.matrix);
    if (m.bicg->info() != Eigen::Success) throw NumericalError("preconditioner setup failed");
  }
}

Eigen::VectorXd ShiftedSystem::solve(const Eigen::VectorXd& rhs) const {
  const Impl& m = *impl_;
  if (rhs.size() != m.matrix.rows()) throw PreconditionError("right-hand side has the wrong length");
  if (rhs.isZero(0.0)) {
    last_iterations_ = 0;
    return Eigen::VectorXd::Zero(rhs.size());
  }
  Eigen::VectorXd x;
  if (m.ldlt) {
    x = m.ldlt->solve(rhs);
    last_iterations_ = 0;
  } else if (m.lu) {
    x = m.lu->solve(rhs);
    last_iterations_ = 0;
  } else if (m.cg) {
    x = m.cg->solve(rhs);
    last_iterations_ = static_cast<int>(m.cg->iterations());
    if (m.cg->info() != Eigen::Success)
      throw NumericalError("conjugate gradient did not converge (residual " + std::to_string(m.cg->error()) + ")");
  } else {
    x = m.bicg->solve(rhs);
    last_iterations_ = static_cast<int>(m.bicg->iterations());
    if (m.bicg->info() != Eigen::Success)
      throw NumericalError("BiCGSTAB did not converge (residual " + std::to_string(m.bicg->error()) + ")");
  }
  if (!x.allFinite()) throw NumericalError("linear solve produced non-finite values");
  return x;
}

}  // namespace sublin
