#include "sublin/elliptic_operator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <sstream>

#include "sublin/error.hpp"

namespace sublin {

namespace {

CoefficientFn constant_fn(double v) {
  return [v](const Point&) { return v; };
}

std::string where(const Point& x, std::size_t dim) {
  std::ostringstream out;
  out << '(';
  for (std::size_t k = 0; k < dim; ++k) out << (k ? ", " : "") << x[k];
  out << ')';
  return out.str();
}

Eigen::MatrixXd symmetric_part(const CoefficientSet& coeffs, const Point& x) {
  const auto d = static_cast<Eigen::Index>(coeffs.dim);
  Eigen::MatrixXd m(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      m(i, j) = coeffs.a_sym(static_cast<std::size_t>(i), static_cast<std::size_t>(j), x);
  return m;
}

}  // namespace

CoefficientSet CoefficientSet::laplacian(std::size_t dim) {
  std::vector<double> a(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) a[i * dim + i] = 1.0;
  return constant(dim, a);
}

CoefficientSet CoefficientSet::constant(std::size_t dim, const std::vector<double>& a,
                                        const std::vector<double>& b, double c) {
  if (a.size() != dim * dim) throw PreconditionError("constant coefficients: a must be d x d");
  if (!b.empty() && b.size() != dim) throw PreconditionError("constant coefficients: b must have d entries");
  CoefficientSet set;
  set.dim = dim;
  for (double v : a) set.a.push_back(constant_fn(v));
  for (double v : b) set.b.push_back(constant_fn(v));
  if (c != 0.0) set.c = constant_fn(c);
  return set;
}

double CoefficientSet::a_sym(std::size_t i, std::size_t j, const Point& x) const {
  if (i == j) return a[i * dim + i](x);
  return 0.5 * (a[i * dim + j](x) + a[j * dim + i](x));
}

double CoefficientSet::drift(std::size_t i, const Point& x) const { return b.empty() ? 0.0 : b[i](x); }

double CoefficientSet::reaction(const Point& x) const { return c ? c(x) : 0.0; }

AssembledOperator::AssembledOperator(MaskPtr mask, Matrix interior_block, Matrix boundary_block,
                                     SchemeOptions options)
    : mask_(std::move(mask)), kii_(std::move(interior_block)), kib_(std::move(boundary_block)),
      options_(options) {
  const Matrix transposed = kii_.transpose();
  const Matrix skew = kii_ - transposed;
  double scale = 0.0;
  double asym = 0.0;
  for (Eigen::Index k = 0; k < kii_.nonZeros(); ++k) scale = std::max(scale, std::abs(kii_.valuePtr()[k]));
  for (Eigen::Index k = 0; k < skew.nonZeros(); ++k) asym = std::max(asym, std::abs(skew.valuePtr()[k]));
  symmetric_ = asym <= 1e-14 * scale;
}

Eigen::VectorXd AssembledOperator::apply_interior(const Field& u) const {
  if (!u.mask().same_as(*mask_)) throw PreconditionError("operator applied to a field on another mask");
  return kii_ * u.interior_values() + kib_ * u.boundary_values();
}

Field AssembledOperator::apply(const Field& u) const {
  Field out = u;
  out.set_interior(apply_interior(u));
  return out;
}

AssembledOperator::Matrix AssembledOperator::full_matrix() const {
  const Eigen::Index ni = kii_.rows();
  const Eigen::Index nb = kib_.cols();
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(static_cast<std::size_t>(kii_.nonZeros() + kib_.nonZeros() + nb));
  for (Eigen::Index r = 0; r < ni; ++r) {
    for (Matrix::InnerIterator it(kii_, r); it; ++it) t.emplace_back(r, it.col(), it.value());
    for (Matrix::InnerIterator it(kib_, r); it; ++it) t.emplace_back(r, ni + it.col(), it.value());
  }
  for (Eigen::Index r = 0; r < nb; ++r) t.emplace_back(ni + r, ni + r, 1.0);
  Matrix full(ni + nb, ni + nb);
  full.setFromTriplets(t.begin(), t.end());
  return full;
}

EllipticityReport check_ellipticity(const CoefficientSet& coeffs, const DomainMask& mask) {
  EllipticityReport report;
  const Grid& grid = mask.grid();
  report.min_eigenvalue = std::numeric_limits<double>::infinity();
  auto visit = [&](std::size_t flat) {
    const Point x = grid.point(flat);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(symmetric_part(coeffs, x), Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    report.per_point.push_back(lo);
    if (lo < report.min_eigenvalue) {
      report.min_eigenvalue = lo;
      report.worst_point = x;
    }
    if (hi > 0) report.min_condition_ratio = std::min(report.min_condition_ratio, lo / hi);
  };
  for (std::size_t i : mask.interior()) visit(i);
  for (std::size_t i : mask.boundary()) visit(i);
  report.pass = report.min_eigenvalue > 0.0 && std::isfinite(report.min_eigenvalue);
  report.conditioning_warning = report.pass && report.min_condition_ratio < kConditioningWarning;
  std::ostringstream msg;
  if (!report.pass) {
    msg << "ellipticity fails: smallest eigenvalue " << report.min_eigenvalue << " at "
        << where(*report.worst_point, grid.dim());
  } else if (report.conditioning_warning) {
    msg << "elliptic but badly conditioned: eigenvalue ratio " << report.min_condition_ratio;
  }
  report.message = msg.str();
  return report;
}

MMatrixReport check_m_matrix(const AssembledOperator& op) {
  MMatrixReport report;
  const auto& kii = op.interior_block();
  const auto& kib = op.boundary_block();
  const Grid& grid = op.mask().grid();
  const auto interior = op.mask().interior();
  const Eigen::Index n = kii.rows();
  std::vector<char> strict(static_cast<std::size_t>(n), 0);

  auto flag = [&](Eigen::Index row, bool& which) {
    if (which) {
      which = false;
      if (!report.first_violation) report.first_violation = grid.point(interior[static_cast<std::size_t>(row)]);
    }
  };

  for (Eigen::Index r = 0; r < n; ++r) {
    // Work with -A so that the diagonal is positive.
    double diag = 0.0;
    double off_interior = 0.0;
    double off_boundary = 0.0;
    double scale = 0.0;
    for (AssembledOperator::Matrix::InnerIterator it(kii, r); it; ++it) {
      const double v = -it.value();
      scale = std::max(scale, std::abs(v));
      if (it.col() == r) {
        diag = v;
      } else {
        off_interior += std::abs(v);
      }
    }
    for (AssembledOperator::Matrix::InnerIterator it(kib, r); it; ++it) {
      off_boundary += std::abs(it.value());
      scale = std::max(scale, std::abs(it.value()));
    }
    const double tol = 1e-12 * scale;
    for (AssembledOperator::Matrix::InnerIterator it(kii, r); it; ++it)
      if (it.col() != r && -it.value() > tol) flag(r, report.nonpositive_offdiagonal);
    for (AssembledOperator::Matrix::InnerIterator it(kib, r); it; ++it)
      if (-it.value() > tol) flag(r, report.nonpositive_offdiagonal);
    if (!(diag > 0)) flag(r, report.positive_diagonal);
    if (diag + tol < off_interior + off_boundary) flag(r, report.diagonally_dominant);
    strict[static_cast<std::size_t>(r)] = diag > off_interior + tol;
  }

  // Every row must reach a strictly dominant row through the graph of K_II.
  {
    const AssembledOperator::Matrix transposed = kii.transpose();
    std::vector<char> ok(strict);
    std::deque<Eigen::Index> queue;
    for (Eigen::Index r = 0; r < n; ++r)
      if (ok[static_cast<std::size_t>(r)]) queue.push_back(r);
    while (!queue.empty()) {
      const Eigen::Index r = queue.front();
      queue.pop_front();
      // Rows i with K_II(i, r) != 0 can step to r.
      for (AssembledOperator::Matrix::InnerIterator it(transposed, r); it; ++it) {
        const auto i = static_cast<std::size_t>(it.col());
        if (!ok[i] && it.value() != 0.0) {
          ok[i] = 1;
          queue.push_back(it.col());
        }
      }
    }
    for (Eigen::Index r = 0; r < n; ++r)
      if (!ok[static_cast<std::size_t>(r)]) flag(r, report.chained_dominance);
  }

  report.pass = report.positive_diagonal && report.nonpositive_offdiagonal && report.diagonally_dominant &&
                report.chained_dominance;
  if (!report.pass) {
    std::ostringstream msg;
    msg << "M-matrix check fails";
    if (!report.nonpositive_offdiagonal) msg << "; positive off-diagonal entry in -A";
    if (!report.positive_diagonal) msg << "; nonpositive diagonal";
    if (!report.diagonally_dominant) msg << "; row not diagonally dominant";
    if (!report.chained_dominance) msg << "; rows without a path to a dominant row";
    if (report.first_violation) msg << " (first at " << where(*report.first_violation, grid.dim()) << ")";
    report.message = msg.str();
    if (!report.nonpositive_offdiagonal) {
      if (op.options().drift == DriftScheme::centered)
        report.suggestion = "use upwind drift differencing or refine the grid";
      else
        report.suggestion = "cross-derivative coefficients exceed diagonal dominance of a";
    }
  }
  return report;
}

AssembledOperator assemble(MaskPtr mask, const CoefficientSet& coeffs, SchemeOptions options) {
  const Grid& grid = mask->grid();
  const std::size_t dim = grid.dim();
  if (coeffs.dim != dim || coeffs.a.size() != dim * dim || (!coeffs.b.empty() && coeffs.b.size() != dim))
    throw PreconditionError("coefficient set does not match the grid dimension");

  const EllipticityReport ell = check_ellipticity(coeffs, *mask);
  if (!ell.pass) throw PreconditionError(ell.message);

  const auto interior = mask->interior();
  std::vector<Eigen::Triplet<double>> tii;
  std::vector<Eigen::Triplet<double>> tib;
  tii.reserve(interior.size() * (2 * dim + 1 + 4 * dim));
  tib.reserve(mask->boundary().size() * 4);

  std::map<std::size_t, double> row;
  for (std::size_t r = 0; r < interior.size(); ++r) {
    const std::size_t flat = interior[r];
    const Point x = grid.point(flat);
    row.clear();
    auto add = [&](const MultiIndex& off, double v) {
      row[*grid.neighbor(flat, off)] += v;
    };
    auto axis = [](std::size_t k, std::ptrdiff_t s) {
      MultiIndex off{0, 0, 0};
      off[k] = s;
      return off;
    };

    const double c = coeffs.reaction(x);
    if (c > 0) throw PreconditionError("zero-order coefficient must be nonpositive at " + where(x, dim));
    add({0, 0, 0}, c);

    for (std::size_t i = 0; i < dim; ++i) {
      const double hi = grid.spacing(i);
      const double aii = coeffs.a_sym(i, i, x) / (hi * hi);
      add(axis(i, 1), aii);
      add(axis(i, -1), aii);
      add({0, 0, 0}, -2.0 * aii);

      const double b = coeffs.drift(i, x);
      if (b != 0.0) {
        if (options.drift == DriftScheme::centered) {
          add(axis(i, 1), b / (2.0 * hi));
          add(axis(i, -1), -b / (2.0 * hi));
        } else if (b > 0) {
          add(axis(i, 1), b / hi);
          add({0, 0, 0}, -b / hi);
        } else {
          add(axis(i, -1), -b / hi);
          add({0, 0, 0}, b / hi);
        }
      }

      for (std::size_t j = i + 1; j < dim; ++j) {
        const double aij = coeffs.a_sym(i, j, x);
        if (aij == 0.0) continue;
        const double hj = grid.spacing(j);
        // sum over (i,j) and (j,i) gives 2 a_ij d_i d_j.
        auto corner = [&](std::ptrdiff_t si, std::ptrdiff_t sj) {
          MultiIndex off{0, 0, 0};
          off[i] = si;
          off[j] = sj;
          return off;
        };
        if (options.cross == CrossScheme::centered) {
          const double w = 2.0 * aij / (4.0 * hi * hj);
          add(corner(1, 1), w);
          add(corner(-1, -1), w);
          add(corner(1, -1), -w);
          add(corner(-1, 1), -w);
        } else {
          const double k = std::abs(aij) / (hi * hj);
          const std::ptrdiff_t s = aij > 0 ? 1 : -1;
          add(corner(1, s), k);
          add(corner(-1, -s), k);
          add(axis(i, 1), -k);
          add(axis(i, -1), -k);
          add(axis(j, 1), -k);
          add(axis(j, -1), -k);
          add({0, 0, 0}, 2.0 * k);
        }
      }
    }

    for (const auto& [col, v] : row) {
      if (v == 0.0 && col != flat) continue;
      if (mask->is_interior(col)) {
        tii.emplace_back(static_cast<Eigen::Index>(r), mask->interior_slot(col), v);
      } else {
        tib.emplace_back(static_cast<Eigen::Index>(r), mask->boundary_slot(col), v);
      }
    }
  }

  AssembledOperator::Matrix kii(static_cast<Eigen::Index>(interior.size()),
                                static_cast<Eigen::Index>(interior.size()));
  AssembledOperator::Matrix kib(static_cast<Eigen::Index>(interior.size()),
                                static_cast<Eigen::Index>(mask->boundary().size()));
  kii.setFromTriplets(tii.begin(), tii.end());
  kib.setFromTriplets(tib.begin(), tib.end());
  AssembledOperator op(std::move(mask), std::move(kii), std::move(kib), options);
  if (options.require_m_matrix) {
    const MMatrixReport m = check_m_matrix(op);
    if (!m.pass) throw PreconditionError(m.message + (m.suggestion.empty() ? "" : "; " + m.suggestion));
  }
  return op;
}

}  // namespace sublin
