#include "sublin/potential.hpp"

#include <algorithm>
#include <cmath>

#include "sublin/error.hpp"
#include "sublin/quadrature.hpp"

namespace sublin {

PotentialSolver::PotentialSolver(const AssembledOperator& op, const LinearSolverParams& params)
    : op_(&op), system_(op, params) {}

Field PotentialSolver::harmonic_extension(const Field& boundary_data) const {
  if (!boundary_data.mask().same_as(op_->mask()))
    throw PreconditionError("boundary data lives on another mask");
  const Eigen::VectorXd fb = boundary_data.boundary_values();
  if (!fb.allFinite()) throw PreconditionError("boundary data must be finite");
  Field out = boundary_data;
  out.set_interior(system_.solve(op_->boundary_block() * fb));
  return out;
}

Field PotentialSolver::green_apply(const Field& source) const {
  if (!source.mask().same_as(op_->mask())) throw PreconditionError("source lives on another mask");
  const Eigen::VectorXd g = source.interior_values();
  if (!g.allFinite()) throw PreconditionError("source must be finite on the interior");
  Field out(op_->mask_ptr(), 0.0);
  out.set_interior(system_.solve(g));
  return out;
}

Field PotentialSolver::kernel_column(std::size_t y_flat) const {
  const DomainMask& mask = op_->mask();
  if (y_flat >= mask.grid().size() || !mask.is_interior(y_flat))
    throw PreconditionError("kernel pole must be an interior point");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mask.interior().size()));
  g[mask.interior_slot(y_flat)] = 1.0 / mask.grid().cell_volume();
  Field out(op_->mask_ptr(), 0.0);
  out.set_interior(system_.solve(g));
  return out;
}

Field harmonic_extension(const AssembledOperator& op, const Field& boundary_data,
                         const LinearSolverParams& params) {
  return PotentialSolver(op, params).harmonic_extension(boundary_data);
}

Field green_apply(const AssembledOperator& op, const Field& source, const LinearSolverParams& params) {
  return PotentialSolver(op, params).green_apply(source);
}

Field green_kernel_column(const AssembledOperator& op, std::size_t y_flat, const LinearSolverParams& params) {
  return PotentialSolver(op, params).kernel_column(y_flat);
}

namespace {

// Integral of g(|w|) over the face {w_axis = a} of the half-width box,
// split at the face centre so each piece has its peak at a corner.
double face_integral(const std::vector<double>& half, std::size_t axis, const std::function<double(double)>& g) {
  const GaussRule& rule = gauss_rule(24);
  const double a = half[axis];
  std::vector<double> widths;
  for (std::size_t k = 0; k < half.size(); ++k)
    if (k != axis) widths.push_back(half[k]);
  if (widths.size() == 1) {
    const double b = widths[0];
    return 2.0 * rule.integrate([&](double u) { return g(std::sqrt(a * a + u * u)); }, 0.0, b);
  }
  const double b1 = widths[0];
  const double b2 = widths[1];
  return 4.0 * rule.integrate(
                   [&](double u) {
                     return rule.integrate([&](double v) { return g(std::sqrt(a * a + u * u + v * v)); }, 0.0, b2);
                   },
                   0.0, b1);
}

}  // namespace

double kato_cell_integral(const Grid& grid, double alpha) {
  const std::size_t d = grid.dim();
  if (d < 2) throw PreconditionError("the Kato estimator needs d >= 2");
  std::vector<double> half(d);
  for (std::size_t k = 0; k < d; ++k) half[k] = 0.5 * grid.spacing(k);
  // Pyramid decomposition: apex at the cell centre, base on each face.
  double total = 0.0;
  if (d == 2) {
    // int log|z| over a pyramid = a * int_F (log|w|/2 - 1/4).
    for (std::size_t axis = 0; axis < d; ++axis) {
      const double a = half[axis];
      total += 2.0 * a * face_integral(half, axis, [](double r) { return 0.5 * std::log(r) - 0.25; });
    }
    return grid.cell_volume() * std::log(alpha) - total;
  }
  const double m = static_cast<double>(d) - 2.0;
  for (std::size_t axis = 0; axis < d; ++axis) {
    const double a = half[axis];
    total += 2.0 * a / (static_cast<double>(d) - m) *
             face_integral(half, axis, [m](double r) { return std::pow(r, -m); });
  }
  return total;
}

double kato_norm_estimate(const Field& p, double alpha, const DomainMask& window) {
  const Grid& grid = p.grid();
  const std::size_t d = grid.dim();
  if (d < 2) throw PreconditionError("the Kato estimator needs d >= 2");
  if (!(grid == window.grid())) throw PreconditionError("density and window must share a grid");
  for (std::size_t k = 0; k < d; ++k)
    if (alpha < grid.spacing(k)) throw PreconditionError("alpha must be at least the mesh width");

  struct Offset {
    MultiIndex step;
    double weight;
  };
  std::vector<Offset> offsets;
  MultiIndex reach{0, 0, 0};
  for (std::size_t k = 0; k < d; ++k) reach[k] = static_cast<std::ptrdiff_t>(std::floor(alpha / grid.spacing(k)));
  const double volume = grid.cell_volume();
  const double self = kato_cell_integral(grid, alpha);
  MultiIndex s{0, 0, 0};
  for (s[0] = -reach[0]; s[0] <= reach[0]; ++s[0])
    for (s[1] = -reach[1]; s[1] <= reach[1]; ++s[1])
      for (s[2] = -reach[2]; s[2] <= reach[2]; ++s[2]) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double z = static_cast<double>(s[k]) * grid.spacing(k);
          r2 += z * z;
        }
        if (r2 == 0.0) {
          offsets.push_back({s, self});
          continue;
        }
        const double r = std::sqrt(r2);
        if (r > alpha) continue;
        const double kernel = d == 2 ? std::log(alpha / r) : std::pow(r, 2.0 - static_cast<double>(d));
        offsets.push_back({s, kernel * volume});
      }

  const DomainMask& support = p.mask();
  double best = 0.0;
  auto visit = [&](std::size_t x) {
    double sum = 0.0;
    for (const Offset& o : offsets) {
      const auto y = grid.neighbor(x, o.step);
      if (!y || !support.is_active(*y)) continue;
      sum += std::abs(p[*y]) * o.weight;
    }
    best = std::max(best, sum);
  };
  for (std::size_t x : window.interior()) visit(x);
  for (std::size_t x : window.boundary()) visit(x);
  return best;
}

PotentialProxyReport potential_property_proxy(const AssembledOperator& op, const CoefficientSet& coeffs,
                                              std::size_t y_flat, const std::vector<MaskPtr>& sub_domains,
                                              const LinearSolverParams& params) {
  PotentialProxyReport report;
  const Field column = green_kernel_column(op, y_flat, params);
  for (const MaskPtr& sub : sub_domains) {
    if (!(sub->grid() == op.mask().grid())) throw PreconditionError("sub-domain must share the grid");
    if (!sub->is_interior(y_flat)) throw PreconditionError("sub-domain must contain the pole");
    const AssembledOperator local = assemble(sub, coeffs, op.options());
    const Field extension = harmonic_extension(local, restrict_to(column, sub), params);
    PotentialProxyLevel level;
    level.interior_points = sub->interior().size();
    level.max_gap = max_difference(extension, column, sub->interior(), true);
    level.gap_at_pole = column[y_flat] - extension[y_flat];
    report.strictly_below = report.strictly_below && level.max_gap < 0.0;
    report.levels.push_back(level);
  }
  return report;
}

}  // namespace sublin
