#include "sublin/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "sublin/error.hpp"

namespace sublin {

namespace {

std::string describe(const Point& x, std::size_t dim) {
  std::ostringstream out;
  out << '(';
  for (std::size_t k = 0; k < dim; ++k) out << (k ? ", " : "") << x[k];
  out << ')';
  return out.str();
}

}  // namespace

Grid::Grid(std::vector<std::size_t> shape, std::vector<Interval> bounds)
    : shape_(std::move(shape)), bounds_(std::move(bounds)) {
  if (shape_.empty() || shape_.size() > kMaxDim)
    throw PreconditionError("grid dimension must be 1, 2 or 3");
  if (bounds_.size() != shape_.size())
    throw PreconditionError("grid needs one interval per axis");
  spacing_.resize(dim());
  stride_.assign(dim(), 1);
  for (std::size_t k = 0; k < dim(); ++k) {
    if (shape_[k] < 3) throw PreconditionError("grid shape must be at least 3 on every axis");
    const auto [lo, hi] = bounds_[k];
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
      throw PreconditionError("grid bounds must be finite with lower < upper");
    spacing_[k] = (hi - lo) / static_cast<double>(shape_[k] - 1);
  }
  for (std::size_t k = dim() - 1; k > 0; --k) stride_[k - 1] = stride_[k] * shape_[k];
  size_ = stride_[0] * shape_[0];
}

double Grid::min_spacing() const { return *std::min_element(spacing_.begin(), spacing_.end()); }

double Grid::cell_volume() const {
  double v = 1.0;
  for (double h : spacing_) v *= h;
  return v;
}

std::size_t Grid::flat(const MultiIndex& index) const {
  std::size_t f = 0;
  for (std::size_t k = 0; k < dim(); ++k) f += static_cast<std::size_t>(index[k]) * stride_[k];
  return f;
}

MultiIndex Grid::unflat(std::size_t flat) const {
  MultiIndex index{0, 0, 0};
  for (std::size_t k = 0; k < dim(); ++k) {
    index[k] = static_cast<std::ptrdiff_t>(flat / stride_[k]);
    flat %= stride_[k];
  }
  return index;
}

double Grid::coordinate(std::size_t axis, std::ptrdiff_t i) const {
  if (i == static_cast<std::ptrdiff_t>(shape_[axis]) - 1) return bounds_[axis].upper;
  return bounds_[axis].lower + static_cast<double>(i) * spacing_[axis];
}

Point Grid::point(std::size_t flat) const {
  const MultiIndex index = unflat(flat);
  Point x{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < dim(); ++k) x[k] = coordinate(k, index[k]);
  return x;
}

std::optional<std::size_t> Grid::neighbor(std::size_t flat, const MultiIndex& offset) const {
  MultiIndex index = unflat(flat);
  for (std::size_t k = 0; k < dim(); ++k) {
    index[k] += offset[k];
    if (index[k] < 0 || index[k] >= static_cast<std::ptrdiff_t>(shape_[k])) return std::nullopt;
  }
  return this->flat(index);
}

bool Grid::on_edge(std::size_t flat) const {
  const MultiIndex index = unflat(flat);
  for (std::size_t k = 0; k < dim(); ++k)
    if (index[k] == 0 || index[k] == static_cast<std::ptrdiff_t>(shape_[k]) - 1) return true;
  return false;
}

std::optional<std::size_t> Grid::locate(const Point& x, double tol) const {
  MultiIndex index{0, 0, 0};
  for (std::size_t k = 0; k < dim(); ++k) {
    const double s = (x[k] - bounds_[k].lower) / spacing_[k];
    const double r = std::round(s);
    if (std::abs(s - r) > tol || r < 0 || r > static_cast<double>(shape_[k] - 1)) return std::nullopt;
    index[k] = static_cast<std::ptrdiff_t>(r);
  }
  return flat(index);
}

bool Grid::operator==(const Grid& other) const {
  return shape_ == other.shape_ && bounds_ == other.bounds_;
}

std::shared_ptr<const Grid> build_grid(std::size_t dim, std::vector<std::size_t> shape,
                                       std::vector<Interval> bounds) {
  if (dim < 1 || dim > kMaxDim) throw PreconditionError("grid dimension must be 1, 2 or 3");
  if (shape.size() == 1) shape.assign(dim, shape.front());
  if (bounds.size() == 1) bounds.assign(dim, bounds.front());
  if (shape.size() != dim || bounds.size() != dim)
    throw PreconditionError("shape and bounds must have one entry per axis");
  return std::make_shared<const Grid>(std::move(shape), std::move(bounds));
}

std::vector<MultiIndex> neighborhood_offsets(std::size_t dim) {
  std::vector<MultiIndex> offsets;
  const std::ptrdiff_t r1 = 1;
  const std::ptrdiff_t r2 = dim >= 2 ? 1 : 0;
  const std::ptrdiff_t r3 = dim >= 3 ? 1 : 0;
  for (std::ptrdiff_t a = -r1; a <= r1; ++a)
    for (std::ptrdiff_t b = -r2; b <= r2; ++b)
      for (std::ptrdiff_t c = -r3; c <= r3; ++c)
        if (a != 0 || b != 0 || c != 0) offsets.push_back({a, b, c});
  return offsets;
}

DomainMask::DomainMask(std::shared_ptr<const Grid> grid, std::vector<PointClass> classes)
    : grid_(std::move(grid)), classes_(std::move(classes)) {
  if (!grid_) throw PreconditionError("mask needs a grid");
  if (classes_.size() != grid_->size())
    throw PreconditionError("mask needs one class per grid point");
  slot_.assign(classes_.size(), -1);
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (classes_[i] == PointClass::interior) {
      slot_[i] = static_cast<std::ptrdiff_t>(interior_.size());
      interior_.push_back(i);
    } else if (classes_[i] == PointClass::boundary) {
      slot_[i] = static_cast<std::ptrdiff_t>(boundary_.size());
      boundary_.push_back(i);
    }
  }
  if (interior_.empty()) throw PreconditionError("domain mask has an empty interior");

  const auto offsets = neighborhood_offsets(grid_->dim());
  std::vector<char> touched(classes_.size(), 0);
  for (std::size_t i : interior_) {
    for (const auto& off : offsets) {
      const auto j = grid_->neighbor(i, off);
      if (!j || classes_[*j] == PointClass::exterior)
        throw PreconditionError("interior point " + describe(grid_->point(i), grid_->dim()) +
                                " has a neighbor outside the closed domain");
      touched[*j] = 1;
    }
  }
  for (std::size_t b : boundary_)
    if (!touched[b])
      throw PreconditionError("boundary point " + describe(grid_->point(b), grid_->dim()) +
                              " is not adjacent to the interior");

  // Axis-neighbor connectivity of the interior.
  std::vector<char> seen(classes_.size(), 0);
  std::deque<std::size_t> queue{interior_.front()};
  seen[interior_.front()] = 1;
  std::size_t reached = 0;
  while (!queue.empty()) {
    const std::size_t i = queue.front();
    queue.pop_front();
    ++reached;
    for (std::size_t k = 0; k < grid_->dim(); ++k)
      for (std::ptrdiff_t s : {-1, 1}) {
        MultiIndex off{0, 0, 0};
        off[k] = s;
        const auto j = grid_->neighbor(i, off);
        if (j && !seen[*j] && classes_[*j] == PointClass::interior) {
          seen[*j] = 1;
          queue.push_back(*j);
        }
      }
  }
  if (reached != interior_.size()) throw PreconditionError("domain interior is not lattice-connected");
}

bool DomainMask::same_as(const DomainMask& other) const {
  return this == &other || (*grid_ == *other.grid_ && classes_ == other.classes_);
}

MaskPtr mask_from_indicator(std::shared_ptr<const Grid> grid,
                            const std::function<bool(std::size_t)>& inside) {
  std::vector<PointClass> classes(grid->size(), PointClass::exterior);
  for (std::size_t i = 0; i < grid->size(); ++i)
    if (!grid->on_edge(i) && inside(i)) classes[i] = PointClass::interior;
  const auto offsets = neighborhood_offsets(grid->dim());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    if (classes[i] != PointClass::interior) continue;
    for (const auto& off : offsets) {
      const std::size_t j = *grid->neighbor(i, off);
      if (classes[j] == PointClass::exterior) classes[j] = PointClass::boundary;
    }
  }
  return std::make_shared<const DomainMask>(std::move(grid), std::move(classes));
}

MaskPtr mask_from_predicate(std::shared_ptr<const Grid> grid,
                            const std::function<bool(const Point&)>& inside) {
  const Grid& g = *grid;
  return mask_from_indicator(std::move(grid), [&](std::size_t i) { return inside(g.point(i)); });
}

ExhaustionSequence::ExhaustionSequence(MaskPtr omega, std::vector<MaskPtr> levels)
    : omega_(std::move(omega)), levels_(std::move(levels)) {
  if (!omega_) throw PreconditionError("exhaustion needs omega");
  if (levels_.empty()) throw PreconditionError("exhaustion needs at least one level");
  const Grid& grid = omega_->grid();
  for (const auto& level : levels_) {
    if (!level || !(level->grid() == grid))
      throw PreconditionError("exhaustion levels must live on the grid of omega");
    for (std::size_t i : level->interior())
      if (!omega_->is_interior(i)) throw PreconditionError("exhaustion level leaves omega");
  }
  for (std::size_t n = 0; n + 1 < levels_.size(); ++n) {
    const DomainMask& inner = *levels_[n];
    const DomainMask& outer = *levels_[n + 1];
    for (std::size_t i = 0; i < grid.size(); ++i)
      if (inner.is_active(i) && !outer.is_interior(i))
        throw PreconditionError("exhaustion level " + std::to_string(n + 1) +
                                " is not compactly contained in the next level");
    if (inner.interior().size() >= outer.interior().size())
      throw PreconditionError("exhaustion levels are not strictly increasing");
  }
  const DomainMask& last = *levels_.back();
  if (!std::equal(last.interior().begin(), last.interior().end(), omega_->interior().begin(),
                  omega_->interior().end()))
    throw PreconditionError("last exhaustion level must have the interior of omega");
}

ExhaustionSequence build_exhaustion(MaskPtr omega, std::size_t n_levels) {
  if (n_levels < 2) throw PreconditionError("an exhaustion needs at least two levels");
  const auto grid = omega->grid_ptr();
  const std::size_t dim = grid->dim();

  // Distance from every interior point to the boundary ring.
  std::vector<Point> ring;
  for (std::size_t b : omega->boundary()) ring.push_back(grid->point(b));
  std::vector<double> depth(grid->size(), 0.0);
  double max_depth = 0.0;
  for (std::size_t i : omega->interior()) {
    const Point x = grid->point(i);
    double best = std::numeric_limits<double>::infinity();
    for (const Point& y : ring) {
      double d2 = 0.0;
      for (std::size_t k = 0; k < dim; ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
      best = std::min(best, d2);
    }
    depth[i] = std::sqrt(best);
    max_depth = std::max(max_depth, depth[i]);
  }

  const double h = grid->min_spacing();
  const double slack = 1e-9 * std::max(max_depth, h);
  std::vector<MaskPtr> levels;
  for (std::size_t k = 1; k <= n_levels; ++k) {
    const double threshold =
        h + max_depth * static_cast<double>(n_levels - k) / static_cast<double>(n_levels);
    if (k == n_levels) {
      levels.push_back(omega);
      break;
    }
    std::size_t count = 0;
    for (std::size_t i : omega->interior()) count += depth[i] >= threshold - slack;
    if (count == 0)
      throw PreconditionError("cannot nest " + std::to_string(n_levels) +
                              " exhaustion levels in this domain");
    try {
      levels.push_back(mask_from_indicator(grid, [&](std::size_t i) {
        return omega->is_interior(i) && depth[i] >= threshold - slack;
      }));
    } catch (const PreconditionError& e) {
      throw PreconditionError(std::string("cannot nest exhaustion levels: ") + e.what());
    }
  }
  try {
    return ExhaustionSequence(std::move(omega), std::move(levels));
  } catch (const PreconditionError& e) {
    throw PreconditionError(std::string("cannot nest exhaustion levels: ") + e.what());
  }
}

TruncationFamily cube_truncations(std::size_t dim, std::vector<double> radii, double spacing) {
  if (radii.empty()) throw PreconditionError("truncation family needs radii");
  if (!(spacing > 0)) throw PreconditionError("truncation spacing must be positive");
  if (!std::is_sorted(radii.begin(), radii.end()) ||
      std::adjacent_find(radii.begin(), radii.end()) != radii.end())
    throw PreconditionError("truncation radii must be strictly increasing");
  const double r_max = radii.back();
  const double cells = 2.0 * r_max / spacing;
  if (std::abs(cells - std::round(cells)) > 1e-9 * cells)
    throw PreconditionError("largest truncation radius must be a multiple of half the spacing");
  const auto n = static_cast<std::size_t>(std::llround(cells)) + 1;
  TruncationFamily family;
  family.grid = build_grid(dim, {n}, {Interval{-r_max, r_max}});
  family.radii = radii;
  for (double radius : radii) {
    const double cut = radius - 1e-9 * spacing;
    family.masks.push_back(mask_from_predicate(family.grid, [&](const Point& x) {
      for (std::size_t k = 0; k < dim; ++k)
        if (std::abs(x[k]) >= cut) return false;
      return true;
    }));
  }
  return family;
}

ExhaustionSequence exhaustion_from_truncations(const TruncationFamily& family) {
  return ExhaustionSequence(family.masks.back(), family.masks);
}

}  // namespace sublin
