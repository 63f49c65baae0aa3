#pragma once

// Lattice grids, domain masks and nested exhaustion sequences.
//
// A Grid is a tensor-product lattice in up to three dimensions. Points are
// addressed by a flat index in row-major order (last axis fastest). A
// DomainMask labels every grid point as interior, boundary or exterior; the
// boundary ring is the set of non-interior points within one lattice step
// (including diagonal steps) of an interior point, so every stencil that
// reaches the corners of a cell stays inside the closed domain.

#include <array>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace sublin {

inline constexpr std::size_t kMaxDim = 3;

/// Coordinates of a grid point; unused trailing axes are zero.
using Point = std::array<double, kMaxDim>;
/// Integer lattice position or offset; unused trailing axes are zero.
using MultiIndex = std::array<std::ptrdiff_t, kMaxDim>;

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
  bool operator==(const Interval&) const = default;
};

class Grid {
 public:
  Grid(std::vector<std::size_t> shape, std::vector<Interval> bounds);

  std::size_t dim() const { return shape_.size(); }
  std::span<const std::size_t> shape() const { return shape_; }
  std::span<const Interval> bounds() const { return bounds_; }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  double min_spacing() const;
  /// Product of the spacings, the quadrature weight of one lattice cell.
  double cell_volume() const;
  std::size_t size() const { return size_; }

  std::size_t flat(const MultiIndex& index) const;
  MultiIndex unflat(std::size_t flat) const;
  double coordinate(std::size_t axis, std::ptrdiff_t i) const;
  Point point(std::size_t flat) const;

  /// Flat index of `flat + offset`, or nullopt when it leaves the lattice.
  std::optional<std::size_t> neighbor(std::size_t flat, const MultiIndex& offset) const;
  /// True when some axis index is 0 or shape-1.
  bool on_edge(std::size_t flat) const;
  /// Flat index of the lattice point within `tol` (relative to spacing) of x.
  std::optional<std::size_t> locate(const Point& x, double tol = 1e-9) const;

  bool operator==(const Grid& other) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<Interval> bounds_;
  std::vector<double> spacing_;
  std::vector<std::size_t> stride_;
  std::size_t size_ = 0;
};

/// Builds a grid. A single-entry shape or bounds list is broadcast to every
/// axis. Throws PreconditionError when dim is not 1..3, an axis has fewer than
/// three points, or an interval is degenerate.
std::shared_ptr<const Grid> build_grid(std::size_t dim, std::vector<std::size_t> shape,
                                       std::vector<Interval> bounds);

enum class PointClass : char { exterior = '.', boundary = 'B', interior = 'I' };

class DomainMask {
 public:
  /// Validates the closed-domain invariants; throws PreconditionError.
  DomainMask(std::shared_ptr<const Grid> grid, std::vector<PointClass> classes);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }

  PointClass at(std::size_t flat) const { return classes_[flat]; }
  bool is_interior(std::size_t flat) const { return classes_[flat] == PointClass::interior; }
  bool is_boundary(std::size_t flat) const { return classes_[flat] == PointClass::boundary; }
  bool is_active(std::size_t flat) const { return classes_[flat] != PointClass::exterior; }

  /// Sorted flat indices.
  std::span<const std::size_t> interior() const { return interior_; }
  std::span<const std::size_t> boundary() const { return boundary_; }
  std::span<const PointClass> classes() const { return classes_; }

  /// Position of a flat index inside interior() / boundary(), or -1.
  std::ptrdiff_t interior_slot(std::size_t flat) const {
    return is_interior(flat) ? slot_[flat] : -1;
  }
  std::ptrdiff_t boundary_slot(std::size_t flat) const {
    return is_boundary(flat) ? slot_[flat] : -1;
  }

  bool same_as(const DomainMask& other) const;

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<PointClass> classes_;
  std::vector<std::size_t> interior_;
  std::vector<std::size_t> boundary_;
  std::vector<std::ptrdiff_t> slot_;
};

using MaskPtr = std::shared_ptr<const DomainMask>;

/// Interior = lattice points off the grid edge where `inside` holds; boundary
/// = the surrounding ring. Throws on empty or lattice-disconnected interior.
MaskPtr mask_from_predicate(std::shared_ptr<const Grid> grid,
                            const std::function<bool(const Point&)>& inside);
MaskPtr mask_from_indicator(std::shared_ptr<const Grid> grid,
                            const std::function<bool(std::size_t)>& inside);

/// Offsets of the full 3^d neighborhood without the origin.
std::vector<MultiIndex> neighborhood_offsets(std::size_t dim);

class ExhaustionSequence {
 public:
  /// Validates nesting: the closure of each level lies in the interior of the
  /// next one, and the last level has the interior of omega.
  ExhaustionSequence(MaskPtr omega, std::vector<MaskPtr> levels);

  const DomainMask& omega() const { return *omega_; }
  const MaskPtr& omega_ptr() const { return omega_; }
  std::span<const MaskPtr> levels() const { return levels_; }
  std::size_t size() const { return levels_.size(); }
  const DomainMask& level(std::size_t n) const { return *levels_.at(n); }

 private:
  MaskPtr omega_;
  std::vector<MaskPtr> levels_;
};

/// Concentric levels obtained by thresholding the Euclidean distance to the
/// boundary ring of omega. Throws PreconditionError when the levels cannot be
/// strictly nested on the lattice.
ExhaustionSequence build_exhaustion(MaskPtr omega, std::size_t n_levels);

/// Cube truncations of R^d sharing one lattice: a grid on [-R_max, R_max]^d
/// with the given spacing and one mask {|x|_inf < R} per radius.
struct TruncationFamily {
  std::vector<double> radii;
  std::shared_ptr<const Grid> grid;
  std::vector<MaskPtr> masks;
};

TruncationFamily cube_truncations(std::size_t dim, std::vector<double> radii, double spacing);

/// The truncations themselves form an exhaustion of their union.
ExhaustionSequence exhaustion_from_truncations(const TruncationFamily& family);

}  // namespace sublin
