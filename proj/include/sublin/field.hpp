#pragma once

#include <Eigen/Core>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sublin/geometry.hpp"

namespace sublin {

/// Grid-aligned scalar function on a domain mask. Interior and boundary points
/// carry finite values; exterior points hold NaN.
class Field {
 public:
  static constexpr double kExterior = std::numeric_limits<double>::quiet_NaN();

  explicit Field(MaskPtr mask, double fill = 0.0);
  static Field from_function(MaskPtr mask, const std::function<double(const Point&)>& fn);

  const DomainMask& mask() const { return *mask_; }
  const MaskPtr& mask_ptr() const { return mask_; }
  const Grid& grid() const { return mask_->grid(); }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  Eigen::VectorXd interior_values() const;
  Eigen::VectorXd boundary_values() const;
  void set_interior(const Eigen::VectorXd& v);
  void set_boundary(const Eigen::VectorXd& v);

  double interior_max() const;
  double interior_min() const;
  double boundary_max() const;
  double boundary_min() const;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s);

 private:
  void require_same_mask(const Field& other) const;

  MaskPtr mask_;
  std::vector<double> values_;
};

Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(double s, Field a);

/// Values of `source` at the active points of `target` (same grid required).
Field restrict_to(const Field& source, MaskPtr target);

/// max over active points of target of |a - b| after restriction, or of (a - b)
/// when `signed_difference` is set.
double max_difference(const Field& a, const Field& b, std::span<const std::size_t> points,
                      bool signed_difference = false);

}  // namespace sublin
