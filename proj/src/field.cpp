#include "sublin/field.hpp"

#include <algorithm>
#include <cmath>

#include "sublin/error.hpp"

namespace sublin {

Field::Field(MaskPtr mask, double fill) : mask_(std::move(mask)) {
  if (!mask_) throw PreconditionError("field needs a mask");
  values_.assign(mask_->grid().size(), kExterior);
  for (std::size_t i : mask_->interior()) values_[i] = fill;
  for (std::size_t i : mask_->boundary()) values_[i] = fill;
}

Field Field::from_function(MaskPtr mask, const std::function<double(const Point&)>& fn) {
  Field f(std::move(mask));
  const Grid& g = f.grid();
  for (std::size_t i : f.mask().interior()) f.values_[i] = fn(g.point(i));
  for (std::size_t i : f.mask().boundary()) f.values_[i] = fn(g.point(i));
  return f;
}

Eigen::VectorXd Field::interior_values() const {
  const auto idx = mask_->interior();
  Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) v[static_cast<Eigen::Index>(k)] = values_[idx[k]];
  return v;
}

Eigen::VectorXd Field::boundary_values() const {
  const auto idx = mask_->boundary();
  Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) v[static_cast<Eigen::Index>(k)] = values_[idx[k]];
  return v;
}

void Field::set_interior(const Eigen::VectorXd& v) {
  const auto idx = mask_->interior();
  if (static_cast<std::size_t>(v.size()) != idx.size())
    throw PreconditionError("interior vector has the wrong length");
  for (std::size_t k = 0; k < idx.size(); ++k) values_[idx[k]] = v[static_cast<Eigen::Index>(k)];
}

void Field::set_boundary(const Eigen::VectorXd& v) {
  const auto idx = mask_->boundary();
  if (static_cast<std::size_t>(v.size()) != idx.size())
    throw PreconditionError("boundary vector has the wrong length");
  for (std::size_t k = 0; k < idx.size(); ++k) values_[idx[k]] = v[static_cast<Eigen::Index>(k)];
}

namespace {

template <class Op>
double reduce(const std::vector<double>& values, std::span<const std::size_t> idx, double init, Op op) {
  double r = init;
  for (std::size_t i : idx) r = op(r, values[i]);
  return r;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double Field::interior_max() const {
  return reduce(values_, mask_->interior(), -kInf, [](double a, double b) { return std::max(a, b); });
}
double Field::interior_min() const {
  return reduce(values_, mask_->interior(), kInf, [](double a, double b) { return std::min(a, b); });
}
double Field::boundary_max() const {
  return reduce(values_, mask_->boundary(), -kInf, [](double a, double b) { return std::max(a, b); });
}
double Field::boundary_min() const {
  return reduce(values_, mask_->boundary(), kInf, [](double a, double b) { return std::min(a, b); });
}

void Field::require_same_mask(const Field& other) const {
  if (!mask_->same_as(*other.mask_)) throw PreconditionError("field arithmetic needs identical masks");
}

Field& Field::operator+=(const Field& other) {
  require_same_mask(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_mask(other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(double s, Field a) { return a *= s; }

Field restrict_to(const Field& source, MaskPtr target) {
  if (!(source.grid() == target->grid())) throw PreconditionError("restriction needs a common grid");
  Field out(target);
  for (std::size_t i = 0; i < out.grid().size(); ++i) {
    if (!target->is_active(i)) continue;
    if (!std::isfinite(source[i])) throw PreconditionError("restriction target leaves the source domain");
    out[i] = source[i];
  }
  return out;
}

double max_difference(const Field& a, const Field& b, std::span<const std::size_t> points,
                      bool signed_difference) {
  double worst = -kInf;
  for (std::size_t i : points) {
    const double d = a[i] - b[i];
    worst = std::max(worst, signed_difference ? d : std::abs(d));
  }
  return worst;
}

}  // namespace sublin
