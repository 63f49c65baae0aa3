#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace sublin {

/// n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussRule(std::size_t n);
  std::size_t size() const { return nodes.size(); }
  double integrate(const std::function<double(double)>& f, double a, double b) const;
};

/// Shared rules, built once per order.
const GaussRule& gauss_rule(std::size_t n);

/// Standard bump eta(s) = exp(-1/(1-s^2)) / Z on (-1, 1), normalized to unit mass.
class Mollifier {
 public:
  Mollifier();

  double operator()(double s) const;
  double derivative(double s) const;
  double normalization() const { return norm_; }
  /// Integral of |eta'| over (-1, 1); equals 2 eta(0) since eta is even and unimodal.
  double abs_derivative_integral() const { return abs_derivative_integral_; }
  /// 4 * integral |eta'|.
  double c1() const { return 4.0 * abs_derivative_integral_; }

 private:
  double norm_ = 1.0;
  double abs_derivative_integral_ = 0.0;
};

const Mollifier& standard_mollifier();

}  // namespace sublin
