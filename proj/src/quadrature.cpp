#include "sublin/quadrature.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/legendre.hpp>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "sublin/error.hpp"

namespace sublin {

GaussRule::GaussRule(std::size_t n) {
  if (n == 0) throw PreconditionError("Gauss rule needs at least one node");
  const int order = static_cast<int>(n);
  // Boost returns the nonnegative zeros in increasing order.
  const std::vector<double> half = boost::math::legendre_p_zeros<double>(order);
  auto weight = [order](double x) {
    const double dp = boost::math::legendre_p_prime(order, x);
    return 2.0 / ((1.0 - x * x) * dp * dp);
  };
  for (auto it = half.rbegin(); it != half.rend(); ++it) {
    if (*it == 0.0) continue;
    nodes.push_back(-*it);
    weights.push_back(weight(*it));
  }
  for (double x : half) {
    nodes.push_back(x);
    weights.push_back(weight(x));
  }
}

double GaussRule::integrate(const std::function<double(double)>& f, double a, double b) const {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
  return half * sum;
}

const GaussRule& gauss_rule(std::size_t n) {
  static std::mutex lock;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> guard(lock);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(n);
  return *slot;
}

namespace {

double raw_bump(double s) {
  if (!(std::abs(s) < 1.0)) return 0.0;
  return std::exp(-1.0 / (1.0 - s * s));
}

}  // namespace

Mollifier::Mollifier() {
  boost::math::quadrature::tanh_sinh<double> integrator;
  norm_ = integrator.integrate(raw_bump, -1.0, 1.0);
  abs_derivative_integral_ = 2.0 * (*this)(0.0);
}

double Mollifier::operator()(double s) const { return raw_bump(s) / norm_; }

double Mollifier::derivative(double s) const {
  if (!(std::abs(s) < 1.0)) return 0.0;
  const double q = 1.0 - s * s;
  return -2.0 * s / (q * q) * raw_bump(s) / norm_;
}

const Mollifier& standard_mollifier() {
  static const Mollifier instance;
  return instance;
}

}  // namespace sublin
