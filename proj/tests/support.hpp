#pragma once

// Shared builders for the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "sublin/elliptic_operator.hpp"
#include "sublin/geometry.hpp"
#include "sublin/nonlinearity.hpp"

namespace sublin::fixtures {

inline MaskPtr box_mask(std::size_t dim, std::size_t n, double lo = 0.0, double hi = 1.0) {
  auto grid = build_grid(dim, {n}, {Interval{lo, hi}});
  return mask_from_predicate(grid, [](const Point&) { return true; });
}

inline MaskPtr ball_mask(std::size_t dim, std::size_t n, double radius) {
  auto grid = build_grid(dim, {n}, {Interval{-1.0, 1.0}});
  return mask_from_predicate(grid, [&](const Point& x) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < dim; ++k) r2 += x[k] * x[k];
    return r2 < radius * radius;
  });
}

/// Smooth variable coefficients with a diagonally dominant diffusion matrix,
/// small drift and c <= 0, so the directional/upwind scheme is an M-matrix.
inline CoefficientSet random_coefficients(std::size_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CoefficientSet c;
  c.dim = dim;
  std::vector<double> diag(dim), freq(dim), off(dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    diag[i] = 1.0 + u(rng);
    freq[i] = 1.0 + 2.0 * u(rng);
  }
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) off[i * dim + j] = off[j * dim + i] = 0.3 * (2.0 * u(rng) - 1.0);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      if (i == j) {
        const double d = diag[i], w = freq[i];
        c.a.push_back([d, w, i](const Point& x) { return d + 0.25 * std::sin(w * x[i]); });
      } else {
        const double o = off[i * dim + j];
        c.a.push_back([o](const Point&) { return o; });
      }
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    const double b = 2.0 * u(rng) - 1.0;
    c.b.push_back([b](const Point& x) { return b * std::cos(x[0]); });
  }
  const double c0 = u(rng);
  c.c = [c0](const Point& x) { return -c0 * (1.0 + x[0] * x[0]); };
  return c;
}

/// Positive boundary data from a random smooth profile.
inline std::function<double(const Point&)> random_boundary(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = 0.5 + u(rng), b = 2.0 * u(rng) - 1.0, w = 1.0 + 3.0 * u(rng);
  return [=](const Point& x) { return scale * (a + 0.4 * std::sin(w * x[0] + b) * std::cos(x[1] - b * x[2])); };
}

inline Density random_density(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double a = 0.5 + 2.0 * u(rng), w = 1.0 + 2.0 * u(rng);
  return density_from_function([a, w](const Point& x) { return a * (1.0 + 0.5 * std::sin(w * (x[0] + x[1]))); });
}

}  // namespace sublin::fixtures
