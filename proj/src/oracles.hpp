#pragma once

// Slow, independent reference computations. Nothing here calls the FFT
// backend or the assignment solver.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <vector>

#include "mvlab/dynamics.hpp"
#include "mvlab/measure.hpp"

namespace mvlab::oracle {

/// Wavenumber of FFT index j on a grid with M points per axis and half width L.
inline double wavenumber(int j, int points, double half_width) {
  const int signed_j = j < points / 2 ? j : j - points;
  return M_PI * signed_j / half_width;
}

/// cos(xi . x + phase) for the Fourier mode with integer indices (j1, j2).
inline GridFunction fourier_mode(const SpatialGrid& grid, int j1, int j2, double phase) {
  const double k1 = M_PI * j1 / grid.half_width(), k2 = M_PI * j2 / grid.half_width();
  return GridFunction::sample(grid, [&](const Point& x) { return std::cos(k1 * x[0] + k2 * x[1] + phase); });
}

/// Applies the radial Fourier multiplier m(|xi|^2) by a direct O(n^2) DFT.
inline GridFunction direct_multiplier(const GridFunction& u, const std::function<double(double)>& m) {
  const SpatialGrid& g = u.grid();
  const int M = g.points_per_dim();
  const int dim = g.dim();
  const std::size_t n = g.size();
  std::vector<std::complex<double>> hat(n);
  const double two_pi_over_m = 2.0 * M_PI / M;
  for (std::size_t k = 0; k < n; ++k) {
    const int k1 = dim == 1 ? int(k) : int(k) / M, k2 = dim == 1 ? 0 : int(k) % M;
    std::complex<double> acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const int j1 = dim == 1 ? int(j) : int(j) / M, j2 = dim == 1 ? 0 : int(j) % M;
      const double angle = -two_pi_over_m * double((long(k1) * j1 + long(k2) * j2) % M);
      acc += u[j] * std::polar(1.0, angle);
    }
    const double x1 = wavenumber(k1, M, g.half_width()), x2 = dim == 1 ? 0.0 : wavenumber(k2, M, g.half_width());
    hat[k] = acc * m(x1 * x1 + x2 * x2);
  }
  GridFunction out(g);
  for (std::size_t j = 0; j < n; ++j) {
    const int j1 = dim == 1 ? int(j) : int(j) / M, j2 = dim == 1 ? 0 : int(j) % M;
    std::complex<double> acc = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const int k1 = dim == 1 ? int(k) : int(k) / M, k2 = dim == 1 ? 0 : int(k) % M;
      const double angle = two_pi_over_m * double((long(k1) * j1 + long(k2) * j2) % M);
      acc += hat[k] * std::polar(1.0, angle);
    }
    out[j] = acc.real() / double(n);
  }
  return out;
}

/// Squared discrete L2 distance by a plain loop.
inline double squared_distance(const GridFunction& a, const GridFunction& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return acc * a.grid().cell_volume();
}

/// W2 between equal-size uniform empirical measures by enumerating every permutation.
inline double brute_force_w2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  const std::size_t n = mu.size();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = squared_distance(mu.particle(i), nu.particle(j));
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = INFINITY;
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < n; ++i) c += cost[i * n + perm[i]];
    best = std::min(best, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::sqrt(std::max(0.0, best) / double(n));
}

/// 1/2 sum_s sum_k dt v_k(t_s)^2 as a double loop over the entries.
inline double control_cost(const Control& v, double dt) {
  double acc = 0.0;
  for (int s = 0; s < v.steps(); ++s)
    for (std::size_t k = 0; k < v.modes(); ++k) acc += 0.5 * dt * v.at(s, k) * v.at(s, k);
  return acc;
}

/// Discrete L2 mass of u on {x : |x| >= m} by a plain loop.
inline double tail_mass(const GridFunction& u, double m) {
  const SpatialGrid& g = u.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const Point p = g.point(i);
    const double r = std::sqrt(p[0] * p[0] + p[1] * p[1]);
    if (r >= m) acc += u[i] * u[i];
  }
  return acc * g.cell_volume();
}

}  // namespace mvlab::oracle
