#pragma once

#include <cstdint>
#include <vector>

#include "mvlab/config.hpp"
#include "mvlab/rng.hpp"

namespace mvlab::testing {

/// Deterministic generator for property tests. Draw j of case i is a pure
/// function of (seed, i, j).
class Gen {
 public:
  explicit Gen(std::uint64_t seed, std::uint64_t case_index = 0)
      : rng_(derive_key(seed, "property", case_index)) {}

  double uniform(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(0, counter_++); }
  double normal() { return rng_.normal(1, counter_++); }
  int integer(int lo, int hi) { return lo + int(rng_.bits(2, counter_++) % std::uint64_t(hi - lo + 1)); }

  /// Random smooth-ish field: a sum of a few Fourier modes with random phases
  /// plus a Gaussian bump.
  GridFunction field(const SpatialGrid& grid, double scale = 1.0) {
    const int modes = integer(1, 4);
    std::vector<double> amp, k1, k2, phase;
    for (int m = 0; m < modes; ++m) {
      amp.push_back(normal());
      k1.push_back(M_PI * integer(-6, 6) / grid.half_width());
      k2.push_back(grid.dim() == 2 ? M_PI * integer(-6, 6) / grid.half_width() : 0.0);
      phase.push_back(uniform(0.0, 2.0 * M_PI));
    }
    const double bump = normal(), width = uniform(0.5, 3.0);
    return GridFunction::sample(grid, [&](const Point& x) {
      double v = bump * std::exp(-(x[0] * x[0] + x[1] * x[1]) / (width * width));
      for (int m = 0; m < modes; ++m) v += amp[std::size_t(m)] * std::cos(k1[std::size_t(m)] * x[0] + k2[std::size_t(m)] * x[1] + phase[std::size_t(m)]);
      return scale * v;
    });
  }

  /// Uncorrelated grid values.
  GridFunction noise_field(const SpatialGrid& grid, double scale = 1.0) {
    GridFunction u(grid);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = scale * normal();
    return u;
  }

  Control control(int steps, std::size_t modes, double scale = 1.0) {
    Control v(steps, modes);
    for (double& x : v.values()) x = scale * normal();
    return v;
  }

 private:
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

/// The canonical instance shrunk to a grid and horizon small enough for unit tests.
inline RunConfig small_config(int points = 32, int steps = 20) {
  RunConfig cfg = parse_config(canonical_config_json(), false);
  cfg.points = points;
  cfg.half_width = 8.0;
  cfg.steps = steps;
  cfg.picard.particles = 8;
  cfg.threads = 1;
  finalize_config(cfg);
  return cfg;
}

/// Coefficients that do not read the measure argument.
inline CoefficientSet measure_free(CoefficientSet c) {
  c.f.phi = SpaceTimeField::zero();
  c.g.c2 = 0.0;
  std::fill(c.sigma.beta.begin(), c.sigma.beta.end(), 0.0);
  return c;
}

/// Purely linear coefficients: f = 0 (lambda_f = 0), g = 0, additive noise only.
inline CoefficientSet linear_set(std::size_t modes) {
  CoefficientSet c;
  c.f = DriftF{2, 0.0, SpaceTimeField::zero(), 1.0};
  c.g = DriftG{SpaceTimeField::zero(), 0.0, 0.0, 0.0};
  c.sigma.kappa = SpaceTimeField::zero();
  for (std::size_t k = 0; k < modes; ++k) {
    c.sigma.sigma1.push_back(SpaceTimeField::gaussian(0.5, 1.0, {double(k) - 1.0, 0.0}));
    c.sigma.beta.push_back(0.0);
    c.sigma.gamma.push_back(0.0);
  }
  return c;
}

}  // namespace mvlab::testing
