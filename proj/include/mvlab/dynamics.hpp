#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mvlab/coefficients.hpp"
#include "mvlab/measure.hpp"

namespace mvlab {

/// Uniform grid 0 = t_0 < ... < t_S = T.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);
  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  double dt() const noexcept { return horizon_ / steps_; }
  double node(int s) const noexcept { return s * dt(); }
  std::vector<double> nodes() const;
  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  int steps_;
};

/// Grid, fractional order and pre-sampled coefficients: everything a solver needs.
class Model {
 public:
  Model(const SpatialGrid& grid, FractionalOrder alpha, CoefficientSet coefficients, double c_v = 1.0);

  const SpatialGrid& grid() const noexcept { return coeffs_.grid(); }
  FractionalOrder alpha() const noexcept { return alpha_; }
  double c_v() const noexcept { return c_v_; }
  const DiscreteCoefficients& coefficients() const noexcept { return coeffs_; }
  const CoefficientSet& set() const noexcept { return coeffs_.set(); }
  std::size_t modes() const noexcept { return coeffs_.modes(); }

 private:
  FractionalOrder alpha_;
  double c_v_;
  DiscreteCoefficients coeffs_;
};

/// Brownian increments dW_k(t_s) ~ N(0, dt), S x K row-major. Values depend
/// only on (seed, stream, s, k).
class NoisePath {
 public:
  static NoisePath generate(std::uint64_t seed, std::uint64_t stream, const TimeGrid& tgrid, std::size_t modes);
  std::span<const double> increments(int s) const {
    return std::span<const double>(values_).subspan(std::size_t(s) * modes_, modes_);
  }
  std::size_t modes() const noexcept { return modes_; }
  int steps() const noexcept { return steps_; }

 private:
  std::vector<double> values_;
  std::size_t modes_ = 0;
  int steps_ = 0;
};

/// Piecewise-constant control v in L2(0,T; l2): v_k is constant on [t_s, t_{s+1}).
class Control {
 public:
  Control(int steps, std::size_t modes);
  Control(int steps, std::size_t modes, std::vector<double> values);

  int steps() const noexcept { return steps_; }
  std::size_t modes() const noexcept { return modes_; }
  double at(int s, std::size_t k) const { return values_[std::size_t(s) * modes_ + k]; }
  double& at(int s, std::size_t k) { return values_[std::size_t(s) * modes_ + k]; }
  std::span<const double> row(int s) const {
    return std::span<const double>(values_).subspan(std::size_t(s) * modes_, modes_);
  }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  /// ||v||^2_{L2(0,T;l2)} = sum_s dt sum_k v_k(t_s)^2, exact for this class.
  double squared_norm(double dt) const;
  bool is_zero() const noexcept;

  Control& operator*=(double a);
  friend Control operator-(Control a, const Control& b);

 private:
  int steps_;
  std::size_t modes_;
  std::vector<double> values_;
};

struct Trajectory {
  TimeGrid tgrid;
  std::vector<GridFunction> states;  ///< one per node, states[0] = initial data

  const GridFunction& at(int s) const { return states.at(std::size_t(s)); }
  const GridFunction& terminal() const { return states.back(); }
};

/// One semi-implicit step:
///   w = u + dt (g - f / (1 + dt|f|)) + sigma(t,u,mu) (dt v + sqrt(eps) dW),
///   u_next = (I + dt (-Laplacian)^alpha)^{-1} w.
/// Empty spans mean "no control" / "no noise". Throws BlowUpError carrying `step`.
GridFunction step_frozen(const Model& model, const GridFunction& u, const EmpiricalMeasure& mu, double t, double dt,
                         double eps, std::span<const double> control, std::span<const double> noise, int step = -1);

/// Frozen-measure equation driven by a given flow, optional control and noise.
Trajectory solve_frozen(const Model& model, const GridFunction& u0, const MeasureFlow& flow, double eps,
                        const Control* control, const NoisePath* noise, const TimeGrid& tgrid);

/// Deterministic skeleton: the law at t_s is the Dirac mass at the current state.
Trajectory solve_deterministic(const Model& model, const GridFunction& u0, const TimeGrid& tgrid);

/// Controlled equation; the law argument is delta at the deterministic solution.
Trajectory solve_controlled(const Model& model, const GridFunction& u0, const Control& v,
                            const Trajectory& deterministic, const TimeGrid& tgrid);

/// Per-node residual of the discrete energy balance (eps = 0)
///   ||u(t)||^2 + 2 int ||(-Lap)^{a/2}u||^2 + 2 int (f,u) - ||u0||^2 - 2 int (g,u) - 2 int (sigma v, u)
/// with trapezoidal time quadrature, divided by ||u0||^2 + 1. `reference` supplies
/// the law argument (delta at reference state); null means the trajectory itself.
std::vector<double> energy_residual(const Model& model, const Trajectory& traj, const Control* control = nullptr,
                                    const Trajectory* reference = nullptr);
double max_abs(std::span<const double> xs);

/// sup_s ||u(t_s)||^2 + sum_{s>=1} dt ||u(t_s)||_V^2 + sum_{s>=1} dt ||u(t_s)||_p^p
double a_priori_functional(const Model& model, const Trajectory& traj);

/// max_s ||a(t_s) - b(t_s)||^2
double sup_distance_sq(const Trajectory& a, const Trajectory& b);
/// sum_{s>=1} dt ||a(t_s) - b(t_s)||_V^2
double l2v_distance_sq(const Model& model, const Trajectory& a, const Trajectory& b);
/// sum_{s>=1} dt ||a(t_s) - b(t_s)||_p^p
double lp_distance_pow(const Trajectory& a, const Trajectory& b, double p);

}  // namespace mvlab
