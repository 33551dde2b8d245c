#pragma once

#include <string>

#include "mvlab/grid.hpp"

namespace mvlab {

/// Closed-form time-space profiles used for initial data, psi-type weights,
/// sigma_1 modes and kappa. All are bounded and integrable on the truncated
/// domain.
struct SpaceTimeField {
  enum class Kind {
    zero,
    constant,      ///< a
    gaussian,      ///< a exp(-|x-c|^2 / w^2)
    separable,     ///< a (1+t) exp(-|x-c| / w)
    compact_bump,  ///< a exp(1 - 1/(1 - |x-c|^2/w^2)) on |x-c| < w, else 0
  };

  Kind kind = Kind::zero;
  double amplitude = 0.0;
  double width = 1.0;
  Point center{0.0, 0.0};

  static SpaceTimeField zero() { return {}; }
  static SpaceTimeField constant(double a) { return {Kind::constant, a, 1.0, {0.0, 0.0}}; }
  static SpaceTimeField gaussian(double a, double w, Point c = {0.0, 0.0}) { return {Kind::gaussian, a, w, c}; }
  static SpaceTimeField separable(double a, double w, Point c = {0.0, 0.0}) { return {Kind::separable, a, w, c}; }
  static SpaceTimeField compact_bump(double a, double w, Point c = {0.0, 0.0}) {
    return {Kind::compact_bump, a, w, c};
  }

  double operator()(double t, const Point& x) const noexcept;
  GridFunction sample(const SpatialGrid& grid, double t) const;
  bool is_time_dependent() const noexcept { return kind == Kind::separable; }
  bool is_zero() const noexcept { return kind == Kind::zero || amplitude == 0.0; }

  /// sup over [0,T] x grid of |field|. Exact for these families because the
  /// only time dependence is the monotone factor (1+t).
  double sup_abs(const SpatialGrid& grid, double horizon) const;
  /// sup over [0,T] of the discrete L2 norm; exact for the same reason.
  double sup_l2_norm(const SpatialGrid& grid, double horizon) const;

  void validate(const std::string& name) const;
};

const char* to_string(SpaceTimeField::Kind kind);
SpaceTimeField::Kind field_kind_from_string(const std::string& name);

}  // namespace mvlab
