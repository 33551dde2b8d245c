#include "mvlab/fields.hpp"

#include <algorithm>
#include <cmath>

namespace mvlab {

double SpaceTimeField::operator()(double t, const Point& x) const noexcept {
  const double dx = x[0] - center[0];
  const double dy = x[1] - center[1];
  const double r2 = dx * dx + dy * dy;
  switch (kind) {
    case Kind::zero:
      return 0.0;
    case Kind::constant:
      return amplitude;
    case Kind::gaussian:
      return amplitude * std::exp(-r2 / (width * width));
    case Kind::separable:
      return amplitude * (1.0 + t) * std::exp(-std::sqrt(r2) / width);
    case Kind::compact_bump: {
      const double q = r2 / (width * width);
      if (q >= 1.0) return 0.0;
      return amplitude * std::exp(1.0 - 1.0 / (1.0 - q));
    }
  }
  return 0.0;
}

GridFunction SpaceTimeField::sample(const SpatialGrid& grid, double t) const {
  if (is_zero()) return GridFunction(grid);
  return GridFunction::sample(grid, [&](const Point& x) { return (*this)(t, x); });
}

double SpaceTimeField::sup_abs(const SpatialGrid& grid, double horizon) const {
  if (is_zero()) return 0.0;
  double best = 0.0;
  for (double t : {0.0, horizon})
    for (std::size_t i = 0; i < grid.size(); ++i) best = std::max(best, std::abs((*this)(t, grid.point(i))));
  return best;
}

double SpaceTimeField::sup_l2_norm(const SpatialGrid& grid, double horizon) const {
  if (is_zero()) return 0.0;
  return std::max(l2_norm(sample(grid, 0.0)), l2_norm(sample(grid, horizon)));
}

void SpaceTimeField::validate(const std::string& name) const {
  if (!std::isfinite(amplitude)) throw ParameterError(name + ".amplitude must be finite");
  if (kind != Kind::zero && kind != Kind::constant && !(width > 0.0 && std::isfinite(width)))
    throw ParameterError(name + ".width must be positive");
}

const char* to_string(SpaceTimeField::Kind kind) {
  switch (kind) {
    case SpaceTimeField::Kind::zero:
      return "zero";
    case SpaceTimeField::Kind::constant:
      return "constant";
    case SpaceTimeField::Kind::gaussian:
      return "gaussian";
    case SpaceTimeField::Kind::separable:
      return "separable";
    case SpaceTimeField::Kind::compact_bump:
      return "compact_bump";
  }
  return "zero";
}

SpaceTimeField::Kind field_kind_from_string(const std::string& name) {
  using K = SpaceTimeField::Kind;
  for (K k : {K::zero, K::constant, K::gaussian, K::separable, K::compact_bump})
    if (name == to_string(k)) return k;
  throw ParameterError("unknown field kind '" + name + "'");
}

}  // namespace mvlab
