#include "mvlab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "spectral_backend.hpp"

namespace mvlab {

SpatialGrid::SpatialGrid(int dim, double half_width, int points_per_dim)
    : dim_(dim), half_width_(half_width), points_(points_per_dim), size_(0) {
  if (dim != 1 && dim != 2) throw ParameterError("grid.dim must be 1 or 2");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw ParameterError("grid.half_width must be positive and finite");
  if (points_per_dim < 4 || points_per_dim % 2 != 0)
    throw ParameterError("grid.points must be even and >= 4, got " + std::to_string(points_per_dim));
  size_ = dim == 1 ? std::size_t(points_) : std::size_t(points_) * std::size_t(points_);
}

double SpatialGrid::cell_volume() const noexcept {
  const double h = spacing();
  return dim_ == 1 ? h : h * h;
}

Point SpatialGrid::point(std::size_t idx) const noexcept {
  if (dim_ == 1) return {coordinate(int(idx)), 0.0};
  return {coordinate(int(idx / points_)), coordinate(int(idx % points_))};
}

double SpatialGrid::radius(std::size_t idx) const noexcept {
  const Point p = point(idx);
  return std::hypot(p[0], p[1]);
}

double SpatialGrid::wavenumber(int j) const noexcept {
  const int signed_j = j < points_ / 2 ? j : j - points_;
  return std::numbers::pi * signed_j / half_width_;
}

GridFunction::GridFunction(const SpatialGrid& grid) : grid_(grid), values_(grid.size(), 0.0) {}

GridFunction::GridFunction(const SpatialGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw DomainError("grid function has " + std::to_string(values_.size()) + " values, grid needs " +
                      std::to_string(grid_.size()));
}

bool GridFunction::all_finite() const noexcept {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

GridFunction& GridFunction::axpy(double a, const GridFunction& other) {
  if (!(grid_ == other.grid_)) throw DomainError("grid functions live on different grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += a * other.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

FractionalOrder::FractionalOrder(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("fractional order must lie in (0, 1)");
}

void require_same_grid(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid() == b.grid())) throw DomainError("grid functions live on different grids");
}

void require_finite(const GridFunction& u, const char* what) {
  if (!u.all_finite()) throw InvalidFieldError(std::string(what) + ": field has non-finite values");
}

GridFunction apply_laplacian_power(const GridFunction& u, double s) {
  require_finite(u, "fractional laplacian");
  if (!(s >= 0.0)) throw ParameterError("laplacian power must be nonnegative");
  GridFunction out(u.grid());
  // |xi|^{2s} = (|xi|^2)^s; the zero mode maps to 0 for s > 0 and to 1 for s = 0.
  detail::apply_radial_multiplier(u.grid(), u.values(), out.values(), [s](double xi_sq) {
    if (s == 0.0) return 1.0;
    return xi_sq == 0.0 ? 0.0 : std::pow(xi_sq, s);
  });
  return out;
}

GridFunction apply_fractional_laplacian(const GridFunction& u, FractionalOrder alpha) {
  return apply_laplacian_power(u, alpha.value());
}

GridFunction apply_semigroup_resolvent(const GridFunction& u, FractionalOrder alpha, double tau) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ParameterError("resolvent step must be positive");
  require_finite(u, "resolvent");
  const double a = alpha.value();
  GridFunction out(u.grid());
  detail::apply_radial_multiplier(u.grid(), u.values(), out.values(), [a, tau](double xi_sq) {
    return xi_sq == 0.0 ? 1.0 : 1.0 / (1.0 + tau * std::pow(xi_sq, a));
  });
  return out;
}

double inner(const GridFunction& u, const GridFunction& w) {
  require_same_grid(u, w);
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * w[i];
  return acc * u.grid().cell_volume();
}

double l2_norm_sq(const GridFunction& u) {
  double acc = 0.0;
  for (double v : u.values()) acc += v * v;
  return acc * u.grid().cell_volume();
}

double l2_norm(const GridFunction& u) { return std::sqrt(l2_norm_sq(u)); }

double spectral_l2_norm(const GridFunction& u) {
  return std::sqrt(detail::spectral_energy(u.grid(), u.values()) * u.grid().cell_volume());
}

double h_alpha_seminorm(const GridFunction& u, FractionalOrder alpha) {
  return l2_norm(apply_laplacian_power(u, 0.5 * alpha.value()));
}

double v_norm(const GridFunction& u, FractionalOrder alpha, double c_v) {
  const double semi = h_alpha_seminorm(u, alpha);
  return std::sqrt(l2_norm_sq(u) + c_v * semi * semi);
}

double lp_norm_pow(const GridFunction& u, double p) {
  if (!(p >= 2.0)) throw ParameterError("lp_norm requires p >= 2");
  double acc = 0.0;
  for (double v : u.values()) acc += std::pow(std::abs(v), p);
  return acc * u.grid().cell_volume();
}

double lp_norm(const GridFunction& u, double p) {
  return std::pow(lp_norm_pow(u, p), 1.0 / p);
}

double tail_mass(const GridFunction& u, double m) {
  const SpatialGrid& g = u.grid();
  if (!(m >= 0.0 && m <= g.half_width())) throw ParameterError("tail radius must lie in [0, L]");
  double acc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (g.radius(i) >= m) acc += u[i] * u[i];
  return acc * g.cell_volume();
}

}  // namespace mvlab
