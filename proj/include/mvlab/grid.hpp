#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "mvlab/error.hpp"

namespace mvlab {

using Point = std::array<double, 2>;

/// Periodic grid on [-L, L)^dim with M points per dimension.
///
/// Flat index layout is row-major: idx = i0 * M + i1 in two dimensions.
/// Fourier wavenumbers are xi_j = pi * j / L for j in [-M/2, M/2).
class SpatialGrid {
 public:
  SpatialGrid(int dim, double half_width, int points_per_dim);

  int dim() const noexcept { return dim_; }
  double half_width() const noexcept { return half_width_; }
  int points_per_dim() const noexcept { return points_; }
  std::size_t size() const noexcept { return size_; }
  double spacing() const noexcept { return 2.0 * half_width_ / points_; }
  double cell_volume() const noexcept;

  double coordinate(int j) const noexcept { return -half_width_ + j * spacing(); }
  Point point(std::size_t idx) const noexcept;
  double radius(std::size_t idx) const noexcept;

  /// Signed wavenumber for FFT storage index j in [0, M).
  double wavenumber(int j) const noexcept;

  bool operator==(const SpatialGrid& other) const noexcept {
    return dim_ == other.dim_ && half_width_ == other.half_width_ && points_ == other.points_;
  }

 private:
  int dim_;
  double half_width_;
  int points_;
  std::size_t size_;
};

class GridFunction {
 public:
  explicit GridFunction(const SpatialGrid& grid);
  GridFunction(const SpatialGrid& grid, std::vector<double> values);

  template <class F>
  static GridFunction sample(const SpatialGrid& grid, F&& fn) {
    GridFunction out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = fn(grid.point(i));
    return out;
  }

  const SpatialGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  bool all_finite() const noexcept;

  /// this += a * other
  GridFunction& axpy(double a, const GridFunction& other);
  GridFunction& operator+=(const GridFunction& other) { return axpy(1.0, other); }
  GridFunction& operator-=(const GridFunction& other) { return axpy(-1.0, other); }
  GridFunction& operator*=(double a);

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

  bool operator==(const GridFunction& other) const = default;

 private:
  SpatialGrid grid_;
  std::vector<double> values_;
};

/// Order of the fractional Laplacian, strictly inside (0, 1).
class FractionalOrder {
 public:
  explicit FractionalOrder(double alpha);
  double value() const noexcept { return alpha_; }

 private:
  double alpha_;
};

void require_same_grid(const GridFunction& a, const GridFunction& b);
void require_finite(const GridFunction& u, const char* what);

/// (-Laplacian)^s via the Fourier multiplier |xi|^{2s}, s >= 0 arbitrary.
GridFunction apply_laplacian_power(const GridFunction& u, double s);

/// (-Laplacian)^alpha, alpha in (0, 1).
GridFunction apply_fractional_laplacian(const GridFunction& u, FractionalOrder alpha);

/// (I + tau (-Laplacian)^alpha)^{-1} u.
GridFunction apply_semigroup_resolvent(const GridFunction& u, FractionalOrder alpha, double tau);

double inner(const GridFunction& u, const GridFunction& w);
double l2_norm_sq(const GridFunction& u);
double l2_norm(const GridFunction& u);
/// Same quantity as l2_norm, evaluated on the discrete Fourier side.
double spectral_l2_norm(const GridFunction& u);
/// ||(-Laplacian)^{alpha/2} u||
double h_alpha_seminorm(const GridFunction& u, FractionalOrder alpha);
/// sqrt(||u||^2 + c_v * seminorm^2)
double v_norm(const GridFunction& u, FractionalOrder alpha, double c_v = 1.0);
double lp_norm(const GridFunction& u, double p);
double lp_norm_pow(const GridFunction& u, double p);

/// Discrete integral of u^2 over cells with |x| >= m, 0 <= m <= L.
double tail_mass(const GridFunction& u, double m);

}  // namespace mvlab
