#pragma once

#include <span>
#include <vector>

#include "mvlab/grid.hpp"

namespace mvlab {

/// Uniform empirical measure (1/N) sum_i delta_{xi_i} on H.
///
/// Particle L2 norms are computed once at construction; the coefficient
/// functionals only ever need those.
class EmpiricalMeasure {
 public:
  explicit EmpiricalMeasure(std::vector<GridFunction> particles);
  static EmpiricalMeasure dirac(GridFunction u);

  std::size_t size() const noexcept { return particles_.size(); }
  const SpatialGrid& grid() const noexcept { return particles_.front().grid(); }
  const std::vector<GridFunction>& particles() const noexcept { return particles_; }
  const GridFunction& particle(std::size_t i) const { return particles_.at(i); }
  std::span<const double> norms() const noexcept { return norms_; }

 private:
  std::vector<GridFunction> particles_;
  std::vector<double> norms_;
};

/// mu(||.||^2)
double second_moment(const EmpiricalMeasure& mu);

/// (1/N) sum_i min(||xi_i||, cap)
double mean_capped_norm(const EmpiricalMeasure& mu, double cap);

/// Exact W2 between equal-size empirical measures via optimal assignment.
double wasserstein2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// W2(mu, delta_0) = sqrt(mu(||.||^2))
double wasserstein2_to_dirac0(const EmpiricalMeasure& mu);

/// N x N matrix of squared L2 distances, row-major.
std::vector<double> squared_distance_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

/// A point of C([0,T], P2(H)) sampled on a solver time grid.
class MeasureFlow {
 public:
  MeasureFlow(std::vector<double> times, std::vector<EmpiricalMeasure> measures);

  /// The same measure at every time.
  static MeasureFlow constant(std::vector<double> times, const EmpiricalMeasure& mu);

  std::size_t nodes() const noexcept { return times_.size(); }
  std::size_t particles() const noexcept { return measures_.front().size(); }
  const std::vector<double>& times() const noexcept { return times_; }
  const EmpiricalMeasure& at(std::size_t s) const { return measures_.at(s); }
  const std::vector<EmpiricalMeasure>& measures() const noexcept { return measures_; }

 private:
  std::vector<double> times_;
  std::vector<EmpiricalMeasure> measures_;
};

/// W2(mu(t_s), nu(t_s)) for every node.
std::vector<double> pointwise_wasserstein2(const MeasureFlow& mu, const MeasureFlow& nu);

/// max_s exp(-lambda t_s) w2[s]
double weighted_sup(std::span<const double> times, std::span<const double> w2, double lambda);

/// sup_t exp(-lambda t) W2(mu(t), nu(t))
double flow_distance(const MeasureFlow& mu, const MeasureFlow& nu, double lambda);

}  // namespace mvlab
