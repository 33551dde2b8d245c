#include "mvlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvlab/assignment.hpp"

namespace mvlab {

EmpiricalMeasure::EmpiricalMeasure(std::vector<GridFunction> particles) : particles_(std::move(particles)) {
  if (particles_.empty()) throw DomainError("empirical measure needs at least one particle");
  norms_.reserve(particles_.size());
  for (const auto& p : particles_) {
    require_same_grid(particles_.front(), p);
    norms_.push_back(l2_norm(p));
  }
}

EmpiricalMeasure EmpiricalMeasure::dirac(GridFunction u) {
  std::vector<GridFunction> one;
  one.push_back(std::move(u));
  return EmpiricalMeasure(std::move(one));
}

double second_moment(const EmpiricalMeasure& mu) {
  double acc = 0.0;
  for (const auto& p : mu.particles()) acc += l2_norm_sq(p);
  return acc / double(mu.size());
}

double mean_capped_norm(const EmpiricalMeasure& mu, double cap) {
  double acc = 0.0;
  for (double n : mu.norms()) acc += std::min(n, cap);
  return acc / double(mu.size());
}

std::vector<double> squared_distance_matrix(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  if (mu.size() != nu.size())
    throw DomainError("W2 needs equal particle counts (" + std::to_string(mu.size()) + " vs " +
                      std::to_string(nu.size()) + ")");
  if (!(mu.grid() == nu.grid())) throw DomainError("W2 between measures on different grids");
  const std::size_t n = mu.size();
  const double vol = mu.grid().cell_volume();
  std::vector<double> cost(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = mu.particle(i).values();
    for (std::size_t j = 0; j < n; ++j) {
      const auto b = nu.particle(j).values();
      double acc = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        acc += d * d;
      }
      cost[i * n + j] = acc * vol;
    }
  }
  return cost;
}

double wasserstein2(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  const auto cost = squared_distance_matrix(mu, nu);
  const Assignment a = solve_assignment(cost, mu.size());
  return std::sqrt(std::max(0.0, a.cost) / double(mu.size()));
}

double wasserstein2_to_dirac0(const EmpiricalMeasure& mu) { return std::sqrt(second_moment(mu)); }

MeasureFlow::MeasureFlow(std::vector<double> times, std::vector<EmpiricalMeasure> measures)
    : times_(std::move(times)), measures_(std::move(measures)) {
  if (times_.empty() || times_.size() != measures_.size())
    throw DomainError("measure flow needs one measure per time node");
  for (std::size_t s = 1; s < times_.size(); ++s) {
    if (!(times_[s] > times_[s - 1])) throw DomainError("measure flow times must be increasing");
    if (measures_[s].size() != measures_[0].size())
      throw DomainError("measure flow must keep a fixed particle count");
  }
}

MeasureFlow MeasureFlow::constant(std::vector<double> times, const EmpiricalMeasure& mu) {
  std::vector<EmpiricalMeasure> ms(times.size(), mu);
  return MeasureFlow(std::move(times), std::move(ms));
}

std::vector<double> pointwise_wasserstein2(const MeasureFlow& mu, const MeasureFlow& nu) {
  if (mu.times() != nu.times()) throw DomainError("flows live on different time grids");
  std::vector<double> out(mu.nodes());
  for (std::size_t s = 0; s < mu.nodes(); ++s) out[s] = wasserstein2(mu.at(s), nu.at(s));
  return out;
}

double weighted_sup(std::span<const double> times, std::span<const double> w2, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("flow metric weight must be nonnegative");
  if (times.size() != w2.size()) throw DomainError("weighted_sup: length mismatch");
  double best = 0.0;
  for (std::size_t s = 0; s < times.size(); ++s) best = std::max(best, std::exp(-lambda * times[s]) * w2[s]);
  return best;
}

double flow_distance(const MeasureFlow& mu, const MeasureFlow& nu, double lambda) {
  const auto w2 = pointwise_wasserstein2(mu, nu);
  return weighted_sup(mu.times(), w2, lambda);
}

}  // namespace mvlab
