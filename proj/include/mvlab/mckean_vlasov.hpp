#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mvlab/dynamics.hpp"

namespace mvlab {

struct PicardConfig {
  std::size_t particles = 64;
  int max_iters = 20;
  /// Stop when d(mu^{m+1}, mu^m) < tol * (1 + sup_t sqrt(mu^0(t)(||.||^2))).
  double tol = 1e-6;
  /// Weight of the flow metric; nullopt selects it with auto_lambda.
  std::optional<double> lambda;
  std::uint64_t seed = 0;
  int threads = 0;

  void validate() const;
};

struct PicardReport {
  int iterations = 0;               ///< applications of the fixed-point map
  std::vector<double> distances;    ///< d_m = d(mu^{m+1}, mu^m), m = 0, 1, ...
  std::vector<double> ratios;       ///< ratios[m] = d_m / d_{m-1}; NaN where not reported (m = 0 or tiny denominator)
  bool converged = false;
  double lambda = 0.0;
  double tolerance = 0.0;           ///< absolute threshold actually used
};

/// Thrown by picard_solve when max_iters is exhausted.
class PicardNonConvergence : public Error {
 public:
  explicit PicardNonConvergence(PicardReport report);
  const PicardReport& report() const noexcept { return report_; }

 private:
  PicardReport report_;
};

/// Empirical law of an ensemble at every node.
MeasureFlow empirical_flow(const std::vector<Trajectory>& ensemble);

/// The measure-freezing map: solve every particle against the frozen flow with
/// its own noise path (a function of (seed, particle id) only) and return the
/// empirical law. Optionally hands back the particle trajectories.
MeasureFlow apply_phi(const Model& model, const MeasureFlow& flow, const std::vector<GridFunction>& initial,
                      double eps, const TimeGrid& tgrid, std::uint64_t seed, int threads,
                      std::vector<Trajectory>* ensemble = nullptr);

struct PicardResult {
  MeasureFlow flow;
  std::vector<Trajectory> ensemble;
  PicardReport report;
};

/// Iterates mu^{m+1} = Phi(mu^m) from the constant-in-time law of the initial
/// ensemble. `initial` must hold cfg.particles grid functions.
PicardResult picard_solve(const Model& model, const std::vector<GridFunction>& initial, double eps,
                          const TimeGrid& tgrid, const PicardConfig& cfg);

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<double> grid;       ///< candidate weights
  std::vector<double> max_ratio;  ///< max over probe pairs of d(Phi mu, Phi nu)/d(mu, nu) per candidate
};

inline constexpr double kContractionTarget = 0.5;

/// Smallest candidate weight with max probe ratio <= 1/2, doubled when the
/// doubled weight also meets the target. Throws if no candidate does.
LambdaSelection auto_lambda(const Model& model, const std::vector<MeasureFlow>& probes,
                            const std::vector<GridFunction>& initial, double eps, const TimeGrid& tgrid,
                            const PicardConfig& cfg);

/// Max over probe pairs of the contraction ratio at a fixed weight.
double probe_contraction_ratio(const Model& model, const std::vector<MeasureFlow>& probes,
                               const std::vector<GridFunction>& initial, double eps, const TimeGrid& tgrid,
                               const PicardConfig& cfg, double lambda);

/// Probe flows used by picard_solve: the initial law, the law of 1.5 x the
/// initial data, and one application of the map to the initial law.
std::vector<MeasureFlow> default_probe_flows(const Model& model, const std::vector<GridFunction>& initial,
                                             double eps, const TimeGrid& tgrid, const PicardConfig& cfg,
                                             double scale = 1.5);

struct SmallNoiseRow {
  double eps = 0.0;
  double estimate = 0.0;  ///< mean over replicas of sup_t ||u^eps(t) - u^0(t)||^2
  double stderr_ = 0.0;
};

struct SmallNoiseTable {
  std::vector<SmallNoiseRow> rows;
  double slope = 0.0;  ///< least-squares slope of log(estimate) against log(eps), eps > 0 rows
};

/// Common random numbers are used across eps values. eps = 0 rows use the
/// deterministic skeleton, which is the law-consistent solution for
/// deterministic initial data.
SmallNoiseTable small_noise_sweep(const Model& model, const GridFunction& u0, const std::vector<double>& eps_list,
                                  std::size_t replicas, const TimeGrid& tgrid, PicardConfig cfg);

/// max_t |sqrt(mu_N(t)(||.||^2)) - sqrt(mu_2N(t)(||.||^2))| between fixed points
/// computed with N and 2N particles (a law-resolution diagnostic).
double particle_doubling_gap(const Model& model, const GridFunction& u0, double eps, const TimeGrid& tgrid,
                             const PicardConfig& cfg);

}  // namespace mvlab
