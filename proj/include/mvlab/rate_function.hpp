#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvlab/dynamics.hpp"

namespace mvlab {

/// 1/2 * sum_s dt * sum_k v_k(t_s)^2
double control_cost(const Control& v, double dt);

/// The path phi to be reached, either a whole trajectory or only its endpoint.
class RateTarget {
 public:
  enum class Kind { trajectory, terminal };

  static RateTarget path(Trajectory phi);
  static RateTarget endpoint(GridFunction phi_T);

  Kind kind() const noexcept { return kind_; }
  const Trajectory& trajectory() const;
  const GridFunction& terminal() const;

  /// Squared distance used by the penalty:
  /// trajectory: sum_{s>=1} dt ||u_s - phi_s||^2 + ||u_S - phi_S||^2; terminal: ||u_S - phi||^2.
  double distance_sq(const Trajectory& u) const;

  /// Checks the target is on the solver grids.
  void validate(const SpatialGrid& grid, const TimeGrid& tgrid) const;

 private:
  RateTarget(Kind kind, std::optional<Trajectory> path, std::optional<GridFunction> end);
  Kind kind_;
  std::optional<Trajectory> path_;
  std::optional<GridFunction> end_;
};

struct RateProblem {
  RateTarget target;
  /// Penalty weights, visited in order with warm starts; must be positive and decreasing.
  std::vector<double> eta_ladder{1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  /// Maximum number of forward solves over the whole ladder.
  int budget = 40000;
  /// Relative attainment gap, gap / dist(u^0, phi), below which phi counts as reached.
  double gap_threshold = 1e-3;
  int max_iters_per_stage = 60;
  int threads = 0;

  void validate() const;
};

struct RateStage {
  double eta = 0.0;
  double value = 0.0;  ///< control cost of the stage's best iterate
  double gap = 0.0;    ///< dist(u_v, phi) at that iterate
  double objective = 0.0;
  int iterations = 0;
};

struct RateEstimate {
  double value = 0.0;         ///< control_cost(v_star)
  Control v_star;
  double gap = 0.0;           ///< dist(u_{v_star}, phi)
  double initial_gap = 0.0;   ///< dist(u^0, phi)
  double relative_gap = 0.0;  ///< gap / initial_gap (gap itself when initial_gap = 0)
  bool converged = false;     ///< relative_gap <= gap_threshold
  int evaluations = 0;        ///< forward solves used
  std::vector<RateStage> stages;
};

/// Minimises J_eta(v) = control_cost(v) + dist(u_v, phi)^2 / (2 eta) over the
/// piecewise-constant controls by Levenberg-Marquardt with a forward-difference
/// Jacobian, walking the eta ladder with warm starts. `deterministic` is the
/// skeleton from u0 on the same grids.
RateEstimate estimate_rate(const Model& model, const GridFunction& u0, const Trajectory& deterministic,
                           const RateProblem& problem);

/// Cell averages of amplitude * sin(frequency * t) on each step, placed in mode k.
Control oscillatory_control(const TimeGrid& tgrid, std::size_t modes, std::size_t k, double amplitude,
                            double frequency);

struct WeakConvergenceRow {
  double frequency = 0.0;
  double sup_h = 0.0;         ///< max_s ||u_{v_i}(t_s) - u_v(t_s)||
  double l2_v = 0.0;          ///< (sum_s dt ||u_{v_i} - u_v||_V^2)^{1/2}
  double lp = 0.0;            ///< (sum_s dt ||u_{v_i} - u_v||_p^p)^{1/p}, diagnostic
  double control_norm = 0.0;  ///< ||v_i||
  double offset_norm = 0.0;   ///< ||v_i - v||
  double envelope = 0.0;      ///< max over this and later rows of sup_h
};

struct WeakConvergenceTable {
  std::vector<WeakConvergenceRow> rows;
  double base_norm = 0.0;  ///< ||v||
};

/// Solves u_{v_i} for v_i = v + A sin(i t) e_k and compares against u_v.
WeakConvergenceTable weak_convergence_experiment(const Model& model, const GridFunction& u0,
                                                 const Trajectory& deterministic, const Control& v, std::size_t mode,
                                                 double amplitude, const std::vector<double>& frequencies,
                                                 int threads = 0);

struct LevelSetCandidate {
  std::string name;
  RateTarget target;
};

struct LevelSetEntry {
  std::string name;
  double value = 0.0;
  double relative_gap = 0.0;
  bool attained = false;
  bool inside = false;  ///< attained and value <= level
};

std::vector<LevelSetEntry> level_set_probe(const Model& model, const GridFunction& u0, const Trajectory& deterministic,
                                           double level, const std::vector<LevelSetCandidate>& candidates,
                                           const RateProblem& settings);

}  // namespace mvlab
