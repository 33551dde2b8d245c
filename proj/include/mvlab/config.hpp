#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvlab/mckean_vlasov.hpp"
#include "mvlab/rate_function.hpp"

namespace mvlab {

enum class TrajectoryFormat { csv, binary };

/// How the N initial states are produced from the configured profile u0.
struct InitialEnsemble {
  enum class Kind {
    deterministic,  ///< every particle starts at u0
    scaled_normal,  ///< particle i starts at (1 + spread * Z_i) u0, Z_i ~ N(0,1) keyed by (seed, i)
  };
  Kind kind = Kind::deterministic;
  double spread = 0.0;
};

/// Settings for the tails suite, which runs on its own wider grid.
struct TailSettings {
  double half_width = 64.0;
  int points = 256;
  SpaceTimeField initial = SpaceTimeField::compact_bump(1.0, 2.0);
  int controls = 5;
  double control_radius = 1.0;  ///< ||v||_{L2(0,T;l2)} of every probe control
  double delta = 1e-6;
};

struct RunConfig {
  int dim = 1;
  double half_width = 16.0;
  int points = 128;
  double alpha = 0.75;
  double c_v = 1.0;

  double horizon = 1.0;
  int steps = 200;

  CoefficientSet coefficients;
  SpaceTimeField initial;
  InitialEnsemble ensemble;
  double eps = 0.1;

  PicardConfig picard;

  std::vector<double> eta_ladder{1e-2, 1e-4, 1e-6, 1e-8, 1e-10};
  int rate_budget = 40000;
  double gap_threshold = 1e-3;
  int rate_max_iters_per_stage = 60;

  std::uint64_t seed = 1;
  int threads = 0;

  std::string out_dir = "run";
  TrajectoryFormat trajectory_format = TrajectoryFormat::csv;
  double tail_delta = 1e-6;  ///< simulate/skeleton warn when tail_mass(u, L/2) exceeds this

  int condition_draws = 1000;
  bool strong_dissipativity = true;

  TailSettings tails;

  /// Sorted JSON of every reproducibility-relevant setting (no thread count,
  /// no output directory).
  std::string canonical_json;

  SpatialGrid grid() const;
  TimeGrid time_grid() const;
  Model model() const;
  RateProblem rate_problem(RateTarget target) const;
  std::vector<GridFunction> initial_states(const SpatialGrid& grid) const;

  /// 16 hex digits of FNV-1a over canonical_json.
  std::string hash() const;
};

/// Parses a JSON config text. Unknown keys are rejected. Environment
/// variables MVLAB_<SECTION>__<KEY>=value (or MVLAB_<KEY> for top-level keys)
/// override entries before validation when `apply_env` is set.
RunConfig parse_config(const std::string& text, bool apply_env = true);
RunConfig load_config(const std::string& path, bool apply_env = true);

/// The built-in canonical instance as JSON text.
std::string canonical_config_json();

/// Re-validates a config after programmatic edits and refreshes canonical_json.
void finalize_config(RunConfig& cfg);

}  // namespace mvlab
