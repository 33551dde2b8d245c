#include "mvlab/commands.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "mvlab/io.hpp"
#include "mvlab/verify.hpp"

namespace mvlab {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::validation:
    case ErrorKind::io:
      return exit_validation;
    case ErrorKind::numerical:
      return exit_numerical;
    case ErrorKind::verification:
      return exit_verification;
    case ErrorKind::internal:
      break;
  }
  return exit_internal;
}

TargetSpec parse_target_spec(const std::string& spec) {
  if (spec == "deterministic") return {TargetSpec::Kind::deterministic, {}};
  const auto colon = spec.find(':');
  if (colon == std::string::npos || colon + 1 == spec.size())
    throw ParameterError("--target: expected deterministic, manufactured:PATH, trajectory:PATH or terminal:PATH, got '" +
                         spec + "'");
  const std::string kind = spec.substr(0, colon);
  const fs::path path = spec.substr(colon + 1);
  if (kind == "manufactured") return {TargetSpec::Kind::manufactured, path};
  if (kind == "trajectory") return {TargetSpec::Kind::trajectory, path};
  if (kind == "terminal") return {TargetSpec::Kind::terminal, path};
  throw ParameterError("--target: unknown target kind '" + kind + "'");
}

namespace {

std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

json base_manifest(const RunConfig& cfg, const char* command) {
  json m;
  m["command"] = command;
  m["config_hash"] = cfg.hash();
  m["seed"] = cfg.seed;
  m["grid"] = {{"dim", cfg.dim}, {"half_width", cfg.half_width}, {"points", cfg.points}};
  m["modes"] = cfg.coefficients.sigma.modes();
  m["steps"] = cfg.steps;
  m["horizon"] = cfg.horizon;
  m["config"] = json::parse(cfg.canonical_json);
  return m;
}

void write_manifest(const fs::path& out, const json& manifest) {
  io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
}

void write_config_copy(const fs::path& out, const RunConfig& cfg) {
  io::write_text(out / "config.json", json::parse(cfg.canonical_json).dump(2) + "\n");
}

/// Largest tail mass beyond L/2 over the given states.
double max_outer_tail(const std::vector<GridFunction>& states) {
  double worst = 0.0;
  for (const auto& u : states) worst = std::max(worst, tail_mass(u, 0.5 * u.grid().half_width()));
  return worst;
}

void tail_warning(const RunConfig& cfg, double worst, CommandResult& result) {
  if (worst > cfg.tail_delta)
    result.warnings.push_back("tail mass beyond L/2 reaches " + fmt(worst) + " > " + fmt(cfg.tail_delta) +
                              "; the truncated domain may be too small");
}

std::string particle_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "particle_%04zu", i);
  return buf;
}

}  // namespace

CommandResult cmd_simulate(const RunConfig& cfg, const fs::path& out) {
  CommandResult result;
  result.out_dir = out;
  const SpatialGrid grid = cfg.grid();
  const TimeGrid tgrid = cfg.time_grid();
  const Model model = cfg.model();
  const std::vector<GridFunction> initial = cfg.initial_states(grid);

  io::ensure_directory(out / "trajectories");
  write_config_copy(out, cfg);
  json manifest = base_manifest(cfg, "simulate");
  manifest["eps"] = cfg.eps;
  manifest["particles"] = cfg.picard.particles;

  PicardResult res{MeasureFlow::constant(tgrid.nodes(), EmpiricalMeasure(initial)), {}, {}};
  try {
    res = picard_solve(model, initial, cfg.eps, tgrid, cfg.picard);
  } catch (const PicardNonConvergence& e) {
    io::write_picard_report_csv(out / "picard_report.csv", e.report());
    manifest["results"] = {{"converged", false}, {"iterations", e.report().iterations}, {"lambda", e.report().lambda}};
    write_manifest(out, manifest);
    throw;
  }

  json files = json::array({"config.json", "picard_report.csv", "flow_summary.csv"});
  double worst_tail = 0.0;
  for (std::size_t i = 0; i < res.ensemble.size(); ++i) {
    const fs::path stem = out / "trajectories" / particle_stem(i);
    io::write_trajectory(stem, res.ensemble[i], cfg.trajectory_format);
    files.push_back("trajectories/" + particle_stem(i) +
                    (cfg.trajectory_format == TrajectoryFormat::csv ? ".csv" : ".bin"));
    worst_tail = std::max(worst_tail, max_outer_tail(res.ensemble[i].states));
  }
  io::write_picard_report_csv(out / "picard_report.csv", res.report);
  io::write_flow_summary_csv(out / "flow_summary.csv", res.flow);
  tail_warning(cfg, worst_tail, result);

  const PicardReport& rep = res.report;
  manifest["results"] = {{"converged", rep.converged},
                         {"iterations", rep.iterations},
                         {"lambda", rep.lambda},
                         {"tolerance", rep.tolerance},
                         {"final_distance", rep.distances.back()},
                         {"max_tail_mass_outer_half", worst_tail}};
  manifest["files"] = files;
  manifest["warnings"] = result.warnings;
  write_manifest(out, manifest);

  result.messages.push_back("Picard iteration converged in " + std::to_string(rep.iterations) +
                            " iterations (lambda = " + fmt(rep.lambda) + ", final distance " +
                            fmt(rep.distances.back()) + ")");
  result.messages.push_back("wrote " + std::to_string(res.ensemble.size()) + " particle trajectories to " +
                            (out / "trajectories").string());
  return result;
}

CommandResult cmd_skeleton(const RunConfig& cfg, const fs::path& out, const std::optional<fs::path>& control) {
  CommandResult result;
  result.out_dir = out;
  const SpatialGrid grid = cfg.grid();
  const TimeGrid tgrid = cfg.time_grid();
  const Model model = cfg.model();
  const GridFunction u0 = cfg.initial.sample(grid, 0.0);
  std::optional<Control> v;
  if (control) v = io::read_control_csv(*control, tgrid, model.modes());

  io::ensure_directory(out);
  write_config_copy(out, cfg);
  json manifest = base_manifest(cfg, "skeleton");
  json files = json::array({"config.json"});
  json checks = json::object();

  const Trajectory det = solve_deterministic(model, u0, tgrid);
  io::write_trajectory(out / "deterministic", det, cfg.trajectory_format);
  const std::vector<double> det_res = energy_residual(model, det);
  io::write_series_csv(out / "energy_residual_deterministic.csv", "residual", tgrid.nodes(), det_res);
  files.push_back(cfg.trajectory_format == TrajectoryFormat::csv ? "deterministic.csv" : "deterministic.bin");
  files.push_back("energy_residual_deterministic.csv");

  double sup_sq = 0.0;
  for (const auto& u : det.states) sup_sq = std::max(sup_sq, l2_norm_sq(u));
  checks["deterministic_max_energy_residual"] = max_abs(det_res);
  checks["deterministic_bound_ratio"] = sup_sq / (1.0 + l2_norm_sq(u0));
  double worst_tail = max_outer_tail(det.states);

  if (v) {
    const Trajectory uv = solve_controlled(model, u0, *v, det, tgrid);
    io::write_trajectory(out / "controlled", uv, cfg.trajectory_format);
    const std::vector<double> res = energy_residual(model, uv, &*v, &det);
    io::write_series_csv(out / "energy_residual_controlled.csv", "residual", tgrid.nodes(), res);
    files.push_back(cfg.trajectory_format == TrajectoryFormat::csv ? "controlled.csv" : "controlled.bin");
    files.push_back("energy_residual_controlled.csv");
    const double dist = std::sqrt(sup_distance_sq(uv, det));
    checks["controlled_max_energy_residual"] = max_abs(res);
    checks["controlled_sup_distance_to_deterministic"] = dist;
    checks["control_cost"] = control_cost(*v, tgrid.dt());
    if (v->is_zero()) {
      const bool ok = dist <= 1e-12;
      checks["zero_control_reproduces_deterministic"] = ok;
      result.messages.push_back(std::string(ok ? "check passed" : "CHECK FAILED") +
                                ": zero control reproduces the deterministic solution (sup distance " + fmt(dist) + ")");
      if (!ok) result.warnings.push_back("zero control does not reproduce the deterministic solution");
    } else {
      result.messages.push_back("controlled solution differs from the deterministic one by sup distance " + fmt(dist));
      if (!(dist > 0.0)) result.warnings.push_back("nonzero control left the solution unchanged");
    }
    worst_tail = std::max(worst_tail, max_outer_tail(uv.states));
  }
  tail_warning(cfg, worst_tail, result);
  checks["max_tail_mass_outer_half"] = worst_tail;
  manifest["checks"] = checks;
  manifest["files"] = files;
  manifest["warnings"] = result.warnings;
  write_manifest(out, manifest);
  result.messages.push_back("deterministic energy residual max " + fmt(max_abs(det_res)));
  return result;
}

CommandResult cmd_rate(const RunConfig& cfg, const fs::path& out, const std::string& target_text) {
  const TargetSpec spec = parse_target_spec(target_text);
  CommandResult result;
  result.out_dir = out;
  const SpatialGrid grid = cfg.grid();
  const TimeGrid tgrid = cfg.time_grid();
  const Model model = cfg.model();
  const GridFunction u0 = cfg.initial.sample(grid, 0.0);
  const Trajectory det = solve_deterministic(model, u0, tgrid);

  json checks = json::object();
  std::optional<double> manufactured_cost;
  std::optional<RateTarget> target;
  switch (spec.kind) {
    case TargetSpec::Kind::deterministic:
      target = RateTarget::path(det);
      break;
    case TargetSpec::Kind::manufactured: {
      const Control vbar = io::read_control_csv(spec.path, tgrid, model.modes());
      manufactured_cost = control_cost(vbar, tgrid.dt());
      target = RateTarget::path(solve_controlled(model, u0, vbar, det, tgrid));
      break;
    }
    case TargetSpec::Kind::trajectory:
      target = RateTarget::path(spec.path.extension() == ".bin" ? io::read_trajectory_binary(spec.path, grid, tgrid)
                                                                : io::read_trajectory_csv(spec.path, grid, tgrid));
      break;
    case TargetSpec::Kind::terminal:
      target = RateTarget::endpoint(io::read_grid_function_csv(spec.path, grid));
      break;
  }

  const RateEstimate est = estimate_rate(model, u0, det, cfg.rate_problem(*target));
  io::ensure_directory(out);
  write_config_copy(out, cfg);
  io::write_rate_estimate_csv(out / "rate_estimate.csv", est);
  io::write_rate_stages_csv(out / "rate_stages.csv", est);
  io::write_control_csv(out / "v_star.csv", est.v_star, tgrid);

  json manifest = base_manifest(cfg, "rate");
  manifest["target"] = target_text;
  manifest["results"] = {{"value", est.value},          {"gap", est.gap},
                         {"relative_gap", est.relative_gap}, {"initial_gap", est.initial_gap},
                         {"converged", est.converged},  {"evaluations", est.evaluations}};
  if (manufactured_cost) {
    checks["manufactured_cost"] = *manufactured_cost;
    checks["value_over_manufactured_cost"] = *manufactured_cost > 0.0 ? est.value / *manufactured_cost : 0.0;
    result.messages.push_back("manufactured control cost " + fmt(*manufactured_cost));
  }
  manifest["checks"] = checks;
  manifest["files"] = {"config.json", "rate_estimate.csv", "rate_stages.csv", "v_star.csv"};
  write_manifest(out, manifest);

  result.messages.push_back("rate estimate " + fmt(est.value) + " (relative attainment gap " + fmt(est.relative_gap) +
                            (est.converged ? ", attained)" : ", NOT attained: target likely unreachable)"));
  if (!est.converged) result.warnings.push_back("target not attained within the optimizer budget");
  return result;
}

CommandResult cmd_verify(const RunConfig& cfg, const fs::path& out, const std::string& suite) {
  CommandResult result;
  result.out_dir = out;
  io::ensure_directory(out);
  const VerifyReport report = run_verification(cfg, suite, out / "scratch");

  std::string csv = "suite,criterion,measured,threshold,passed,seconds,runtime_limit\n";
  json rows = json::array();
  for (const auto& r : report.results) {
    csv += r.suite + ",\"" + r.criterion + "\",\"" + r.measured + "\",\"" + r.threshold + "\"," +
           (r.passed ? "1" : "0") + "," + io::format_double(r.seconds) + "," + io::format_double(r.runtime_limit) +
           "\n";
    json details = json::object();
    for (const auto& [k, val] : r.details) details[k] = val;
    rows.push_back({{"suite", r.suite},
                    {"criterion", r.criterion},
                    {"measured", r.measured},
                    {"threshold", r.threshold},
                    {"passed", r.passed},
                    {"details", details}});
    result.messages.push_back(std::string(r.passed ? "PASS " : "FAIL ") + r.suite + ": " + r.criterion +
                              " | measured " + r.measured + " | threshold " + r.threshold);
  }
  io::write_text(out / "verify_report.csv", csv);
  json manifest = base_manifest(cfg, "verify");
  manifest["suite"] = suite;
  manifest["results"] = rows;
  manifest["all_passed"] = report.all_passed();
  write_manifest(out, manifest);
  result.exit_code = report.all_passed() ? exit_success : exit_verification;
  return result;
}

}  // namespace mvlab
