#include "mvlab/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

#include "mvlab/commands.hpp"
#include "mvlab/io.hpp"
#include "mvlab/rng.hpp"
#include "oracles.hpp"

namespace mvlab {

namespace fs = std::filesystem;

bool VerifyReport::all_passed() const noexcept {
  return std::all_of(results.begin(), results.end(), [](const CriterionResult& r) { return r.passed; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"spectral", "wasserstein", "conditions", "energy",
                                              "picard",   "small_noise", "controlled", "tails",
                                              "rate",     "weak",        "determinism"};
  return names;
}

namespace {

std::string sci(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

/// Finishes a result: the criterion passes only if the measured check holds
/// and the runtime stays inside its budget.
CriterionResult finish(CriterionResult r, bool ok, const Stopwatch& clock) {
  r.seconds = clock.seconds();
  r.passed = ok && r.seconds < r.runtime_limit;
  r.details.emplace_back("seconds", num(r.seconds));
  if (ok && !r.passed) r.measured += " (runtime " + num(r.seconds) + " s over " + num(r.runtime_limit) + " s)";
  return r;
}

/// Smooth random perturbation with unit discrete L2 norm.
GridFunction random_profile(const SpatialGrid& grid, const CounterRng& rng, std::uint64_t stream) {
  GridFunction u(grid);
  for (std::uint64_t b = 0; b < 3; ++b) {
    const double a = rng.normal(stream, 4 * b);
    const double c0 = (rng.uniform(stream, 4 * b + 1) - 0.5) * 0.25 * grid.half_width();
    const double c1 = grid.dim() == 2 ? (rng.uniform(stream, 4 * b + 2) - 0.5) * 0.25 * grid.half_width() : 0.0;
    const double w = 0.5 + 1.5 * rng.uniform(stream, 4 * b + 3);
    u += SpaceTimeField::gaussian(a, w, {c0, c1}).sample(grid, 0.0);
  }
  const double n = l2_norm(u);
  return n > 0.0 ? (1.0 / n) * u : u;
}

/// Random control with unit L2(0,T;l2) norm.
Control random_control(const TimeGrid& tgrid, std::size_t modes, const CounterRng& rng, std::uint64_t stream) {
  Control v(tgrid.steps(), modes);
  for (int s = 0; s < tgrid.steps(); ++s)
    for (std::size_t k = 0; k < modes; ++k) v.at(s, k) = rng.normal(stream, std::uint64_t(s) * modes + k);
  const double n = std::sqrt(v.squared_norm(tgrid.dt()));
  v *= 1.0 / n;
  return v;
}

// 1. Spectral exactness on single Fourier modes.
CriterionResult suite_spectral(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"spectral", "fractional Laplacian on 20 random Fourier modes x 5 orders, relative error",
                    "", "<= 1e-12", false, 0, 1.0, {}};
  const SpatialGrid grid = cfg.grid();
  const CounterRng rng(derive_key(cfg.seed, "verify-spectral", 0));
  const int half = grid.points_per_dim() / 2;
  double worst = 0.0;
  for (std::uint64_t m = 0; m < 20; ++m) {
    const int j1 = (1 + int(rng.uniform(m, 0) * (half - 1))) * (rng.uniform(m, 1) < 0.5 ? -1 : 1);
    const int j2 = grid.dim() == 2 ? int(std::floor((rng.uniform(m, 2) - 0.5) * 2 * (half - 1))) : 0;
    const GridFunction u = oracle::fourier_mode(grid, j1, j2, 2.0 * M_PI * rng.uniform(m, 3));
    const double xi_sq = std::pow(M_PI * j1 / grid.half_width(), 2) + std::pow(M_PI * j2 / grid.half_width(), 2);
    for (double alpha : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const GridFunction lu = apply_fractional_laplacian(u, FractionalOrder(alpha));
      const double symbol = std::pow(xi_sq, alpha);
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < u.size(); ++i) {
        err = std::max(err, std::abs(lu[i] - symbol * u[i]));
        scale = std::max(scale, std::abs(symbol * u[i]));
      }
      worst = std::max(worst, err / scale);
    }
  }
  r.measured = "max relative error " + sci(worst);
  return finish(std::move(r), worst <= 1e-12, clock);
}

// 2. Assignment-based W2 against brute-force permutations.
CriterionResult suite_wasserstein(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"wasserstein", "W2 by assignment vs brute-force permutations, 200 pairs, N in 2..6",
                    "", "<= 1e-10 absolute", false, 0, 10.0, {}};
  const SpatialGrid grid = cfg.grid();
  const CounterRng rng(derive_key(cfg.seed, "verify-wasserstein", 0));
  double worst = 0.0;
  for (std::uint64_t p = 0; p < 200; ++p) {
    const std::size_t n = 2 + p % 5;
    std::vector<GridFunction> a, b;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back((1.0 + rng.uniform(p, 2 * i)) * random_profile(grid, rng, 1000 * p + 2 * i));
      b.push_back((1.0 + rng.uniform(p, 2 * i + 1)) * random_profile(grid, rng, 1000 * p + 2 * i + 1));
    }
    const EmpiricalMeasure mu(std::move(a)), nu(std::move(b));
    worst = std::max(worst, std::abs(wasserstein2(mu, nu) - oracle::brute_force_w2(mu, nu)));
  }
  r.measured = "max |difference| " + sci(worst);
  return finish(std::move(r), worst <= 1e-10, clock);
}

// 3. Structural condition audit plus the two constructed violations.
CriterionResult suite_conditions(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"conditions",
                    "configured coefficients pass every structural inequality on random draws; constructed "
                    "violations are detected",
                    "", "slack >= -1e-9; violations flagged", false, 0, 30.0, {}};
  const SpatialGrid grid = cfg.grid();
  const int draws = std::max(cfg.condition_draws, 1000);
  const ConditionReport base =
      verify_conditions(cfg.coefficients, grid, cfg.horizon, draws, cfg.seed, cfg.strong_dissipativity);
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : base.checks) worst = std::min(worst, c.worst_slack);

  CoefficientSet coercive = cfg.coefficients;
  coercive.f.lambda_f = -1.0;
  CoefficientSet lipschitz = cfg.coefficients;
  lipschitz.g.c1 = 3.0;
  if (lipschitz.g.psi_g.is_zero()) lipschitz.g.psi_g = SpaceTimeField::gaussian(0.5, 2.0);
  const auto v1 = verify_conditions(coercive, grid, cfg.horizon, draws, cfg.seed, cfg.strong_dissipativity).violations();
  const auto v2 = verify_conditions(lipschitz, grid, cfg.horizon, draws, cfg.seed, cfg.strong_dissipativity).violations();
  const auto has = [](const std::vector<std::string>& v, const std::string& id) {
    return std::find(v.begin(), v.end(), id) != v.end();
  };
  const bool caught1 = has(v1, "Sigma1:f-coercivity");
  const bool caught2 = has(v2, "Sigma2:g-lipschitz");

  std::string failed;
  for (const auto& v : base.violations()) failed += (failed.empty() ? "" : " ") + v;
  r.measured = "worst slack " + sci(worst) + "; negative lambda_f " + (caught1 ? "flagged" : "MISSED") +
               "; c1 = 3 " + (caught2 ? "flagged" : "MISSED");
  if (!failed.empty()) r.measured += "; violated: " + failed;
  r.details.emplace_back("draws", std::to_string(draws));
  for (const auto& c : base.checks) r.details.emplace_back(c.clause + ":" + c.id, sci(c.worst_slack));
  return finish(std::move(r), base.all_passed() && caught1 && caught2, clock);
}

// 4. Energy identity residual converges at first order in dt.
CriterionResult suite_energy(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"energy", "max normalized energy residual decreases with dt, S = 200, 400, 800",
                    "", "observed order >= 0.9", false, 0, 60.0, {}};
  const Model model = cfg.model();
  const GridFunction u0 = cfg.initial.sample(model.grid(), 0.0);
  std::vector<double> residuals;
  for (int steps : {200, 400, 800}) {
    const Trajectory traj = solve_deterministic(model, u0, TimeGrid(cfg.horizon, steps));
    residuals.push_back(max_abs(energy_residual(model, traj)));
    r.details.emplace_back("residual_S" + std::to_string(steps), sci(residuals.back()));
  }
  const double o1 = std::log2(residuals[0] / residuals[1]);
  const double o2 = std::log2(residuals[1] / residuals[2]);
  r.measured = "residuals " + sci(residuals[0]) + " " + sci(residuals[1]) + " " + sci(residuals[2]) + "; orders " +
               num(o1) + " " + num(o2);
  const bool ok = residuals[0] > residuals[1] && residuals[1] > residuals[2] && std::min(o1, o2) >= 0.9;
  return finish(std::move(r), ok, clock);
}

// 5. Picard contraction under the automatically chosen weight.
CriterionResult suite_picard(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"picard",
                    "Picard converges within 20 iterations at tol 1e-6; successive ratios from iteration 2 on",
                    "", "converged and max ratio <= 0.5", false, 0, 120.0, {}};
  const Model model = cfg.model();
  const TimeGrid tgrid = cfg.time_grid();
  PicardConfig pc = cfg.picard;
  pc.lambda.reset();
  pc.max_iters = std::min(pc.max_iters, 20);
  pc.tol = 1e-6;
  const std::vector<GridFunction> initial = cfg.initial_states(model.grid());
  try {
    const PicardResult res = picard_solve(model, initial, cfg.eps, tgrid, pc);
    double worst = 0.0;
    for (std::size_t m = 1; m < res.report.ratios.size(); ++m)
      if (!std::isnan(res.report.ratios[m])) worst = std::max(worst, res.report.ratios[m]);
    r.measured = std::to_string(res.report.iterations) + " iterations, lambda " + num(res.report.lambda) +
                 ", max ratio " + num(worst) + ", final distance " + sci(res.report.distances.back());
    r.details.emplace_back("particles", std::to_string(pc.particles));
    for (std::size_t m = 0; m < res.report.distances.size(); ++m)
      r.details.emplace_back("d" + std::to_string(m), sci(res.report.distances[m]));
    return finish(std::move(r), res.report.converged && worst <= 0.5, clock);
  } catch (const PicardNonConvergence& e) {
    r.measured = "no convergence in " + std::to_string(e.report().iterations) + " iterations (last distance " +
                 sci(e.report().distances.back()) + ")";
    return finish(std::move(r), false, clock);
  }
}

// 6. Small-noise rate: E sup ||u^eps - u^0||^2 is linear in eps.
CriterionResult suite_small_noise(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"small_noise", "log-log slope of E sup ||u^eps - u^0||^2 vs eps, eps in {1e-2,3e-3,1e-3,3e-4}, 16 replicas",
                    "", "slope in [0.8, 1.2]", false, 0, 300.0, {}};
  const Model model = cfg.model();
  const GridFunction u0 = cfg.initial.sample(model.grid(), 0.0);
  const SmallNoiseTable table =
      small_noise_sweep(model, u0, {1e-2, 3e-3, 1e-3, 3e-4}, 16, cfg.time_grid(), cfg.picard);
  for (const auto& row : table.rows)
    r.details.emplace_back("eps_" + num(row.eps), sci(row.estimate) + " +- " + sci(row.stderr_));
  r.measured = "slope " + num(table.slope);
  return finish(std::move(r), table.slope >= 0.8 && table.slope <= 1.2, clock);
}

// 7. Controlled equation: zero control and the Lipschitz audit.
CriterionResult suite_controlled(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"controlled",
                    "v = 0 reproduces u^0; Lipschitz constant over 10 perturbation pairs stable under halving",
                    "", "sup distance <= 1e-12; constant ratio within 1 +- 0.25", false, 0, 60.0, {}};
  const Model model = cfg.model();
  const TimeGrid tgrid = cfg.time_grid();
  const SpatialGrid& grid = model.grid();
  const GridFunction u0 = cfg.initial.sample(grid, 0.0);
  const Trajectory det = solve_deterministic(model, u0, tgrid);
  const Trajectory zero = solve_controlled(model, u0, Control(tgrid.steps(), model.modes()), det, tgrid);
  const double zero_dist = std::sqrt(sup_distance_sq(zero, det));

  const CounterRng rng(derive_key(cfg.seed, "verify-controlled", 0));
  Control base = random_control(tgrid, model.modes(), rng, 0);
  base *= 0.5;
  const double r_big = 1e-2;
  double c_big = 0.0, c_small = 0.0;
  for (std::uint64_t pair = 0; pair < 10; ++pair) {
    const GridFunction du = random_profile(grid, rng, 100 + pair);
    const Control dv = random_control(tgrid, model.modes(), rng, 200 + pair);
    const Trajectory u1 = solve_controlled(model, u0, base, det, tgrid);
    for (double size : {r_big, 0.5 * r_big}) {
      Control v2 = dv;
      v2 *= size;
      for (std::size_t e = 0; e < v2.values().size(); ++e) v2.values()[e] += base.values()[e];
      const Trajectory u2 = solve_controlled(model, u0 + size * du, v2, det, tgrid);
      const double lhs = sup_distance_sq(u1, u2) + l2v_distance_sq(model, u1, u2);
      const double rhs = l2_norm_sq(size * du) + (v2 - base).squared_norm(tgrid.dt());
      (size == r_big ? c_big : c_small) = std::max(size == r_big ? c_big : c_small, lhs / rhs);
    }
  }
  const double ratio = c_small / c_big;
  r.measured = "v = 0 sup distance " + sci(zero_dist) + "; constant " + num(c_big) + " at r = " + num(r_big) + ", " +
               num(c_small) + " at r/2 (ratio " + num(ratio) + ")";
  const bool ok = zero_dist <= 1e-12 && std::isfinite(ratio) && std::abs(ratio - 1.0) <= 0.25;
  return finish(std::move(r), ok, clock);
}

// 8. Uniform tail estimates over a set of bounded controls.
CriterionResult suite_tails(const RunConfig& cfg) {
  Stopwatch clock;
  const TailSettings& ts = cfg.tails;
  CriterionResult r{"tails", "compact-bump data, 5 controls of norm R: sup over t and controls of tail mass beyond m",
                    "", "< " + sci(ts.delta) + " for some m0 < L/2", false, 0, 60.0, {}};
  const SpatialGrid grid(cfg.dim, ts.half_width, ts.points);
  const Model model(grid, FractionalOrder(cfg.alpha), cfg.coefficients, cfg.c_v);
  const TimeGrid tgrid = cfg.time_grid();
  const GridFunction u0 = ts.initial.sample(grid, 0.0);
  const Trajectory det = solve_deterministic(model, u0, tgrid);
  const CounterRng rng(derive_key(cfg.seed, "verify-tails", 0));

  std::vector<Trajectory> runs;
  for (int c = 0; c < ts.controls; ++c) {
    Control v = random_control(tgrid, model.modes(), rng, std::uint64_t(c));
    v *= ts.control_radius;
    runs.push_back(solve_controlled(model, u0, v, det, tgrid));
  }
  const int m_max = int(std::ceil(0.5 * ts.half_width)) - 1;
  std::vector<double> tails(std::size_t(m_max) + 1, 0.0);
  for (int m = 1; m <= m_max; ++m)
    for (const auto& traj : runs)
      for (const auto& u : traj.states) tails[std::size_t(m)] = std::max(tails[std::size_t(m)], tail_mass(u, m));
  int m0 = -1;
  for (int m = m_max; m >= 1 && tails[std::size_t(m)] < ts.delta; --m) m0 = m;
  for (int m = 1; m <= m_max; m *= 2) r.details.emplace_back("tail_m" + std::to_string(m), sci(tails[std::size_t(m)]));
  r.measured = m0 > 0 ? "m0 = " + std::to_string(m0) + " (tail " + sci(tails[std::size_t(m0)]) + "), L/2 = " +
                            num(0.5 * ts.half_width)
                      : "no m < L/2 reaches delta (tail at " + std::to_string(m_max) + ": " +
                            sci(tails[std::size_t(m_max)]) + ")";
  return finish(std::move(r), m0 > 0, clock);
}

// 9. Rate function floor and manufactured upper bound.
CriterionResult suite_rate(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"rate", "I(u^0) <= 1e-6; manufactured target with K = 2, S = 50 recovers the cost bound",
                    "", "value <= 1.05 x cost(v_bar), relative gap < 1e-3", false, 0, 300.0, {}};
  if (cfg.coefficients.sigma.modes() < 2) {
    r.measured = "needs at least 2 noise modes";
    return finish(std::move(r), false, clock);
  }
  CoefficientSet coeffs = cfg.coefficients;
  coeffs.sigma.sigma1.resize(2);
  coeffs.sigma.beta.resize(2);
  coeffs.sigma.gamma.resize(2);
  const Model model(cfg.grid(), FractionalOrder(cfg.alpha), coeffs, cfg.c_v);
  const TimeGrid tgrid(cfg.horizon, 50);
  const GridFunction u0 = cfg.initial.sample(model.grid(), 0.0);
  const Trajectory det = solve_deterministic(model, u0, tgrid);

  const RateEstimate floor = estimate_rate(model, u0, det, cfg.rate_problem(RateTarget::path(det)));

  Control vbar(tgrid.steps(), 2);
  for (int s = 0; s < tgrid.steps(); ++s) {
    const double t = tgrid.node(s) + 0.5 * tgrid.dt();
    vbar.at(s, 0) = std::sin(M_PI * t / cfg.horizon);
    vbar.at(s, 1) = 0.5 * std::cos(2.0 * M_PI * t / cfg.horizon);
  }
  const double cost_bar = control_cost(vbar, tgrid.dt());
  const RateEstimate man = estimate_rate(model, u0, det,
                                         cfg.rate_problem(RateTarget::path(solve_controlled(model, u0, vbar, det, tgrid))));
  r.measured = "I(u^0) = " + sci(floor.value) + "; manufactured value " + num(man.value) + " vs cost " +
               num(cost_bar) + " (ratio " + num(man.value / cost_bar) + "), relative gap " + sci(man.relative_gap);
  r.details.emplace_back("evaluations", std::to_string(floor.evaluations + man.evaluations));
  for (const auto& st : man.stages)
    r.details.emplace_back("eta_" + sci(st.eta), "value " + num(st.value) + " gap " + sci(st.gap));
  const bool ok = floor.value <= 1e-6 && man.value <= 1.05 * cost_bar && man.relative_gap < 1e-3;
  return finish(std::move(r), ok, clock);
}

// 10. Weak convergence of oscillatory controls gives strong convergence of solutions.
CriterionResult suite_weak(const RunConfig& cfg) {
  Stopwatch clock;
  CriterionResult r{"weak", "v_i = A sin(i t) e_0, i = 1..32: sup-H distance to u_v",
                    "", "final < initial / 4 and ||v_i - v|| >= 0.25 A sqrt(T)", false, 0, 120.0, {}};
  const Model model = cfg.model();
  const TimeGrid tgrid = cfg.time_grid();
  const GridFunction u0 = cfg.initial.sample(model.grid(), 0.0);
  const Trajectory det = solve_deterministic(model, u0, tgrid);
  const double amplitude = 1.0;
  const WeakConvergenceTable table = weak_convergence_experiment(
      model, u0, det, Control(tgrid.steps(), model.modes()), 0, amplitude, {1, 2, 4, 8, 16, 32}, cfg.threads);
  double min_offset = std::numeric_limits<double>::infinity();
  for (const auto& row : table.rows) {
    min_offset = std::min(min_offset, row.offset_norm);
    r.details.emplace_back("i_" + num(row.frequency),
                           "sup_h " + sci(row.sup_h) + " l2_v " + sci(row.l2_v) + " offset " + num(row.offset_norm));
  }
  const double first = table.rows.front().sup_h, last = table.rows.back().sup_h;
  const double floor = 0.25 * amplitude * std::sqrt(cfg.horizon);
  r.measured = "sup-H distance " + sci(first) + " -> " + sci(last) + " (ratio " + num(last / first) +
               "), min ||v_i - v|| " + num(min_offset);
  const bool ok = first > 0.0 && last < 0.25 * first && table.rows.front().envelope > table.rows.back().envelope &&
                  min_offset >= floor;
  return finish(std::move(r), ok, clock);
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file()) files[fs::relative(entry.path(), root).generic_string()] = io::read_text(entry.path());
  return files;
}

// 11. Two simulate runs with different thread counts agree byte for byte.
CriterionResult suite_determinism(const RunConfig& cfg, const fs::path& workdir) {
  Stopwatch clock;
  CriterionResult r{"determinism", "simulate twice with the same seed and different thread counts",
                    "", "byte-identical trajectory files", false, 0, 60.0, {}};
  RunConfig a = cfg, b = cfg;
  a.threads = 1;
  b.threads = 3;
  finalize_config(a);
  finalize_config(b);
  const fs::path da = workdir / "determinism_threads1", db = workdir / "determinism_threads3";
  fs::remove_all(da);
  fs::remove_all(db);
  cmd_simulate(a, da);
  cmd_simulate(b, db);
  const auto ta = read_tree(da / "trajectories"), tb = read_tree(db / "trajectories");
  std::size_t differing = 0;
  for (const auto& [name, content] : ta) {
    const auto it = tb.find(name);
    if (it == tb.end() || it->second != content) ++differing;
  }
  const bool same_other = io::read_text(da / "picard_report.csv") == io::read_text(db / "picard_report.csv") &&
                          io::read_text(da / "manifest.json") == io::read_text(db / "manifest.json");
  r.measured = std::to_string(ta.size()) + " trajectory files, " + std::to_string(differing) + " differ" +
               (same_other ? "; report and manifest identical" : "; report or manifest DIFFER");
  return finish(std::move(r), !ta.empty() && ta.size() == tb.size() && differing == 0 && same_other, clock);
}

CriterionResult run_one(const RunConfig& cfg, const std::string& name, const fs::path& workdir) {
  if (name == "spectral") return suite_spectral(cfg);
  if (name == "wasserstein") return suite_wasserstein(cfg);
  if (name == "conditions") return suite_conditions(cfg);
  if (name == "energy") return suite_energy(cfg);
  if (name == "picard") return suite_picard(cfg);
  if (name == "small_noise") return suite_small_noise(cfg);
  if (name == "controlled") return suite_controlled(cfg);
  if (name == "tails") return suite_tails(cfg);
  if (name == "rate") return suite_rate(cfg);
  if (name == "weak") return suite_weak(cfg);
  return suite_determinism(cfg, workdir);
}

}  // namespace

VerifyReport run_verification(const RunConfig& cfg, const std::string& suite, const fs::path& workdir) {
  std::vector<std::string> selected;
  if (suite == "all") {
    selected = suite_names();
  } else if (std::find(suite_names().begin(), suite_names().end(), suite) != suite_names().end()) {
    selected = {suite};
  } else {
    std::string known;
    for (const auto& n : suite_names()) known += " " + n;
    throw ParameterError("unknown suite '" + suite + "'; known suites: all" + known);
  }

  VerifyReport report;
  for (const auto& name : selected) {
    try {
      report.results.push_back(run_one(cfg, name, workdir));
    } catch (const Error& e) {
      report.results.push_back({name, "suite raised an error", e.what(), "no error", false, 0, 0, {}});
    }
  }
  return report;
}

}  // namespace mvlab
