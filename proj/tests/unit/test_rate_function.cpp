#include <doctest.h>

#include <cmath>

#include "mvlab/rate_function.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mvlab;
using mvlab::testing::Gen;

namespace {

struct Setup {
  RunConfig cfg = mvlab::testing::small_config(32, 10);
  SpatialGrid grid = cfg.grid();
  TimeGrid tgrid = cfg.time_grid();
  Model model = cfg.model();
  GridFunction u0 = cfg.initial.sample(grid, 0.0);
  Trajectory det = solve_deterministic(model, u0, tgrid);

  RateProblem problem(RateTarget target) const {
    RateProblem p = cfg.rate_problem(std::move(target));
    p.threads = 1;
    return p;
  }
  Control smooth_control(double scale) const {
    Control v(tgrid.steps(), model.modes());
    for (int s = 0; s < tgrid.steps(); ++s) {
      const double t = (s + 0.5) * tgrid.dt();
      v.at(s, 0) = scale * std::sin(M_PI * t);
      v.at(s, 1) = 0.5 * scale * std::cos(2.0 * M_PI * t);
    }
    return v;
  }
};

}  // namespace

TEST_CASE("control cost matches the double-loop oracle and scales quadratically") {
  for (std::uint64_t c = 0; c < 20; ++c) {
    Gen gen(51, c);
    const Control v = gen.control(gen.integer(1, 40), std::size_t(gen.integer(1, 6)), gen.uniform(0.01, 10.0));
    const double dt = gen.uniform(1e-3, 1.0);
    CHECK(std::abs(control_cost(v, dt) - oracle::control_cost(v, dt)) <= 1e-12 * (1.0 + oracle::control_cost(v, dt)));
    const double a = gen.uniform(-3.0, 3.0);
    Control w = v;
    w *= a;
    CHECK(control_cost(w, dt) == doctest::Approx(a * a * control_cost(v, dt)).epsilon(1e-12));
    CHECK(control_cost(v, dt) >= 0.0);
  }
  CHECK(control_cost(Control(5, 3), 0.1) == 0.0);
}

TEST_CASE("oscillatory controls hold exact cell averages") {
  const TimeGrid tg(1.0, 16);
  const Control v = oscillatory_control(tg, 3, 1, 2.0, 8.0);
  for (int s = 0; s < tg.steps(); ++s) {
    const double a = tg.node(s), b = tg.node(s + 1);
    CHECK(v.at(s, 1) == doctest::Approx(2.0 * (std::cos(8.0 * a) - std::cos(8.0 * b)) / (8.0 * tg.dt())));
    CHECK(v.at(s, 0) == 0.0);
    CHECK(v.at(s, 2) == 0.0);
  }
}

TEST_CASE("rate problem settings are validated") {
  Setup s;
  RateProblem p = s.problem(RateTarget::path(s.det));
  CHECK_NOTHROW(p.validate());
  p.eta_ladder = {1e-4, 1e-2};
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p.eta_ladder = {};
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = s.problem(RateTarget::path(s.det));
  p.budget = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);

  const RateTarget off = RateTarget::endpoint(GridFunction(SpatialGrid(1, 8.0, 16)));
  CHECK_THROWS_AS(off.validate(s.grid, s.tgrid), DomainError);
  Trajectory short_path = s.det;
  short_path.states.pop_back();
  CHECK_THROWS_AS(RateTarget::path(short_path).validate(s.grid, s.tgrid), DomainError);
}

TEST_CASE("the rate function vanishes on the deterministic skeleton") {
  Setup s;
  for (const RateTarget& target : {RateTarget::path(s.det), RateTarget::endpoint(s.det.terminal())}) {
    const RateEstimate est = estimate_rate(s.model, s.u0, s.det, s.problem(target));
    CHECK(est.value == 0.0);
    CHECK(est.converged);
    CHECK(est.v_star.is_zero());
  }
}

TEST_CASE("a path produced by a known control costs no more than that control") {
  Setup s;
  const Control vbar = s.smooth_control(1.0);
  const Trajectory phi = solve_controlled(s.model, s.u0, vbar, s.det, s.tgrid);
  const RateEstimate est = estimate_rate(s.model, s.u0, s.det, s.problem(RateTarget::path(phi)));
  CHECK(est.converged);
  CHECK(est.relative_gap <= s.cfg.gap_threshold);
  CHECK(est.value >= 0.0);
  CHECK(est.value <= control_cost(vbar, s.tgrid.dt()) * (1.0 + 1e-3));
  CHECK(est.value == doctest::Approx(control_cost(vbar, s.tgrid.dt())).epsilon(1e-2));
  CHECK(est.evaluations <= s.cfg.rate_budget);
}

TEST_CASE("the attainment gap does not grow down the penalty ladder") {
  Setup s;
  const Trajectory phi = solve_controlled(s.model, s.u0, s.smooth_control(0.7), s.det, s.tgrid);
  const RateEstimate est = estimate_rate(s.model, s.u0, s.det, s.problem(RateTarget::path(phi)));
  REQUIRE(est.stages.size() >= 2);
  for (std::size_t i = 1; i < est.stages.size(); ++i) {
    CHECK(est.stages[i].eta < est.stages[i - 1].eta);
    CHECK(est.stages[i].gap <= est.stages[i - 1].gap * (1.0 + 1e-6) + 1e-14);
  }
}

TEST_CASE("rate estimates scale like the square of the control amplitude for small controls") {
  Setup s;
  double values[2];
  int i = 0;
  for (double a : {0.01, 0.02}) {
    const Trajectory phi = solve_controlled(s.model, s.u0, s.smooth_control(a), s.det, s.tgrid);
    values[i++] = estimate_rate(s.model, s.u0, s.det, s.problem(RateTarget::path(phi))).value;
  }
  CHECK(values[1] / values[0] == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("level-set probe separates cheap, expensive and unreachable paths") {
  Setup s;
  const Trajectory cheap = solve_controlled(s.model, s.u0, s.smooth_control(0.2), s.det, s.tgrid);
  const Trajectory dear = solve_controlled(s.model, s.u0, s.smooth_control(3.0), s.det, s.tgrid);
  const double level = 0.5 * (control_cost(s.smooth_control(0.2), s.tgrid.dt()) +
                              control_cost(s.smooth_control(3.0), s.tgrid.dt()));
  const auto entries = level_set_probe(s.model, s.u0, s.det, level,
                                       {{"skeleton", RateTarget::path(s.det)},
                                        {"cheap", RateTarget::path(cheap)},
                                        {"dear", RateTarget::path(dear)}},
                                       s.problem(RateTarget::path(s.det)));
  REQUIRE(entries.size() == 3);
  CHECK(entries[0].inside);
  CHECK(entries[1].inside);
  CHECK(entries[2].attained);
  CHECK_FALSE(entries[2].inside);
}

TEST_CASE("hard instance: with nearly degenerate noise an off-skeleton path is never reported inside") {
  RunConfig cfg = mvlab::testing::small_config(32, 10);
  cfg.coefficients.sigma.kappa = SpaceTimeField::zero();
  for (auto& f : cfg.coefficients.sigma.sigma1) f.amplitude = 1e-8;
  finalize_config(cfg);
  const Model model = cfg.model();
  const TimeGrid tg = cfg.time_grid();
  const GridFunction u0 = cfg.initial.sample(cfg.grid(), 0.0);
  const Trajectory det = solve_deterministic(model, u0, tg);
  // Shift the skeleton endpoint by a fixed bump: reaching it needs controls of size ~1e8.
  GridFunction end = det.terminal();
  end += SpaceTimeField::gaussian(0.1, 1.0).sample(cfg.grid(), 0.0);
  RateProblem p = cfg.rate_problem(RateTarget::endpoint(end));
  p.threads = 1;
  p.max_iters_per_stage = 20;
  const auto entries = level_set_probe(model, u0, det, 10.0, {{"shifted", RateTarget::endpoint(end)}}, p);
  REQUIRE(entries.size() == 1);
  CHECK_FALSE(entries[0].inside);
}

TEST_CASE("weak convergence experiment with zero amplitude is identically zero") {
  Setup s;
  const WeakConvergenceTable t = weak_convergence_experiment(s.model, s.u0, s.det, Control(s.tgrid.steps(), s.model.modes()),
                                                             0, 0.0, {1.0, 4.0, 16.0}, 1);
  REQUIRE(t.rows.size() == 3);
  for (const auto& r : t.rows) {
    CHECK(r.sup_h == 0.0);
    CHECK(r.l2_v == 0.0);
    CHECK(r.offset_norm == 0.0);
    CHECK(r.envelope == 0.0);
  }
}

TEST_CASE("weak convergence envelope is a non-increasing upper bound") {
  Setup s;
  const WeakConvergenceTable t = weak_convergence_experiment(
      s.model, s.u0, s.det, Control(s.tgrid.steps(), s.model.modes()), 0, 1.0, {1.0, 2.0, 4.0, 8.0}, 1);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    CHECK(t.rows[i].envelope >= t.rows[i].sup_h);
    if (i > 0) CHECK(t.rows[i].envelope <= t.rows[i - 1].envelope);
    CHECK(t.rows[i].offset_norm > 0.0);
  }
}
