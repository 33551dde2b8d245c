#include <doctest.h>

#include <cmath>

#include "mvlab/dynamics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mvlab;
using mvlab::testing::Gen;

namespace {

double max_abs_diff(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double sup_distance(const Trajectory& a, const Trajectory& b) { return std::sqrt(sup_distance_sq(a, b)); }

}  // namespace

TEST_CASE("time grid and control basics") {
  CHECK_THROWS_AS(TimeGrid(0.0, 10), ParameterError);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), ParameterError);
  const TimeGrid tg(2.0, 8);
  CHECK(tg.dt() == 0.25);
  CHECK(tg.nodes().size() == 9);
  CHECK(tg.nodes().back() == doctest::Approx(2.0));

  CHECK_THROWS_AS(Control(4, 2, std::vector<double>(7)), DomainError);
  CHECK_THROWS_AS(Control(1, 1, std::vector<double>{std::nan("")}), InvalidFieldError);
  for (std::uint64_t c = 0; c < 10; ++c) {
    Gen gen(41, c);
    const Control v = gen.control(gen.integer(1, 30), std::size_t(gen.integer(1, 5)));
    const double dt = gen.uniform(0.001, 0.5);
    CHECK(0.5 * v.squared_norm(dt) == doctest::Approx(oracle::control_cost(v, dt)).epsilon(1e-13));
  }
  CHECK(Control(3, 2).is_zero());
}

TEST_CASE("noise increments are reproducible, stream-separated and N(0, dt)") {
  const TimeGrid tg(1.0, 2000);
  const NoisePath a = NoisePath::generate(7, 3, tg, 4), b = NoisePath::generate(7, 3, tg, 4);
  const NoisePath c = NoisePath::generate(7, 4, tg, 4), d = NoisePath::generate(8, 3, tg, 4);
  double sum = 0.0, sq = 0.0;
  bool differs_stream = false, differs_seed = false;
  for (int s = 0; s < tg.steps(); ++s)
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(a.increments(s)[k] == b.increments(s)[k]);
      differs_stream |= a.increments(s)[k] != c.increments(s)[k];
      differs_seed |= a.increments(s)[k] != d.increments(s)[k];
      sum += a.increments(s)[k];
      sq += a.increments(s)[k] * a.increments(s)[k];
    }
  CHECK(differs_stream);
  CHECK(differs_seed);
  const double n = 8000.0;
  // Mean of n draws of N(0, dt) has sd sqrt(dt / n); 5 sd bounds.
  CHECK(std::abs(sum / n) < 5.0 * std::sqrt(tg.dt() / n));
  CHECK(sq / n == doctest::Approx(tg.dt()).epsilon(5.0 * std::sqrt(2.0 / n)));
}

TEST_CASE("without reaction terms a step is exactly the resolvent") {
  const SpatialGrid g(1, 6.0, 32);
  const Model model(g, FractionalOrder(0.6), mvlab::testing::linear_set(2));
  const EmpiricalMeasure mu = EmpiricalMeasure::dirac(GridFunction(g));
  for (std::uint64_t c = 0; c < 6; ++c) {
    Gen gen(42, c);
    const GridFunction u = gen.field(g);
    const double dt = gen.uniform(0.001, 0.3), eps = gen.uniform(0.0, 0.5);
    const std::vector<double> v{gen.normal(), gen.normal()}, dw{gen.normal(), gen.normal()};

    const GridFunction plain = step_frozen(model, u, mu, 0.2, dt, 0.0, {}, {});
    CHECK(max_abs_diff(plain, apply_semigroup_resolvent(u, model.alpha(), dt)) <= 1e-13);

    GridFunction w = u;
    for (std::size_t k = 0; k < 2; ++k)
      w.axpy(dt * v[k] + std::sqrt(eps) * dw[k], model.set().sigma.sigma1[k].sample(g, 0.2));
    const GridFunction forced = step_frozen(model, u, mu, 0.2, dt, eps, v, dw);
    CHECK(max_abs_diff(forced, apply_semigroup_resolvent(w, model.alpha(), dt)) <= 1e-13);
  }
}

TEST_CASE("without reaction terms constants are preserved") {
  const SpatialGrid g(2, 3.0, 8);
  const Model model(g, FractionalOrder(0.3), mvlab::testing::linear_set(1));
  const GridFunction c = GridFunction::sample(g, [](const Point&) { return -1.25; });
  const Trajectory tr = solve_deterministic(model, c, TimeGrid(1.0, 10));
  for (const auto& s : tr.states) CHECK(max_abs_diff(s, c) <= 1e-13);
}

TEST_CASE("the linear controlled equation responds linearly to the control") {
  const SpatialGrid g(1, 6.0, 32);
  const Model model(g, FractionalOrder(0.6), mvlab::testing::linear_set(3));
  const TimeGrid tg(1.0, 25);
  Gen gen(43);
  const GridFunction u0 = gen.field(g);
  const Trajectory det = solve_deterministic(model, u0, tg);
  const Control v = gen.control(tg.steps(), 3);
  Control v2 = v;
  v2 *= 2.0;
  const Trajectory a = solve_controlled(model, u0, v, det, tg), b = solve_controlled(model, u0, v2, det, tg);
  CHECK(sup_distance(b, det) == doctest::Approx(2.0 * sup_distance(a, det)).epsilon(1e-10));
}

TEST_CASE("the canonical controlled equation is linear to first order in small controls") {
  const RunConfig cfg = mvlab::testing::small_config();
  const Model model = cfg.model();
  const TimeGrid tg = cfg.time_grid();
  const GridFunction u0 = cfg.initial.sample(cfg.grid(), 0.0);
  const Trajectory det = solve_deterministic(model, u0, tg);
  for (std::uint64_t c = 0; c < 4; ++c) {
    Gen gen(44, c);
    Control v = gen.control(tg.steps(), model.modes(), 1e-3);
    Control v2 = v;
    v2 *= 2.0;
    const double r = sup_distance(solve_controlled(model, u0, v2, det, tg), det) /
                     sup_distance(solve_controlled(model, u0, v, det, tg), det);
    CHECK(r >= 1.8);
    CHECK(r <= 2.2);
  }
}

TEST_CASE("a zero control reproduces the deterministic skeleton exactly") {
  const RunConfig cfg = mvlab::testing::small_config();
  const Model model = cfg.model();
  const TimeGrid tg = cfg.time_grid();
  const GridFunction u0 = cfg.initial.sample(cfg.grid(), 0.0);
  const Trajectory det = solve_deterministic(model, u0, tg);
  const Trajectory ctl = solve_controlled(model, u0, Control(tg.steps(), model.modes()), det, tg);
  CHECK(sup_distance_sq(det, ctl) == 0.0);
}

TEST_CASE("frozen solves are deterministic in the noise path") {
  const RunConfig cfg = mvlab::testing::small_config();
  const Model model = cfg.model();
  const TimeGrid tg = cfg.time_grid();
  const GridFunction u0 = cfg.initial.sample(cfg.grid(), 0.0);
  const MeasureFlow flow = MeasureFlow::constant(tg.nodes(), EmpiricalMeasure::dirac(u0));
  const NoisePath n1 = NoisePath::generate(1, 0, tg, model.modes()), n2 = NoisePath::generate(2, 0, tg, model.modes());
  const Trajectory a = solve_frozen(model, u0, flow, 0.1, nullptr, &n1, tg);
  const Trajectory b = solve_frozen(model, u0, flow, 0.1, nullptr, &n1, tg);
  const Trajectory c = solve_frozen(model, u0, flow, 0.1, nullptr, &n2, tg);
  CHECK(sup_distance_sq(a, b) == 0.0);
  CHECK(sup_distance_sq(a, c) > 0.0);
}

TEST_CASE("the tamed drift keeps very large data finite") {
  RunConfig cfg = mvlab::testing::small_config();
  const Model model = cfg.model();
  const GridFunction u0 = SpaceTimeField::gaussian(1e4, 1.0).sample(cfg.grid(), 0.0);
  const Trajectory tr = solve_deterministic(model, u0, TimeGrid(1.0, 5));
  for (const auto& s : tr.states) CHECK(s.all_finite());
  CHECK(l2_norm(tr.terminal()) < l2_norm(u0));
}

TEST_CASE("non-finite states raise a blow-up error naming the step") {
  const RunConfig cfg = mvlab::testing::small_config();
  const Model model = cfg.model();
  GridFunction u(cfg.grid());
  u[2] = INFINITY;
  const EmpiricalMeasure mu = EmpiricalMeasure::dirac(GridFunction(cfg.grid()));
  try {
    step_frozen(model, u, mu, 0.0, 0.01, 0.0, {}, {}, 7);
    FAIL("expected BlowUpError");
  } catch (const BlowUpError& e) {
    CHECK(e.step() == 7);
    CHECK(e.kind() == ErrorKind::numerical);
  }
  CHECK_THROWS_AS(step_frozen(model, GridFunction(cfg.grid()), mu, 0.0, 0.01, 1.5, {}, {}), ParameterError);
}

TEST_CASE("energy balance residual vanishes for the zero solution and is small for the canonical one") {
  const SpatialGrid g(1, 4.0, 16);
  const Model lin(g, FractionalOrder(0.5), mvlab::testing::linear_set(1));
  const Trajectory zero = solve_deterministic(lin, GridFunction(g), TimeGrid(1.0, 10));
  CHECK(max_abs(energy_residual(lin, zero)) == 0.0);

  const RunConfig cfg = mvlab::testing::small_config(32, 100);
  const Model model = cfg.model();
  const Trajectory tr = solve_deterministic(model, cfg.initial.sample(cfg.grid(), 0.0), cfg.time_grid());
  CHECK(max_abs(energy_residual(model, tr)) < 1e-2);
}

TEST_CASE("the a-priori functional dominates the initial energy and grows with the data") {
  const RunConfig cfg = mvlab::testing::small_config();
  const Model model = cfg.model();
  const TimeGrid tg = cfg.time_grid();
  double previous = 0.0;
  for (double a : {0.25, 0.5, 1.0, 2.0}) {
    const GridFunction u0 = SpaceTimeField::gaussian(a, 1.0).sample(cfg.grid(), 0.0);
    const double val = a_priori_functional(model, solve_deterministic(model, u0, tg));
    CHECK(val >= l2_norm_sq(u0));
    CHECK(val > previous);
    previous = val;
  }
}

TEST_CASE("trajectory distances") {
  const SpatialGrid g(1, 2.0, 8);
  const Model lin(g, FractionalOrder(0.5), mvlab::testing::linear_set(1));
  const TimeGrid tg(1.0, 4);
  const GridFunction one = GridFunction::sample(g, [](const Point&) { return 1.0; });
  const Trajectory a{tg, std::vector<GridFunction>(5, GridFunction(g))};
  const Trajectory b{tg, std::vector<GridFunction>(5, one)};
  CHECK(sup_distance_sq(a, b) == doctest::Approx(l2_norm_sq(one)));
  // constants have zero seminorm, so the V distance is the L2 one
  CHECK(l2v_distance_sq(lin, a, b) == doctest::Approx(l2_norm_sq(one)));
  CHECK(lp_distance_pow(a, b, 4.0) == doctest::Approx(lp_norm_pow(one, 4.0)));
}
