#include <doctest.h>

#include <cmath>

#include "mvlab/mckean_vlasov.hpp"
#include "support.hpp"

using namespace mvlab;
using mvlab::testing::Gen;

namespace {

struct Setup {
  RunConfig cfg = mvlab::testing::small_config();
  SpatialGrid grid = cfg.grid();
  TimeGrid tgrid = cfg.time_grid();
  Model model = cfg.model();
  std::vector<GridFunction> initial = cfg.initial_states(grid);
  PicardConfig picard() const {
    PicardConfig p = cfg.picard;
    p.particles = initial.size();
    p.threads = 1;
    return p;
  }
};

}  // namespace

TEST_CASE("picard configuration is validated") {
  PicardConfig p;
  p.particles = 0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = PicardConfig{};
  p.tol = 0.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  p = PicardConfig{};
  p.lambda = -1.0;
  CHECK_THROWS_AS(p.validate(), ParameterError);
  CHECK_NOTHROW(PicardConfig{}.validate());
}

TEST_CASE("measure-independent coefficients reach the fixed point after one application") {
  Setup s;
  const Model model(s.grid, FractionalOrder(s.cfg.alpha), mvlab::testing::measure_free(s.cfg.coefficients));
  PicardConfig p = s.picard();
  p.lambda = 1.0;
  const PicardResult r = picard_solve(model, s.initial, 0.1, s.tgrid, p);
  CHECK(r.report.converged);
  REQUIRE(r.report.distances.size() == 2);
  CHECK(r.report.distances[0] > 0.0);
  CHECK(r.report.distances[1] == 0.0);
}

TEST_CASE("the fixed-point map is deterministic and thread-count independent") {
  Setup s;
  const MeasureFlow flow = MeasureFlow::constant(s.tgrid.nodes(), EmpiricalMeasure(s.initial));
  const MeasureFlow a = apply_phi(s.model, flow, s.initial, 0.1, s.tgrid, 3, 1);
  const MeasureFlow b = apply_phi(s.model, flow, s.initial, 0.1, s.tgrid, 3, 4);
  const MeasureFlow c = apply_phi(s.model, flow, s.initial, 0.1, s.tgrid, 4, 1);
  CHECK(flow_distance(a, b, 0.0) == 0.0);
  CHECK(flow_distance(a, c, 0.0) > 0.0);
}

TEST_CASE("the fixed point is self-consistent") {
  Setup s;
  const PicardConfig p = s.picard();
  const PicardResult r = picard_solve(s.model, s.initial, 0.1, s.tgrid, p);
  REQUIRE(r.report.converged);
  CHECK(r.ensemble.size() == s.initial.size());
  CHECK(flow_distance(empirical_flow(r.ensemble), r.flow, 0.0) == 0.0);
  const MeasureFlow again = apply_phi(s.model, r.flow, s.initial, 0.1, s.tgrid, p.seed, 1);
  // One more application moves the flow by at most the contraction factor times the last step.
  CHECK(flow_distance(again, r.flow, r.report.lambda) <= r.report.distances.back() + 1e-12);
  for (std::size_t m = 1; m < r.report.ratios.size(); ++m)
    if (!std::isnan(r.report.ratios[m])) CHECK(r.report.ratios[m] <= kContractionTarget);
}

TEST_CASE("with no noise and identical particles the law is the Dirac mass at the skeleton") {
  Setup s;
  std::vector<GridFunction> same(4, s.cfg.initial.sample(s.grid, 0.0));
  PicardConfig p = s.picard();
  p.particles = 4;
  const PicardResult r = picard_solve(s.model, same, 0.0, s.tgrid, p);
  const Trajectory det = solve_deterministic(s.model, same[0], s.tgrid);
  for (int k = 0; k <= s.tgrid.steps(); ++k)
    CHECK(second_moment(r.flow.at(std::size_t(k))) ==
          doctest::Approx(l2_norm_sq(det.at(k))).epsilon(1e-6));
}

TEST_CASE("the selected weight also contracts on held-out probe flows") {
  Setup s;
  const PicardConfig p = s.picard();
  const auto probes = default_probe_flows(s.model, s.initial, 0.1, s.tgrid, p);
  const LambdaSelection sel = auto_lambda(s.model, probes, s.initial, 0.1, s.tgrid, p);
  CHECK(sel.grid.size() == sel.max_ratio.size());
  CHECK(sel.lambda >= 0.0);

  const auto held_out = default_probe_flows(s.model, s.initial, 0.1, s.tgrid, p, 0.5);
  CHECK(probe_contraction_ratio(s.model, held_out, s.initial, 0.1, s.tgrid, p, sel.lambda) <= 1.0);
}

TEST_CASE("second moments of the fixed point stay bounded by the deterministic energy plus noise") {
  Setup s;
  const PicardResult r = picard_solve(s.model, s.initial, 0.1, s.tgrid, s.picard());
  const double m0 = second_moment(r.flow.at(0));
  for (const auto& mu : r.flow.measures()) {
    CHECK(std::isfinite(second_moment(mu)));
    CHECK(second_moment(mu) <= 4.0 * (m0 + 1.0));
  }
}

TEST_CASE("exhausting the iteration budget raises non-convergence with the report attached") {
  Setup s;
  PicardConfig p = s.picard();
  p.max_iters = 1;
  p.lambda = 0.0;
  try {
    picard_solve(s.model, s.initial, 0.1, s.tgrid, p);
    FAIL("expected PicardNonConvergence");
  } catch (const PicardNonConvergence& e) {
    CHECK(e.kind() == ErrorKind::numerical);
    CHECK(e.report().iterations == 1);
    CHECK_FALSE(e.report().converged);
  }
}

TEST_CASE("small-noise sweep is zero at eps = 0 and grows with eps") {
  Setup s;
  const auto table =
      small_noise_sweep(s.model, s.cfg.initial.sample(s.grid, 0.0), {0.0, 1e-3, 1e-2}, 8, s.tgrid, s.picard());
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].estimate == 0.0);
  CHECK(table.rows[1].estimate > 0.0);
  CHECK(table.rows[2].estimate > table.rows[1].estimate);
  CHECK(table.slope == doctest::Approx(1.0).epsilon(0.2));
}
