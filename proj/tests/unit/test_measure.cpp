#include <doctest.h>

#include <cmath>

#include "mvlab/assignment.hpp"
#include "mvlab/measure.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mvlab;
using mvlab::testing::Gen;

namespace {

EmpiricalMeasure random_measure(Gen& gen, const SpatialGrid& g, std::size_t n) {
  std::vector<GridFunction> ps;
  for (std::size_t i = 0; i < n; ++i) ps.push_back(gen.field(g, gen.uniform(0.2, 2.0)));
  return EmpiricalMeasure(std::move(ps));
}

}  // namespace

TEST_CASE("assignment matches brute force on small random matrices") {
  for (std::uint64_t c = 0; c < 40; ++c) {
    Gen gen(21, c);
    const std::size_t n = std::size_t(gen.integer(1, 7));
    std::vector<double> cost(n * n);
    for (double& x : cost) x = gen.integer(0, 3) == 0 ? double(gen.integer(0, 4)) : gen.uniform(-5.0, 5.0);
    const Assignment a = solve_assignment(cost, n);

    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = INFINITY;
    do {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += cost[i * n + std::size_t(perm[i])];
      best = std::min(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));

    CHECK(a.cost == doctest::Approx(best).epsilon(1e-12));
    std::vector<int> seen(n, 0);
    for (int j : a.column_of_row) ++seen.at(std::size_t(j));
    for (int s : seen) CHECK(s == 1);
  }
}

TEST_CASE("W2 equals the permutation-enumeration oracle") {
  for (std::uint64_t c = 0; c < 12; ++c) {
    Gen gen(22, c);
    const SpatialGrid g(gen.integer(1, 2), 4.0, 8);
    const std::size_t n = std::size_t(gen.integer(1, 6));
    const EmpiricalMeasure mu = random_measure(gen, g, n), nu = random_measure(gen, g, n);
    CHECK(wasserstein2(mu, nu) == doctest::Approx(oracle::brute_force_w2(mu, nu)).epsilon(1e-12));
  }
}

TEST_CASE("W2 is a metric on empirical measures") {
  for (std::uint64_t c = 0; c < 15; ++c) {
    Gen gen(23, c);
    const SpatialGrid g(1, 5.0, 16);
    const std::size_t n = std::size_t(gen.integer(2, 12));
    const EmpiricalMeasure a = random_measure(gen, g, n), b = random_measure(gen, g, n), d = random_measure(gen, g, n);
    CHECK(wasserstein2(a, a) <= 1e-12);
    CHECK(wasserstein2(a, b) >= 0.0);
    CHECK(wasserstein2(a, b) == doctest::Approx(wasserstein2(b, a)).epsilon(1e-12));
    CHECK(wasserstein2(a, d) <= wasserstein2(a, b) + wasserstein2(b, d) + 1e-12);
  }
}

TEST_CASE("W2 does not depend on particle order") {
  Gen gen(24);
  const SpatialGrid g(1, 5.0, 16);
  const EmpiricalMeasure a = random_measure(gen, g, 9), b = random_measure(gen, g, 9);
  std::vector<GridFunction> shuffled = a.particles();
  std::reverse(shuffled.begin(), shuffled.end());
  std::swap(shuffled[1], shuffled[4]);
  CHECK(wasserstein2(EmpiricalMeasure(shuffled), b) == doctest::Approx(wasserstein2(a, b)).epsilon(1e-12));
}

TEST_CASE("W2 between Dirac masses is the L2 distance") {
  Gen gen(25);
  const SpatialGrid g(2, 3.0, 8);
  const GridFunction u = gen.field(g), w = gen.field(g);
  CHECK(wasserstein2(EmpiricalMeasure::dirac(u), EmpiricalMeasure::dirac(w)) ==
        doctest::Approx(std::sqrt(oracle::squared_distance(u, w))));
}

TEST_CASE("W2 to the zero Dirac is the root second moment") {
  Gen gen(26);
  const SpatialGrid g(1, 3.0, 16);
  const EmpiricalMeasure mu = random_measure(gen, g, 5);
  std::vector<GridFunction> zeros(5, GridFunction(g));
  CHECK(wasserstein2_to_dirac0(mu) == doctest::Approx(std::sqrt(second_moment(mu))));
  CHECK(wasserstein2(mu, EmpiricalMeasure(zeros)) == doctest::Approx(wasserstein2_to_dirac0(mu)));
}

TEST_CASE("translating every particle by the same field moves W2 by at most its norm") {
  for (std::uint64_t c = 0; c < 8; ++c) {
    Gen gen(27, c);
    const SpatialGrid g(1, 4.0, 16);
    const EmpiricalMeasure mu = random_measure(gen, g, 6);
    const GridFunction shift = gen.field(g);
    std::vector<GridFunction> moved;
    for (const auto& p : mu.particles()) moved.push_back(p + shift);
    CHECK(wasserstein2(mu, EmpiricalMeasure(moved)) == doctest::Approx(l2_norm(shift)).epsilon(1e-10));
  }
}

TEST_CASE("mismatched measures are rejected") {
  const SpatialGrid g(1, 1.0, 8);
  const EmpiricalMeasure a(std::vector<GridFunction>(2, GridFunction(g)));
  const EmpiricalMeasure b(std::vector<GridFunction>(3, GridFunction(g)));
  CHECK_THROWS_AS(wasserstein2(a, b), DomainError);
  CHECK_THROWS(EmpiricalMeasure(std::vector<GridFunction>{}));
}

TEST_CASE("capped mean norm and weighted flow distance") {
  const SpatialGrid g(1, 2.0, 8);
  const GridFunction one = GridFunction::sample(g, [](const Point&) { return 1.0; });
  const EmpiricalMeasure mu({one, 3.0 * one});
  CHECK(mean_capped_norm(mu, 100.0) == doctest::Approx(2.0 * l2_norm(one)));
  CHECK(mean_capped_norm(mu, 0.5) == doctest::Approx(0.5));

  const std::vector<double> t{0.0, 0.5, 1.0}, w{1.0, 3.0, 4.0};
  CHECK(weighted_sup(t, w, 0.0) == 4.0);
  CHECK(weighted_sup(t, w, 2.0) == doctest::Approx(std::max({1.0, 3.0 * std::exp(-1.0), 4.0 * std::exp(-2.0)})));

  const MeasureFlow a = MeasureFlow::constant(t, EmpiricalMeasure::dirac(one));
  const MeasureFlow b = MeasureFlow::constant(t, EmpiricalMeasure::dirac(3.0 * one));
  const auto pw = pointwise_wasserstein2(a, b);
  for (double x : pw) CHECK(x == doctest::Approx(2.0 * l2_norm(one)));
  CHECK(flow_distance(a, b, 1.0) == doctest::Approx(2.0 * l2_norm(one)));
}
