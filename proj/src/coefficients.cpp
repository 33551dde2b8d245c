#include "mvlab/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mvlab/rng.hpp"

namespace mvlab {

namespace {

double signed_power(double u, int p) {
  // |u|^{p-2} u for even p
  double m = 1.0;
  for (int i = 0; i < p - 2; ++i) m *= u;
  return m * u;
}

double sqrt_m2(const EmpiricalMeasure& mu) { return std::sqrt(second_moment(mu)); }

void require_theta(const NoiseSigma& s, std::span<const double> theta) {
  if (theta.size() != s.modes())
    throw DomainError("noise coefficient vector has length " + std::to_string(theta.size()) + ", expected " +
                      std::to_string(s.modes()));
}

}  // namespace

void CoefficientSet::validate() const {
  if (f.p < 2 || f.p % 2 != 0) throw ParameterError("drift_f.p must be an even integer >= 2");
  if (!std::isfinite(f.lambda_f)) throw ParameterError("drift_f.lambda must be finite");
  if (!(f.h_cap > 0.0)) throw ParameterError("drift_f.h_cap must be positive");
  f.phi.validate("drift_f.phi");
  g.psi_g.validate("drift_g.psi");
  for (double c : {g.c0, g.c1, g.c2})
    if (!std::isfinite(c)) throw ParameterError("drift_g coefficients must be finite");
  const std::size_t k = sigma.modes();
  if (k == 0) throw ParameterError("noise.modes must be >= 1");
  if (sigma.beta.size() != k || sigma.gamma.size() != k)
    throw ParameterError("noise.beta and noise.gamma need one entry per mode");
  for (std::size_t i = 0; i < k; ++i) {
    if (!(sigma.beta[i] >= 0.0) || !(sigma.gamma[i] >= 0.0))
      throw ParameterError("noise.beta and noise.gamma must be nonnegative");
    sigma.sigma1[i].validate("noise.sigma1[" + std::to_string(i) + "]");
  }
  sigma.kappa.validate("noise.kappa");
}

bool CoefficientSet::measure_dependent() const noexcept {
  if (!f.phi.is_zero()) return true;
  if (!g.psi_g.is_zero() && g.c2 != 0.0) return true;
  if (!sigma.kappa.is_zero())
    for (double b : sigma.beta)
      if (b != 0.0) return true;
  return false;
}

double f_value(const DriftF& f, double t, const Point& x, double u, const EmpiricalMeasure& mu) {
  return f.lambda_f * signed_power(u, f.p) + f.phi(t, x) * mean_capped_norm(mu, f.h_cap);
}

double g_value(const DriftG& g, double t, const Point& x, double u, const EmpiricalMeasure& mu) {
  return g.psi_g(t, x) * (g.c0 + g.c1 * std::tanh(u) + g.c2 * mean_capped_norm(mu, 1.0));
}

double sigma2_value(const NoiseSigma& s, std::size_t k, double u, const EmpiricalMeasure& mu) {
  return s.beta.at(k) * sqrt_m2(mu) + s.gamma.at(k) * u;
}

GridFunction eval_f(const DriftF& f, double t, const GridFunction& u, const EmpiricalMeasure& mu) {
  require_finite(u, "eval_f");
  const SpatialGrid& grid = u.grid();
  const double hbar = mean_capped_norm(mu, f.h_cap);
  GridFunction out(grid);
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = f.lambda_f * signed_power(u[i], f.p) + (f.phi.is_zero() ? 0.0 : f.phi(t, grid.point(i)) * hbar);
  return out;
}

GridFunction eval_g(const DriftG& g, double t, const GridFunction& u, const EmpiricalMeasure& mu) {
  require_finite(u, "eval_g");
  const SpatialGrid& grid = u.grid();
  GridFunction out(grid);
  if (g.psi_g.is_zero()) return out;
  const double hbar1 = mean_capped_norm(mu, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = g.psi_g(t, grid.point(i)) * (g.c0 + g.c1 * std::tanh(u[i]) + g.c2 * hbar1);
  return out;
}

GridFunction apply_sigma(const NoiseSigma& s, double t, const GridFunction& u, const EmpiricalMeasure& mu,
                         std::span<const double> theta) {
  require_theta(s, theta);
  const SpatialGrid& grid = u.grid();
  const double root_m2 = sqrt_m2(mu);
  GridFunction out(grid);
  for (std::size_t k = 0; k < s.modes(); ++k) {
    if (theta[k] == 0.0) continue;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Point x = grid.point(i);
      const double s2 = s.beta[k] * root_m2 + s.gamma[k] * u[i];
      out[i] += (s.sigma1[k](t, x) + s.kappa(t, x) * s2) * theta[k];
    }
  }
  return out;
}

double hs_norm_sq(const NoiseSigma& s, double t, const GridFunction& u, const EmpiricalMeasure& mu) {
  const SpatialGrid& grid = u.grid();
  const double root_m2 = sqrt_m2(mu);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.modes(); ++k) {
    double mode = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const Point x = grid.point(i);
      const double v = s.sigma1[k](t, x) + s.kappa(t, x) * (s.beta[k] * root_m2 + s.gamma[k] * u[i]);
      mode += v * v;
    }
    acc += mode * grid.cell_volume();
  }
  return acc;
}

double hs_bound_constant(const NoiseSigma& s, const SpatialGrid& grid, double horizon) {
  double sigma1_sup = 0.0;
  for (double t : {0.0, horizon}) {
    double acc = 0.0;
    for (const auto& field : s.sigma1) acc += l2_norm_sq(field.sample(grid, t));
    sigma1_sup = std::max(sigma1_sup, acc);
  }
  double beta_sq = 0.0, gamma_sq = 0.0;
  for (double b : s.beta) beta_sq += b * b;
  for (double g : s.gamma) gamma_sq += g * g;
  const double kappa_l2_sq = l2_norm_sq(s.kappa.sample(grid, 0.0));
  const double kappa_inf = s.kappa.sup_abs(grid, horizon);
  return 2.0 * sigma1_sup + 8.0 * kappa_l2_sq * beta_sq + 4.0 * kappa_inf * kappa_inf * gamma_sq;
}

double sigma_lipschitz_constant(const NoiseSigma& s, const SpatialGrid& grid) {
  double lsum = 0.0;
  for (std::size_t k = 0; k < s.modes(); ++k) lsum += s.mode_lipschitz(k) * s.mode_lipschitz(k);
  const double kappa_inf = s.kappa.sup_abs(grid, 0.0);
  const double kappa_l2_sq = l2_norm_sq(s.kappa.sample(grid, 0.0));
  return 2.0 * lsum * (kappa_inf * kappa_inf + kappa_l2_sq);
}

// ---------------------------------------------------------------------------

DiscreteCoefficients::DiscreteCoefficients(CoefficientSet set, const SpatialGrid& grid)
    : set_(std::move(set)), grid_(grid) {
  set_.validate();
  phi_ = sample(set_.f.phi);
  psi_g_ = sample(set_.g.psi_g);
  kappa_ = sample(set_.sigma.kappa);
  for (const auto& field : set_.sigma.sigma1) sigma1_.push_back(sample(field));
}

DiscreteCoefficients::Profile DiscreteCoefficients::sample(const SpaceTimeField& field) const {
  Profile p;
  p.zero = field.is_zero();
  p.scales_with_time = field.is_time_dependent();
  if (!p.zero) {
    const GridFunction g = field.sample(grid_, 0.0);
    p.values.assign(g.values().begin(), g.values().end());
  }
  return p;
}

void DiscreteCoefficients::drifts(double t, const GridFunction& u, const EmpiricalMeasure& mu,
                                  GridFunction& f_out, GridFunction& g_out) const {
  const DriftF& f = set_.f;
  const DriftG& g = set_.g;
  const double phi_scale = phi_.zero ? 0.0 : phi_.factor(t) * mean_capped_norm(mu, f.h_cap);
  const double psi_scale = psi_g_.factor(t);
  const double g_const = psi_g_.zero ? 0.0 : g.c0 + g.c2 * mean_capped_norm(mu, 1.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ui = u[i];
    f_out[i] = f.lambda_f * signed_power(ui, f.p) + (phi_.zero ? 0.0 : phi_scale * phi_.values[i]);
    g_out[i] = psi_g_.zero ? 0.0 : psi_scale * psi_g_.values[i] * (g_const + g.c1 * std::tanh(ui));
  }
}

void DiscreteCoefficients::add_sigma(double t, const GridFunction& u, const EmpiricalMeasure& mu,
                                     std::span<const double> theta, GridFunction& out) const {
  const NoiseSigma& s = set_.sigma;
  require_theta(s, theta);
  double beta_theta = 0.0, gamma_theta = 0.0;
  for (std::size_t k = 0; k < s.modes(); ++k) {
    beta_theta += s.beta[k] * theta[k];
    gamma_theta += s.gamma[k] * theta[k];
    const Profile& p = sigma1_[k];
    if (p.zero || theta[k] == 0.0) continue;
    const double scale = p.factor(t) * theta[k];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += scale * p.values[i];
  }
  if (kappa_.zero || (beta_theta == 0.0 && gamma_theta == 0.0)) return;
  const double kappa_scale = kappa_.factor(t);
  const double shift = beta_theta * sqrt_m2(mu);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] += kappa_scale * kappa_.values[i] * (shift + gamma_theta * u[i]);
}

// ---------------------------------------------------------------------------

StructuralConstants structural_constants(const CoefficientSet& c, const SpatialGrid& grid, double horizon) {
  StructuralConstants sc;
  const double lam = std::abs(c.f.lambda_f);
  sc.p = c.f.p;
  sc.lambda1 = lam;
  // |a|^{p-2}a - |b|^{p-2}b <= (p-1)(|a|^{p-2} + |b|^{p-2})|a-b| by the mean value theorem.
  sc.lambda2 = lam * (c.f.p - 1);
  sc.lambda3 = lam;
  // (|a|^{q-1}a - |b|^{q-1}b)(a-b) >= 2^{1-q}|a-b|^{q+1} with q = p-1.
  sc.lambda4 = lam * std::pow(2.0, 2.0 - c.f.p);
  for (std::size_t k = 0; k < c.sigma.modes(); ++k) sc.mode_lipschitz.push_back(c.sigma.mode_lipschitz(k));
  sc.hs_bound = hs_bound_constant(c.sigma, grid, horizon);
  sc.sigma_lipschitz = sigma_lipschitz_constant(c.sigma, grid);
  return sc;
}

PsiWeights psi_weights(const CoefficientSet& c, double t, const Point& x) {
  PsiWeights w;
  const double phi = std::abs(c.f.phi(t, x));
  w.psi1 = phi * c.f.h_cap;
  w.psi2 = 0.0;
  w.psi3 = phi;
  w.psi4 = 0.0;
  w.psi5 = 0.0;
  w.psi_g = std::abs(c.g.psi_g(t, x)) * std::max(1.0, std::abs(c.g.c0));
  return w;
}

bool ConditionReport::all_passed() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.passed; });
}

std::vector<std::string> ConditionReport::violations() const {
  std::vector<std::string> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c.clause + ":" + c.id);
  return out;
}

namespace {

class Auditor {
 public:
  Auditor(const SpatialGrid& grid, double horizon, std::uint64_t seed)
      : grid_(grid), horizon_(horizon), rng_(derive_key(seed, "condition-audit", 0)) {}

  double uniform() { return rng_.uniform(counter_++, 0); }
  double normal() { return rng_.normal(counter_++, 1); }

  double time() { return horizon_ * uniform(); }
  Point point() { return grid_.point(std::size_t(uniform() * double(grid_.size())) % grid_.size()); }

  /// Signed log-uniform scalar over [1e-3, 1e2], exactly 0 one time in eight.
  double scalar() {
    if (uniform() < 0.125) return 0.0;
    const double mag = std::pow(10.0, -3.0 + 5.0 * uniform());
    return uniform() < 0.5 ? -mag : mag;
  }

  /// A second scalar near the first, occasionally far.
  double near(double u) {
    const double mag = std::pow(10.0, -6.0 + 7.0 * uniform());
    return u + (uniform() < 0.5 ? -mag : mag);
  }

  GridFunction field() {
    const double half = grid_.half_width();
    const double scale = std::pow(10.0, -2.0 + 3.0 * uniform());
    GridFunction out(grid_);
    for (int b = 0; b < 3; ++b) {
      const Point c{half * (uniform() - 0.5), grid_.dim() == 2 ? half * (uniform() - 0.5) : 0.0};
      const double w = 0.5 + 2.0 * uniform();
      out += SpaceTimeField::gaussian(scale * normal(), w, c).sample(grid_, 0.0);
    }
    return out;
  }

  EmpiricalMeasure measure(std::size_t n) {
    std::vector<GridFunction> ps;
    for (std::size_t i = 0; i < n; ++i) ps.push_back(field());
    return EmpiricalMeasure(std::move(ps));
  }

  /// A measure close to mu (small perturbation of every atom) or an independent one.
  EmpiricalMeasure partner(const EmpiricalMeasure& mu) {
    if (uniform() < 0.5) return measure(mu.size());
    std::vector<GridFunction> ps;
    const double eps = std::pow(10.0, -4.0 + 3.0 * uniform());
    for (const auto& p : mu.particles()) {
      GridFunction q = p;
      q.axpy(eps, field());
      ps.push_back(std::move(q));
    }
    return EmpiricalMeasure(std::move(ps));
  }

  std::size_t particle_count() { return 1 + std::size_t(uniform() * 4.0) % 4; }

 private:
  const SpatialGrid& grid_;
  double horizon_;
  CounterRng rng_;
  std::uint64_t counter_ = 0;
};

struct Tally {
  ConditionCheck check;
  void record(double lhs, double rhs) {
    const double slack = (rhs - lhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (check.draws == 0 || slack < check.worst_slack) check.worst_slack = slack;
    ++check.draws;
    if (!(slack >= -kConditionSlackTolerance)) check.passed = false;
  }
};

}  // namespace

ConditionReport verify_conditions(const CoefficientSet& c, const SpatialGrid& grid, double horizon,
                                  int sample_budget, std::uint64_t seed, bool strong_dissipativity) {
  if (sample_budget < 1) throw ParameterError("sample_budget must be >= 1");
  c.validate();
  const StructuralConstants sc = structural_constants(c, grid, horizon);
  const int p = c.f.p;

  std::vector<Tally> tallies;
  auto make = [&](const char* id, const char* clause, const char* ineq) -> std::size_t {
    tallies.push_back({ConditionCheck{id, clause, ineq, 0.0, 0, true}});
    return tallies.size() - 1;
  };
  const auto f_coercive = make("f-coercivity", "Sigma1", "f(u)u >= l1|u|^p - psi1(1+|u|^2+mu(|.|^2))");
  const auto f_lip = make("f-lipschitz", "Sigma1",
                          "|f(u1,m1)-f(u2,m2)| <= l2(psi2+|u1|^{p-2}+|u2|^{p-2})|u1-u2| + psi3 W2(m1,m2)");
  const auto f_growth = make("f-growth", "Sigma1", "|f(u,m)| <= l3|u|^{p-1} + psi3(1+sqrt(mu(|.|^2)))");
  const auto f_mono = make("f-derivative", "Sigma1", "df/du >= -psi4");
  const auto h_lip = make("hbar-lipschitz", "Sigma1", "|hbar(m1)-hbar(m2)| <= W2(m1,m2)");
  const auto g_origin = make("g-origin", "Sigma2", "|g(t,x,0,delta0)| <= psi_g");
  const auto g_lip = make("g-lipschitz", "Sigma2", "|g(u1,m1)-g(u2,m2)| <= psi_g(|u1-u2| + W2(m1,m2))");
  const auto g_growth = make("g-growth", "Sigma2", "|g(u,m)| <= psi_g(1+|u|+sqrt(mu(|.|^2)))");
  const auto s_growth = make("sigma2-growth", "Sigma3", "|sigma2_k(s,m)| <= beta_k(1+sqrt(mu(|.|^2))) + gamma_k|s|");
  const auto s_lip = make("sigma2-lipschitz", "Sigma3", "|sigma2_k(s1,m1)-sigma2_k(s2,m2)| <= L_k(|s1-s2| + W2)");
  const auto hs_bound = make("hs-bound", "Sigma3", "||sigma(t,u,m)||_HS^2 <= M_sigma(1+||u||^2+mu(|.|^2))");
  const auto hs_lip = make("hs-lipschitz", "Sigma3", "||sigma(u1,m1)-sigma(u2,m2)||_HS^2 <= L_sigma(||u1-u2||^2+W2^2)");
  std::size_t strong = 0;
  if (strong_dissipativity)
    strong = make("f-strong-dissipativity", "strong-dissipativity",
                  "(f(u1)-f(u2))(u1-u2) >= l4|u1-u2|^p - psi5|u1-u2|^2");

  Auditor a(grid, horizon, seed);
  const EmpiricalMeasure dirac0 = EmpiricalMeasure::dirac(GridFunction(grid));
  const std::size_t modes = c.sigma.modes();
  std::vector<double> unit(modes, 0.0);

  for (int d = 0; d < sample_budget; ++d) {
    const double t = a.time();
    const Point x = a.point();
    const double u1 = a.scalar();
    const double u2 = a.uniform() < 0.7 ? a.near(u1) : a.scalar();
    const std::size_t n = a.particle_count();
    const EmpiricalMeasure m1 = a.measure(n);
    const EmpiricalMeasure m2 = a.partner(m1);
    const double w2 = wasserstein2(m1, m2);
    const double m2_1 = second_moment(m1);
    const PsiWeights psi = psi_weights(c, t, x);
    const double du = std::abs(u1 - u2);

    const double f1 = f_value(c.f, t, x, u1, m1);
    const double f2 = f_value(c.f, t, x, u2, m2);

    tallies[f_coercive].record(sc.lambda1 * std::pow(std::abs(u1), p) - psi.psi1 * (1.0 + u1 * u1 + m2_1),
                               f1 * u1);
    tallies[f_lip].record(std::abs(f1 - f2),
                          sc.lambda2 * (psi.psi2 + std::pow(std::abs(u1), p - 2) + std::pow(std::abs(u2), p - 2)) * du +
                              psi.psi3 * w2);
    tallies[f_growth].record(std::abs(f1), sc.lambda3 * std::pow(std::abs(u1), p - 1) + psi.psi3 * (1.0 + std::sqrt(m2_1)));
    {
      const double h = 1e-6 * std::max(1.0, std::abs(u1));
      const double deriv = (f_value(c.f, t, x, u1 + h, m1) - f_value(c.f, t, x, u1 - h, m1)) / (2.0 * h);
      tallies[f_mono].record(-psi.psi4, deriv);
    }
    tallies[h_lip].record(std::abs(mean_capped_norm(m1, c.f.h_cap) - mean_capped_norm(m2, c.f.h_cap)), w2);

    tallies[g_origin].record(std::abs(g_value(c.g, t, x, 0.0, dirac0)), psi.psi_g);
    const double g1 = g_value(c.g, t, x, u1, m1);
    const double g2 = g_value(c.g, t, x, u2, m2);
    tallies[g_lip].record(std::abs(g1 - g2), psi.psi_g * (du + w2));
    tallies[g_growth].record(std::abs(g1), psi.psi_g * (1.0 + std::abs(u1) + std::sqrt(m2_1)));

    for (std::size_t k = 0; k < modes; ++k) {
      const double s1 = sigma2_value(c.sigma, k, u1, m1);
      const double s2 = sigma2_value(c.sigma, k, u2, m2);
      tallies[s_growth].record(std::abs(s1),
                               c.sigma.beta[k] * (1.0 + std::sqrt(m2_1)) + c.sigma.gamma[k] * std::abs(u1));
      tallies[s_lip].record(std::abs(s1 - s2), sc.mode_lipschitz[k] * (du + w2));
    }

    // Operator-level bounds on whole fields.
    const GridFunction v1 = a.field();
    const GridFunction v2 = a.uniform() < 0.5 ? v1 + 1e-3 * a.field() : a.field();
    tallies[hs_bound].record(hs_norm_sq(c.sigma, t, v1, m1), sc.hs_bound * (1.0 + l2_norm_sq(v1) + m2_1));
    double diff_hs = 0.0;
    for (std::size_t k = 0; k < modes; ++k) {
      std::fill(unit.begin(), unit.end(), 0.0);
      unit[k] = 1.0;
      diff_hs += l2_norm_sq(apply_sigma(c.sigma, t, v1, m1, unit) - apply_sigma(c.sigma, t, v2, m2, unit));
    }
    tallies[hs_lip].record(diff_hs, sc.sigma_lipschitz * (l2_norm_sq(v1 - v2) + w2 * w2));

    if (strong_dissipativity) {
      const double f2_same = f_value(c.f, t, x, u2, m1);
      tallies[strong].record(sc.lambda4 * std::pow(du, p) - psi.psi5 * du * du, (f1 - f2_same) * (u1 - u2));
    }
  }

  ConditionReport report;
  for (auto& tl : tallies) report.checks.push_back(std::move(tl.check));
  return report;
}

}  // namespace mvlab
