#include "mvlab/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mvlab/rng.hpp"

namespace mvlab {

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("time.horizon must be positive");
  if (steps < 1) throw ParameterError("time.steps must be >= 1");
}

std::vector<double> TimeGrid::nodes() const {
  std::vector<double> out(std::size_t(steps_) + 1);
  for (int s = 0; s <= steps_; ++s) out[std::size_t(s)] = node(s);
  return out;
}

Model::Model(const SpatialGrid& grid, FractionalOrder alpha, CoefficientSet coefficients, double c_v)
    : alpha_(alpha), c_v_(c_v), coeffs_(std::move(coefficients), grid) {
  if (!(c_v > 0.0)) throw ParameterError("grid.c_v must be positive");
}

NoisePath NoisePath::generate(std::uint64_t seed, std::uint64_t stream, const TimeGrid& tgrid, std::size_t modes) {
  NoisePath np;
  np.modes_ = modes;
  np.steps_ = tgrid.steps();
  np.values_.resize(std::size_t(tgrid.steps()) * modes);
  const CounterRng rng(derive_key(seed, "noise", stream));
  const double sd = std::sqrt(tgrid.dt());
  for (int s = 0; s < tgrid.steps(); ++s)
    for (std::size_t k = 0; k < modes; ++k) np.values_[std::size_t(s) * modes + k] = sd * rng.normal(std::uint64_t(s), k);
  return np;
}

Control::Control(int steps, std::size_t modes) : Control(steps, modes, std::vector<double>(std::size_t(steps) * modes)) {}

Control::Control(int steps, std::size_t modes, std::vector<double> values)
    : steps_(steps), modes_(modes), values_(std::move(values)) {
  if (steps < 1 || modes < 1) throw ParameterError("control needs at least one step and one mode");
  if (values_.size() != std::size_t(steps) * modes)
    throw DomainError("control matrix must have steps x modes entries");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidFieldError("control has non-finite entries");
}

double Control::squared_norm(double dt) const {
  double acc = 0.0;
  for (double v : values_) acc += v * v;
  return acc * dt;
}

bool Control::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

Control& Control::operator*=(double a) {
  for (double& v : values_) v *= a;
  return *this;
}

Control operator-(Control a, const Control& b) {
  if (a.steps_ != b.steps_ || a.modes_ != b.modes_) throw DomainError("control shapes differ");
  for (std::size_t i = 0; i < a.values_.size(); ++i) a.values_[i] -= b.values_[i];
  return a;
}

GridFunction step_frozen(const Model& model, const GridFunction& u, const EmpiricalMeasure& mu, double t, double dt,
                         double eps, std::span<const double> control, std::span<const double> noise, int step) {
  if (!(dt > 0.0)) throw ParameterError("time step must be positive");
  if (!(eps >= 0.0 && eps < 1.0)) throw ParameterError("noise intensity must lie in [0, 1)");
  const std::size_t modes = model.modes();
  if ((!control.empty() && control.size() != modes) || (!noise.empty() && noise.size() != modes))
    throw DomainError("control/noise vectors must have one entry per noise mode");
  if (!u.all_finite()) throw BlowUpError("non-finite state entering step " + std::to_string(step), step);

  const DiscreteCoefficients& c = model.coefficients();
  GridFunction f(u.grid()), g(u.grid());
  c.drifts(t, u, mu, f, g);
  GridFunction w = u;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double tamed = f[i] / (1.0 + dt * std::abs(f[i]));
    w[i] += dt * (g[i] - tamed);
  }

  const bool has_noise = !noise.empty() && eps > 0.0;
  if (!control.empty() || has_noise) {
    std::vector<double> theta(modes, 0.0);
    bool any = false;
    const double root_eps = std::sqrt(eps);
    for (std::size_t k = 0; k < modes; ++k) {
      if (!control.empty()) theta[k] += dt * control[k];
      if (has_noise) theta[k] += root_eps * noise[k];
      any = any || theta[k] != 0.0;
    }
    if (any) c.add_sigma(t, u, mu, theta, w);
  }
  if (!w.all_finite()) throw BlowUpError("non-finite state at step " + std::to_string(step), step);
  return apply_semigroup_resolvent(w, model.alpha(), dt);
}

namespace {

template <class MeasureAt>
Trajectory integrate(const Model& model, const GridFunction& u0, const TimeGrid& tgrid, double eps,
                     const Control* control, const NoisePath* noise, MeasureAt&& measure_at) {
  if (!(u0.grid() == model.grid())) throw DomainError("initial data lives on a different grid than the model");
  if (control && (control->steps() != tgrid.steps() || control->modes() != model.modes()))
    throw DomainError("control shape does not match time grid and noise modes");
  if (noise && (noise->steps() != tgrid.steps() || noise->modes() != model.modes()))
    throw DomainError("noise path shape does not match time grid and noise modes");

  Trajectory traj{tgrid, {}};
  traj.states.reserve(std::size_t(tgrid.steps()) + 1);
  traj.states.push_back(u0);
  const double dt = tgrid.dt();
  for (int s = 0; s < tgrid.steps(); ++s) {
    const GridFunction& u = traj.states.back();
    const std::span<const double> v = control ? control->row(s) : std::span<const double>{};
    const std::span<const double> dw = noise ? noise->increments(s) : std::span<const double>{};
    traj.states.push_back(step_frozen(model, u, measure_at(s, u), tgrid.node(s), dt, eps, v, dw, s));
  }
  return traj;
}

}  // namespace

Trajectory solve_frozen(const Model& model, const GridFunction& u0, const MeasureFlow& flow, double eps,
                        const Control* control, const NoisePath* noise, const TimeGrid& tgrid) {
  if (flow.times() != tgrid.nodes()) throw DomainError("measure flow is not on the solver time grid");
  return integrate(model, u0, tgrid, eps, control, noise,
                   [&](int s, const GridFunction&) -> const EmpiricalMeasure& { return flow.at(std::size_t(s)); });
}

Trajectory solve_deterministic(const Model& model, const GridFunction& u0, const TimeGrid& tgrid) {
  return integrate(model, u0, tgrid, 0.0, nullptr, nullptr,
                   [](int, const GridFunction& u) { return EmpiricalMeasure::dirac(u); });
}

Trajectory solve_controlled(const Model& model, const GridFunction& u0, const Control& v,
                            const Trajectory& deterministic, const TimeGrid& tgrid) {
  if (!(deterministic.tgrid == tgrid)) throw DomainError("deterministic trajectory is on a different time grid");
  if (!(deterministic.at(0).grid() == model.grid())) throw DomainError("deterministic trajectory grid mismatch");
  return integrate(model, u0, tgrid, 0.0, &v, nullptr,
                   [&](int s, const GridFunction&) { return EmpiricalMeasure::dirac(deterministic.at(s)); });
}

std::vector<double> energy_residual(const Model& model, const Trajectory& traj, const Control* control,
                                    const Trajectory* reference) {
  const int steps = traj.tgrid.steps();
  const double dt = traj.tgrid.dt();
  if (reference && !(reference->tgrid == traj.tgrid)) throw DomainError("reference trajectory time grid mismatch");
  if (control && (control->steps() != steps || control->modes() != model.modes()))
    throw DomainError("control shape mismatch in energy residual");

  const DiscreteCoefficients& c = model.coefficients();
  const SpatialGrid& grid = model.grid();
  const auto law = [&](int s) { return EmpiricalMeasure::dirac(reference ? reference->at(s) : traj.at(s)); };

  // Node integrands D_s, F_s - G_s.
  std::vector<double> dissipation(std::size_t(steps) + 1), reaction(std::size_t(steps) + 1);
  GridFunction f(grid), g(grid);
  for (int s = 0; s <= steps; ++s) {
    const GridFunction& u = traj.at(s);
    const double semi = h_alpha_seminorm(u, model.alpha());
    dissipation[std::size_t(s)] = semi * semi;
    c.drifts(traj.tgrid.node(s), u, law(s), f, g);
    reaction[std::size_t(s)] = inner(f, u) - inner(g, u);
  }

  const double u0_sq = l2_norm_sq(traj.at(0));
  const double scale = u0_sq + 1.0;
  std::vector<double> out(std::size_t(steps) + 1, 0.0);
  double integral = 0.0;
  for (int s = 0; s < steps; ++s) {
    const auto a = std::size_t(s), b = a + 1;
    integral += 0.5 * dt * 2.0 * (dissipation[a] + dissipation[b] + reaction[a] + reaction[b]);
    if (control) {
      const auto v = control->row(s);
      GridFunction left(grid), right(grid);
      c.add_sigma(traj.tgrid.node(s), traj.at(s), law(s), v, left);
      c.add_sigma(traj.tgrid.node(s + 1), traj.at(s + 1), law(s + 1), v, right);
      integral -= 0.5 * dt * 2.0 * (inner(left, traj.at(s)) + inner(right, traj.at(s + 1)));
    }
    out[b] = (l2_norm_sq(traj.at(s + 1)) - u0_sq + integral) / scale;
  }
  return out;
}

double max_abs(std::span<const double> xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::abs(x));
  return m;
}

double a_priori_functional(const Model& model, const Trajectory& traj) {
  const double dt = traj.tgrid.dt();
  const double p = model.set().f.p;
  double sup = 0.0, v_int = 0.0, p_int = 0.0;
  for (std::size_t s = 0; s < traj.states.size(); ++s) {
    const GridFunction& u = traj.states[s];
    sup = std::max(sup, l2_norm_sq(u));
    if (s == 0) continue;
    const double vn = v_norm(u, model.alpha(), model.c_v());
    v_int += dt * vn * vn;
    p_int += dt * lp_norm_pow(u, p);
  }
  return sup + v_int + p_int;
}

double sup_distance_sq(const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size()) throw DomainError("trajectories have different lengths");
  double m = 0.0;
  for (std::size_t s = 0; s < a.states.size(); ++s) m = std::max(m, l2_norm_sq(a.states[s] - b.states[s]));
  return m;
}

double l2v_distance_sq(const Model& model, const Trajectory& a, const Trajectory& b) {
  if (a.states.size() != b.states.size()) throw DomainError("trajectories have different lengths");
  const double dt = a.tgrid.dt();
  double acc = 0.0;
  for (std::size_t s = 1; s < a.states.size(); ++s) {
    const double vn = v_norm(a.states[s] - b.states[s], model.alpha(), model.c_v());
    acc += dt * vn * vn;
  }
  return acc;
}

double lp_distance_pow(const Trajectory& a, const Trajectory& b, double p) {
  if (a.states.size() != b.states.size()) throw DomainError("trajectories have different lengths");
  const double dt = a.tgrid.dt();
  double acc = 0.0;
  for (std::size_t s = 1; s < a.states.size(); ++s) acc += dt * lp_norm_pow(a.states[s] - b.states[s], p);
  return acc;
}

}  // namespace mvlab
