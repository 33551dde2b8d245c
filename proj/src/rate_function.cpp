#include "mvlab/rate_function.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mvlab/parallel.hpp"

namespace mvlab {

double control_cost(const Control& v, double dt) { return 0.5 * v.squared_norm(dt); }

RateTarget::RateTarget(Kind kind, std::optional<Trajectory> path, std::optional<GridFunction> end)
    : kind_(kind), path_(std::move(path)), end_(std::move(end)) {}

RateTarget RateTarget::path(Trajectory phi) {
  if (phi.states.empty()) throw DomainError("target trajectory is empty");
  return RateTarget(Kind::trajectory, std::move(phi), std::nullopt);
}

RateTarget RateTarget::endpoint(GridFunction phi_T) { return RateTarget(Kind::terminal, std::nullopt, std::move(phi_T)); }

const Trajectory& RateTarget::trajectory() const {
  if (!path_) throw DomainError("rate target is terminal-only");
  return *path_;
}

const GridFunction& RateTarget::terminal() const { return path_ ? path_->terminal() : *end_; }

double RateTarget::distance_sq(const Trajectory& u) const {
  if (kind_ == Kind::terminal) return l2_norm_sq(u.terminal() - *end_);
  const Trajectory& phi = *path_;
  if (phi.states.size() != u.states.size()) throw DomainError("target and solution have different node counts");
  const double dt = u.tgrid.dt();
  double acc = 0.0;
  for (std::size_t s = 1; s < u.states.size(); ++s) acc += dt * l2_norm_sq(u.states[s] - phi.states[s]);
  return acc + l2_norm_sq(u.terminal() - phi.terminal());
}

void RateTarget::validate(const SpatialGrid& grid, const TimeGrid& tgrid) const {
  if (!(terminal().grid() == grid)) throw DomainError("rate target is not on the solver grid");
  if (path_) {
    if (!(path_->tgrid == tgrid) || path_->states.size() != std::size_t(tgrid.steps()) + 1)
      throw DomainError("rate target trajectory is not on the solver time grid");
    for (const auto& s : path_->states) {
      if (!(s.grid() == grid)) throw DomainError("rate target is not on the solver grid");
      require_finite(s, "rate target");
    }
  } else {
    require_finite(*end_, "rate target");
  }
}

void RateProblem::validate() const {
  if (eta_ladder.empty()) throw ParameterError("rate.eta_ladder must not be empty");
  for (std::size_t i = 0; i < eta_ladder.size(); ++i) {
    if (!(eta_ladder[i] > 0.0)) throw ParameterError("rate.eta_ladder entries must be positive");
    if (i > 0 && !(eta_ladder[i] < eta_ladder[i - 1])) throw ParameterError("rate.eta_ladder must be decreasing");
  }
  if (budget < 1) throw ParameterError("rate.budget must be >= 1");
  if (!(gap_threshold > 0.0)) throw ParameterError("rate.gap_threshold must be positive");
  if (max_iters_per_stage < 1) throw ParameterError("rate.max_iters_per_stage must be >= 1");
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Maps a control vector to the distance residual d(v), with ||d||^2 = dist(u_v, phi)^2.
class DistanceResidual {
 public:
  DistanceResidual(const Model& model, const GridFunction& u0, const Trajectory& det, const RateTarget& target)
      : model_(model), u0_(u0), det_(det), target_(target) {
    const std::size_t m = model.grid().size();
    const std::size_t nodes = target.kind() == RateTarget::Kind::trajectory ? std::size_t(det.tgrid.steps()) + 1 : 1;
    rows_ = nodes * m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t params() const noexcept { return std::size_t(det_.tgrid.steps()) * model_.modes(); }

  Control control(const VectorXd& x) const {
    return Control(det_.tgrid.steps(), model_.modes(), std::vector<double>(x.data(), x.data() + x.size()));
  }

  VectorXd operator()(const VectorXd& x) const {
    const Trajectory u = solve_controlled(model_, u0_, control(x), det_, det_.tgrid);
    const double dx = model_.grid().cell_volume();
    const std::size_t m = model_.grid().size();
    VectorXd r(rows_);
    if (target_.kind() == RateTarget::Kind::terminal) {
      const GridFunction diff = u.terminal() - target_.terminal();
      for (std::size_t i = 0; i < m; ++i) r[Eigen::Index(i)] = std::sqrt(dx) * diff[i];
      return r;
    }
    const Trajectory& phi = target_.trajectory();
    const double w = std::sqrt(det_.tgrid.dt() * dx);
    const int steps = det_.tgrid.steps();
    for (int s = 1; s <= steps; ++s) {
      const GridFunction diff = u.at(s) - phi.at(s);
      for (std::size_t i = 0; i < m; ++i) r[Eigen::Index(std::size_t(s - 1) * m + i)] = w * diff[i];
    }
    const GridFunction diff = u.terminal() - phi.terminal();
    for (std::size_t i = 0; i < m; ++i) r[Eigen::Index(std::size_t(steps) * m + i)] = std::sqrt(dx) * diff[i];
    return r;
  }

 private:
  const Model& model_;
  const GridFunction& u0_;
  const Trajectory& det_;
  const RateTarget& target_;
  std::size_t rows_ = 0;
};

struct StageResult {
  VectorXd x;
  VectorXd d;
  int iterations = 0;
  bool budget_exhausted = false;
};

double objective(const VectorXd& x, const VectorXd& d, double dt, double eta) {
  return 0.5 * dt * x.squaredNorm() + 0.5 * d.squaredNorm() / eta;
}

StageResult lm_stage(const DistanceResidual& residual, VectorXd x, VectorXd d, double dt, double eta,
                     const RateProblem& problem, int& evaluations) {
  const Eigen::Index n = x.size();
  StageResult out;
  double J = objective(x, d, dt, eta);
  double mu = 1e-3;
  const double h0 = std::sqrt(std::numeric_limits<double>::epsilon());

  for (int iter = 0; iter < problem.max_iters_per_stage; ++iter) {
    if (evaluations + n + 1 > problem.budget) {
      out.budget_exhausted = true;
      break;
    }
    MatrixXd D(d.size(), n);
    std::vector<VectorXd> columns(static_cast<std::size_t>(n));
    std::vector<double> steps(static_cast<std::size_t>(n));
    parallel_for(std::size_t(n), problem.threads, [&](std::size_t j) {
      VectorXd xp = x;
      const double h = h0 * std::max(1.0, std::abs(x[Eigen::Index(j)]));
      xp[Eigen::Index(j)] += h;
      steps[j] = xp[Eigen::Index(j)] - x[Eigen::Index(j)];
      columns[j] = residual(xp);
    });
    evaluations += int(n);
    for (Eigen::Index j = 0; j < n; ++j) D.col(j) = (columns[std::size_t(j)] - d) / steps[std::size_t(j)];

    MatrixXd A = D.transpose() * D / eta;
    A.diagonal().array() += dt;
    const VectorXd grad = D.transpose() * d / eta + dt * x;
    if (grad.norm() <= 1e-15 * (1.0 + std::abs(J))) break;

    bool accepted = false;
    double J_new = J;
    for (int trial = 0; trial < 12 && evaluations < problem.budget; ++trial) {
      MatrixXd damped = A;
      damped.diagonal() += mu * A.diagonal();
      const VectorXd delta = damped.ldlt().solve(-grad);
      const VectorXd x_new = x + delta;
      VectorXd d_new;
      try {
        d_new = residual(x_new);
      } catch (const BlowUpError&) {
        ++evaluations;
        mu *= 4.0;
        continue;
      }
      ++evaluations;
      J_new = objective(x_new, d_new, dt, eta);
      if (J_new < J) {
        x = x_new;
        d = std::move(d_new);
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    out.iterations = iter + 1;
    if (!accepted) break;
    const double decrease = J - J_new;
    J = J_new;
    if (decrease <= 1e-12 * J) break;
  }
  out.x = std::move(x);
  out.d = std::move(d);
  return out;
}

}  // namespace

RateEstimate estimate_rate(const Model& model, const GridFunction& u0, const Trajectory& deterministic,
                           const RateProblem& problem) {
  problem.validate();
  const TimeGrid& tgrid = deterministic.tgrid;
  problem.target.validate(model.grid(), tgrid);
  const double dt = tgrid.dt();
  const DistanceResidual residual(model, u0, deterministic, problem.target);

  RateEstimate est{0.0, Control(tgrid.steps(), model.modes()), 0.0, 0.0, 0.0, false, 0, {}};
  est.initial_gap = std::sqrt(problem.target.distance_sq(deterministic));

  VectorXd x = VectorXd::Zero(Eigen::Index(residual.params()));
  VectorXd d = residual(x);
  est.evaluations = 1;

  for (double eta : problem.eta_ladder) {
    StageResult stage = lm_stage(residual, x, d, dt, eta, problem, est.evaluations);
    x = std::move(stage.x);
    d = std::move(stage.d);
    est.stages.push_back({eta, 0.5 * dt * x.squaredNorm(), d.norm(), objective(x, d, dt, eta), stage.iterations});
    if (stage.budget_exhausted) break;
  }

  est.v_star = residual.control(x);
  est.value = control_cost(est.v_star, dt);
  est.gap = d.norm();
  est.relative_gap = est.initial_gap > 0.0 ? est.gap / est.initial_gap : est.gap;
  est.converged = est.relative_gap <= problem.gap_threshold;
  return est;
}

Control oscillatory_control(const TimeGrid& tgrid, std::size_t modes, std::size_t k, double amplitude,
                            double frequency) {
  if (k >= modes) throw DomainError("oscillation mode index out of range");
  Control v(tgrid.steps(), modes);
  const double dt = tgrid.dt();
  for (int s = 0; s < tgrid.steps(); ++s) {
    const double a = tgrid.node(s), b = tgrid.node(s + 1);
    v.at(s, k) = frequency == 0.0 ? 0.0
                                  : amplitude * (std::cos(frequency * a) - std::cos(frequency * b)) / (frequency * dt);
  }
  return v;
}

WeakConvergenceTable weak_convergence_experiment(const Model& model, const GridFunction& u0,
                                                 const Trajectory& deterministic, const Control& v, std::size_t mode,
                                                 double amplitude, const std::vector<double>& frequencies,
                                                 int threads) {
  const TimeGrid& tgrid = deterministic.tgrid;
  const double dt = tgrid.dt();
  const double p = model.set().f.p;
  const Trajectory base = solve_controlled(model, u0, v, deterministic, tgrid);

  WeakConvergenceTable table;
  table.base_norm = std::sqrt(v.squared_norm(dt));
  table.rows.resize(frequencies.size());
  parallel_for(frequencies.size(), threads, [&](std::size_t j) {
    const double freq = frequencies[j];
    Control offset = oscillatory_control(tgrid, model.modes(), mode, amplitude, freq);
    Control vi = v;
    for (std::size_t e = 0; e < vi.values().size(); ++e) vi.values()[e] += offset.values()[e];
    const Trajectory ui = solve_controlled(model, u0, vi, deterministic, tgrid);
    WeakConvergenceRow& row = table.rows[j];
    row.frequency = freq;
    row.sup_h = std::sqrt(sup_distance_sq(ui, base));
    row.l2_v = std::sqrt(l2v_distance_sq(model, ui, base));
    row.lp = std::pow(lp_distance_pow(ui, base, p), 1.0 / p);
    row.control_norm = std::sqrt(vi.squared_norm(dt));
    row.offset_norm = std::sqrt(offset.squared_norm(dt));
  });
  double env = 0.0;
  for (std::size_t j = table.rows.size(); j-- > 0;) {
    env = std::max(env, table.rows[j].sup_h);
    table.rows[j].envelope = env;
  }
  return table;
}

std::vector<LevelSetEntry> level_set_probe(const Model& model, const GridFunction& u0, const Trajectory& deterministic,
                                           double level, const std::vector<LevelSetCandidate>& candidates,
                                           const RateProblem& settings) {
  std::vector<LevelSetEntry> out;
  out.reserve(candidates.size());
  for (const auto& cand : candidates) {
    RateProblem problem = settings;
    problem.target = cand.target;
    const RateEstimate est = estimate_rate(model, u0, deterministic, problem);
    out.push_back({cand.name, est.value, est.relative_gap, est.converged, est.converged && est.value <= level});
  }
  return out;
}

}  // namespace mvlab
