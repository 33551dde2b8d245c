#include "mvlab/mckean_vlasov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "mvlab/parallel.hpp"

namespace mvlab {

void PicardConfig::validate() const {
  if (particles < 1) throw ParameterError("picard.particles must be >= 1");
  if (max_iters < 1) throw ParameterError("picard.max_iters must be >= 1");
  if (!(tol > 0.0)) throw ParameterError("picard.tol must be positive");
  if (lambda && !(*lambda >= 0.0)) throw ParameterError("picard.lambda must be nonnegative");
}

PicardNonConvergence::PicardNonConvergence(PicardReport report)
    : Error(ErrorKind::numerical, "Picard iteration did not converge within " + std::to_string(report.iterations) +
                                      " iterations (last distance " +
                                      std::to_string(report.distances.empty() ? 0.0 : report.distances.back()) + ")"),
      report_(std::move(report)) {}

MeasureFlow empirical_flow(const std::vector<Trajectory>& ensemble) {
  if (ensemble.empty()) throw DomainError("empty ensemble");
  const TimeGrid& tgrid = ensemble.front().tgrid;
  std::vector<EmpiricalMeasure> measures;
  measures.reserve(std::size_t(tgrid.steps()) + 1);
  for (int s = 0; s <= tgrid.steps(); ++s) {
    std::vector<GridFunction> atoms;
    atoms.reserve(ensemble.size());
    for (const auto& traj : ensemble) atoms.push_back(traj.at(s));
    measures.emplace_back(std::move(atoms));
  }
  return MeasureFlow(tgrid.nodes(), std::move(measures));
}

MeasureFlow apply_phi(const Model& model, const MeasureFlow& flow, const std::vector<GridFunction>& initial,
                      double eps, const TimeGrid& tgrid, std::uint64_t seed, int threads,
                      std::vector<Trajectory>* ensemble) {
  if (initial.empty()) throw DomainError("apply_phi needs at least one particle");
  std::vector<Trajectory> trajs(initial.size(), Trajectory{tgrid, {}});
  parallel_for(initial.size(), threads, [&](std::size_t i) {
    try {
      if (eps > 0.0) {
        const NoisePath noise = NoisePath::generate(seed, i, tgrid, model.modes());
        trajs[i] = solve_frozen(model, initial[i], flow, eps, nullptr, &noise, tgrid);
      } else {
        trajs[i] = solve_frozen(model, initial[i], flow, eps, nullptr, nullptr, tgrid);
      }
    } catch (const BlowUpError& e) {
      throw BlowUpError("particle " + std::to_string(i) + ": " + e.what(), e.step());
    }
  });
  MeasureFlow out = empirical_flow(trajs);
  if (ensemble) *ensemble = std::move(trajs);
  return out;
}

namespace {

double flow_scale(const MeasureFlow& flow) {
  double m = 0.0;
  for (const auto& mu : flow.measures()) m = std::max(m, std::sqrt(second_moment(mu)));
  return m;
}

std::vector<double> pointwise_w2_parallel(const MeasureFlow& a, const MeasureFlow& b, int threads) {
  if (a.times() != b.times()) throw DomainError("flows live on different time grids");
  std::vector<double> out(a.nodes());
  parallel_for(a.nodes(), threads, [&](std::size_t s) { out[s] = wasserstein2(a.at(s), b.at(s)); });
  return out;
}

std::vector<double> default_lambda_grid(double horizon) {
  std::vector<double> grid{0.0};
  for (int k = -2; k <= 12; ++k) grid.push_back(std::ldexp(1.0, k) / horizon);
  return grid;
}

struct ProbePair {
  std::vector<double> input_w2;
  std::vector<double> output_w2;
};

std::vector<ProbePair> probe_pairs(const Model& model, const std::vector<MeasureFlow>& probes,
                                   const std::vector<GridFunction>& initial, double eps, const TimeGrid& tgrid,
                                   const PicardConfig& cfg) {
  if (probes.size() < 2) throw ParameterError("auto_lambda needs at least two probe flows");
  std::vector<MeasureFlow> images;
  images.reserve(probes.size());
  for (const auto& p : probes) images.push_back(apply_phi(model, p, initial, eps, tgrid, cfg.seed, cfg.threads));
  std::vector<ProbePair> pairs;
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t j = i + 1; j < probes.size(); ++j)
      pairs.push_back({pointwise_w2_parallel(probes[i], probes[j], cfg.threads),
                       pointwise_w2_parallel(images[i], images[j], cfg.threads)});
  return pairs;
}

double max_ratio_at(const std::vector<ProbePair>& pairs, const std::vector<double>& times, double lambda) {
  double worst = 0.0;
  for (const auto& p : pairs) {
    const double den = weighted_sup(times, p.input_w2, lambda);
    if (den <= 10.0 * std::numeric_limits<double>::epsilon()) continue;
    worst = std::max(worst, weighted_sup(times, p.output_w2, lambda) / den);
  }
  return worst;
}

}  // namespace

std::vector<MeasureFlow> default_probe_flows(const Model& model, const std::vector<GridFunction>& initial,
                                             double eps, const TimeGrid& tgrid, const PicardConfig& cfg,
                                             double scale) {
  const auto nodes = tgrid.nodes();
  const EmpiricalMeasure law0(initial);
  std::vector<GridFunction> scaled;
  for (const auto& u : initial) scaled.push_back(scale * u);
  std::vector<MeasureFlow> probes;
  probes.push_back(MeasureFlow::constant(nodes, law0));
  probes.push_back(MeasureFlow::constant(nodes, EmpiricalMeasure(std::move(scaled))));
  probes.push_back(apply_phi(model, probes.front(), initial, eps, tgrid, cfg.seed, cfg.threads));
  return probes;
}

double probe_contraction_ratio(const Model& model, const std::vector<MeasureFlow>& probes,
                               const std::vector<GridFunction>& initial, double eps, const TimeGrid& tgrid,
                               const PicardConfig& cfg, double lambda) {
  const auto pairs = probe_pairs(model, probes, initial, eps, tgrid, cfg);
  return max_ratio_at(pairs, tgrid.nodes(), lambda);
}

LambdaSelection auto_lambda(const Model& model, const std::vector<MeasureFlow>& probes,
                            const std::vector<GridFunction>& initial, double eps, const TimeGrid& tgrid,
                            const PicardConfig& cfg) {
  const auto pairs = probe_pairs(model, probes, initial, eps, tgrid, cfg);
  const auto times = tgrid.nodes();
  LambdaSelection sel;
  sel.grid = default_lambda_grid(tgrid.horizon());
  for (double lam : sel.grid) sel.max_ratio.push_back(max_ratio_at(pairs, times, lam));

  for (std::size_t i = 0; i < sel.grid.size(); ++i) {
    if (sel.max_ratio[i] > kContractionTarget) continue;
    const double doubled = 2.0 * sel.grid[i];
    sel.lambda = max_ratio_at(pairs, times, doubled) <= kContractionTarget ? doubled : sel.grid[i];
    return sel;
  }
  std::string curve;
  for (std::size_t i = 0; i < sel.grid.size(); ++i)
    curve += " (" + std::to_string(sel.grid[i]) + ", " + std::to_string(sel.max_ratio[i]) + ")";
  throw Error(ErrorKind::numerical, "no flow-metric weight reaches contraction ratio 1/2; measured:" + curve);
}

PicardResult picard_solve(const Model& model, const std::vector<GridFunction>& initial, double eps,
                          const TimeGrid& tgrid, const PicardConfig& cfg) {
  cfg.validate();
  if (initial.size() != cfg.particles)
    throw DomainError("initial ensemble has " + std::to_string(initial.size()) + " members, picard.particles is " +
                      std::to_string(cfg.particles));

  MeasureFlow current = MeasureFlow::constant(tgrid.nodes(), EmpiricalMeasure(initial));
  PicardReport report;
  report.tolerance = cfg.tol * (1.0 + flow_scale(current));
  report.lambda = cfg.lambda ? *cfg.lambda
                             : auto_lambda(model, default_probe_flows(model, initial, eps, tgrid, cfg), initial, eps,
                                           tgrid, cfg)
                                   .lambda;

  std::vector<Trajectory> ensemble;
  for (int m = 0; m < cfg.max_iters; ++m) {
    MeasureFlow next = apply_phi(model, current, initial, eps, tgrid, cfg.seed, cfg.threads, &ensemble);
    const double d =
        weighted_sup(tgrid.nodes(), pointwise_w2_parallel(next, current, cfg.threads), report.lambda);
    const double prev = report.distances.empty() ? 0.0 : report.distances.back();
    report.ratios.push_back(report.distances.empty() || prev <= 10.0 * std::numeric_limits<double>::epsilon()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : d / prev);
    report.distances.push_back(d);
    report.iterations = m + 1;
    current = std::move(next);
    if (d < report.tolerance) {
      report.converged = true;
      break;
    }
  }
  if (!report.converged) throw PicardNonConvergence(std::move(report));
  return PicardResult{std::move(current), std::move(ensemble), std::move(report)};
}

SmallNoiseTable small_noise_sweep(const Model& model, const GridFunction& u0, const std::vector<double>& eps_list,
                                  std::size_t replicas, const TimeGrid& tgrid, PicardConfig cfg) {
  if (replicas < 2) throw ParameterError("small-noise sweep needs at least two replicas");
  for (double e : eps_list)
    if (!(e >= 0.0 && e < 1.0)) throw ParameterError("noise intensities must lie in [0, 1)");
  const Trajectory skeleton = solve_deterministic(model, u0, tgrid);
  cfg.particles = replicas;
  const std::vector<GridFunction> initial(replicas, u0);

  SmallNoiseTable table;
  for (double eps : eps_list) {
    SmallNoiseRow row{eps, 0.0, 0.0};
    if (eps > 0.0) {
      const PicardResult res = picard_solve(model, initial, eps, tgrid, cfg);
      std::vector<double> d(replicas);
      for (std::size_t i = 0; i < replicas; ++i) d[i] = sup_distance_sq(res.ensemble[i], skeleton);
      const double mean = std::accumulate(d.begin(), d.end(), 0.0) / double(replicas);
      double var = 0.0;
      for (double x : d) var += (x - mean) * (x - mean);
      var /= double(replicas - 1);
      row.estimate = mean;
      row.stderr_ = std::sqrt(var / double(replicas));
    }
    table.rows.push_back(row);
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : table.rows) {
    if (r.eps <= 0.0 || r.estimate <= 0.0) continue;
    const double x = std::log(r.eps), y = std::log(r.estimate);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  table.slope = n >= 2 ? (n * sxy - sx * sy) / (n * sxx - sx * sx) : std::numeric_limits<double>::quiet_NaN();
  return table;
}

double particle_doubling_gap(const Model& model, const GridFunction& u0, double eps, const TimeGrid& tgrid,
                             const PicardConfig& cfg) {
  PicardConfig doubled = cfg;
  doubled.particles = 2 * cfg.particles;
  const PicardResult a = picard_solve(model, std::vector<GridFunction>(cfg.particles, u0), eps, tgrid, cfg);
  const PicardResult b = picard_solve(model, std::vector<GridFunction>(doubled.particles, u0), eps, tgrid, doubled);
  double gap = 0.0;
  for (std::size_t s = 0; s < a.flow.nodes(); ++s)
    gap = std::max(gap, std::abs(std::sqrt(second_moment(a.flow.at(s))) - std::sqrt(second_moment(b.flow.at(s)))));
  return gap;
}

}  // namespace mvlab
