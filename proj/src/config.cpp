#include "mvlab/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mvlab/rng.hpp"

extern char** environ;

namespace mvlab {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw ParameterError(field + ": " + what);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where.empty() ? "config" : where, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) bad(where.empty() ? key : where + "." + key, "unknown key");
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  const auto it = obj.find(key);
  if (it == obj.end()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    bad(where + "." + key, "has the wrong type");
  }
}

json field_to_json(const SpaceTimeField& f, int dim) {
  json j{{"kind", to_string(f.kind)}, {"amplitude", f.amplitude}, {"width", f.width}};
  j["center"] = dim == 1 ? json(f.center[0]) : json::array({f.center[0], f.center[1]});
  return j;
}

SpaceTimeField field_from_json(const json& j, const std::string& where) {
  check_keys(j, where, {"kind", "amplitude", "width", "center"});
  SpaceTimeField f;
  std::string kind = "zero";
  read(j, "kind", where, kind);
  try {
    f.kind = field_kind_from_string(kind);
  } catch (const Error&) {
    bad(where + ".kind", "unknown field kind '" + kind + "'");
  }
  f.amplitude = f.kind == SpaceTimeField::Kind::zero ? 0.0 : 1.0;
  read(j, "amplitude", where, f.amplitude);
  read(j, "width", where, f.width);
  if (const auto it = j.find("center"); it != j.end()) {
    if (it->is_number()) {
      f.center = {it->get<double>(), 0.0};
    } else if (it->is_array() && it->size() == 2 && (*it)[0].is_number() && (*it)[1].is_number()) {
      f.center = {(*it)[0].get<double>(), (*it)[1].get<double>()};
    } else {
      bad(where + ".center", "must be a number or a pair of numbers");
    }
  }
  return f;
}

const char* ensemble_name(InitialEnsemble::Kind k) {
  return k == InitialEnsemble::Kind::deterministic ? "deterministic" : "scaled_normal";
}

json to_json(const RunConfig& c, bool include_runtime) {
  json modes = json::array();
  for (std::size_t k = 0; k < c.coefficients.sigma.modes(); ++k)
    modes.push_back({{"sigma1", field_to_json(c.coefficients.sigma.sigma1[k], c.dim)},
                     {"beta", c.coefficients.sigma.beta[k]},
                     {"gamma", c.coefficients.sigma.gamma[k]}});
  json j;
  j["grid"] = {{"dim", c.dim}, {"half_width", c.half_width}, {"points", c.points}, {"alpha", c.alpha}, {"c_v", c.c_v}};
  j["time"] = {{"horizon", c.horizon}, {"steps", c.steps}};
  j["coefficients"] = {
      {"f",
       {{"p", c.coefficients.f.p},
        {"lambda_f", c.coefficients.f.lambda_f},
        {"phi", field_to_json(c.coefficients.f.phi, c.dim)},
        {"h_cap", c.coefficients.f.h_cap}}},
      {"g",
       {{"psi_g", field_to_json(c.coefficients.g.psi_g, c.dim)},
        {"c0", c.coefficients.g.c0},
        {"c1", c.coefficients.g.c1},
        {"c2", c.coefficients.g.c2}}},
      {"sigma", {{"kappa", field_to_json(c.coefficients.sigma.kappa, c.dim)}, {"modes", modes}}}};
  j["initial"] = {{"field", field_to_json(c.initial, c.dim)},
                  {"ensemble", ensemble_name(c.ensemble.kind)},
                  {"spread", c.ensemble.spread}};
  j["noise"] = {{"eps", c.eps}};
  j["picard"] = {{"particles", c.picard.particles}, {"tol", c.picard.tol}, {"max_iters", c.picard.max_iters}};
  j["picard"]["lambda"] = c.picard.lambda ? json(*c.picard.lambda) : json("auto");
  j["rate"] = {{"eta_ladder", c.eta_ladder},
               {"budget", c.rate_budget},
               {"gap_threshold", c.gap_threshold},
               {"max_iters_per_stage", c.rate_max_iters_per_stage}};
  j["conditions"] = {{"draws", c.condition_draws}, {"strong_dissipativity", c.strong_dissipativity}};
  j["tails"] = {{"half_width", c.tails.half_width}, {"points", c.tails.points},
                {"initial", field_to_json(c.tails.initial, c.dim)}, {"controls", c.tails.controls},
                {"control_radius", c.tails.control_radius}, {"delta", c.tails.delta}};
  j["output"] = {{"trajectory_format", c.trajectory_format == TrajectoryFormat::csv ? "csv" : "binary"},
                 {"tail_delta", c.tail_delta}};
  j["seed"] = c.seed;
  if (include_runtime) {
    j["threads"] = c.threads;
    j["output"]["dir"] = c.out_dir;
  }
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  check_keys(j, "", {"grid", "time", "coefficients", "initial", "noise", "picard", "rate", "conditions", "tails",
                     "output", "seed", "threads"});
  if (auto it = j.find("grid"); it != j.end()) {
    check_keys(*it, "grid", {"dim", "half_width", "points", "alpha", "c_v"});
    read(*it, "dim", "grid", c.dim);
    read(*it, "half_width", "grid", c.half_width);
    read(*it, "points", "grid", c.points);
    read(*it, "alpha", "grid", c.alpha);
    read(*it, "c_v", "grid", c.c_v);
  }
  if (auto it = j.find("time"); it != j.end()) {
    check_keys(*it, "time", {"horizon", "steps"});
    read(*it, "horizon", "time", c.horizon);
    read(*it, "steps", "time", c.steps);
  }
  if (auto it = j.find("coefficients"); it != j.end()) {
    check_keys(*it, "coefficients", {"f", "g", "sigma"});
    if (auto f = it->find("f"); f != it->end()) {
      check_keys(*f, "coefficients.f", {"p", "lambda_f", "phi", "h_cap"});
      read(*f, "p", "coefficients.f", c.coefficients.f.p);
      read(*f, "lambda_f", "coefficients.f", c.coefficients.f.lambda_f);
      read(*f, "h_cap", "coefficients.f", c.coefficients.f.h_cap);
      if (auto phi = f->find("phi"); phi != f->end()) c.coefficients.f.phi = field_from_json(*phi, "coefficients.f.phi");
    }
    if (auto g = it->find("g"); g != it->end()) {
      check_keys(*g, "coefficients.g", {"psi_g", "c0", "c1", "c2"});
      read(*g, "c0", "coefficients.g", c.coefficients.g.c0);
      read(*g, "c1", "coefficients.g", c.coefficients.g.c1);
      read(*g, "c2", "coefficients.g", c.coefficients.g.c2);
      if (auto psi = g->find("psi_g"); psi != g->end())
        c.coefficients.g.psi_g = field_from_json(*psi, "coefficients.g.psi_g");
    }
    if (auto s = it->find("sigma"); s != it->end()) {
      check_keys(*s, "coefficients.sigma", {"kappa", "modes"});
      if (auto kappa = s->find("kappa"); kappa != s->end())
        c.coefficients.sigma.kappa = field_from_json(*kappa, "coefficients.sigma.kappa");
      if (auto modes = s->find("modes"); modes != s->end()) {
        if (!modes->is_array()) bad("coefficients.sigma.modes", "must be an array");
        for (std::size_t k = 0; k < modes->size(); ++k) {
          const std::string where = "coefficients.sigma.modes[" + std::to_string(k) + "]";
          const json& m = (*modes)[k];
          check_keys(m, where, {"sigma1", "beta", "gamma"});
          double beta = 0.0, gamma = 0.0;
          read(m, "beta", where, beta);
          read(m, "gamma", where, gamma);
          SpaceTimeField s1;
          if (auto f = m.find("sigma1"); f != m.end()) s1 = field_from_json(*f, where + ".sigma1");
          c.coefficients.sigma.sigma1.push_back(s1);
          c.coefficients.sigma.beta.push_back(beta);
          c.coefficients.sigma.gamma.push_back(gamma);
        }
      }
    }
  }
  if (auto it = j.find("initial"); it != j.end()) {
    check_keys(*it, "initial", {"field", "ensemble", "spread"});
    if (auto f = it->find("field"); f != it->end()) c.initial = field_from_json(*f, "initial.field");
    std::string kind = "deterministic";
    read(*it, "ensemble", "initial", kind);
    if (kind == "deterministic") c.ensemble.kind = InitialEnsemble::Kind::deterministic;
    else if (kind == "scaled_normal") c.ensemble.kind = InitialEnsemble::Kind::scaled_normal;
    else bad("initial.ensemble", "must be 'deterministic' or 'scaled_normal'");
    read(*it, "spread", "initial", c.ensemble.spread);
  }
  if (auto it = j.find("noise"); it != j.end()) {
    check_keys(*it, "noise", {"eps"});
    read(*it, "eps", "noise", c.eps);
  }
  if (auto it = j.find("picard"); it != j.end()) {
    check_keys(*it, "picard", {"particles", "tol", "max_iters", "lambda"});
    read(*it, "particles", "picard", c.picard.particles);
    read(*it, "tol", "picard", c.picard.tol);
    read(*it, "max_iters", "picard", c.picard.max_iters);
    if (auto lam = it->find("lambda"); lam != it->end()) {
      if (lam->is_string() && lam->get<std::string>() == "auto") c.picard.lambda.reset();
      else if (lam->is_number()) c.picard.lambda = lam->get<double>();
      else bad("picard.lambda", "must be a number or \"auto\"");
    }
  }
  if (auto it = j.find("rate"); it != j.end()) {
    check_keys(*it, "rate", {"eta_ladder", "budget", "gap_threshold", "max_iters_per_stage"});
    read(*it, "eta_ladder", "rate", c.eta_ladder);
    read(*it, "budget", "rate", c.rate_budget);
    read(*it, "gap_threshold", "rate", c.gap_threshold);
    read(*it, "max_iters_per_stage", "rate", c.rate_max_iters_per_stage);
  }
  if (auto it = j.find("conditions"); it != j.end()) {
    check_keys(*it, "conditions", {"draws", "strong_dissipativity"});
    read(*it, "draws", "conditions", c.condition_draws);
    read(*it, "strong_dissipativity", "conditions", c.strong_dissipativity);
  }
  if (auto it = j.find("tails"); it != j.end()) {
    check_keys(*it, "tails", {"half_width", "points", "initial", "controls", "control_radius", "delta"});
    read(*it, "half_width", "tails", c.tails.half_width);
    read(*it, "points", "tails", c.tails.points);
    read(*it, "controls", "tails", c.tails.controls);
    read(*it, "control_radius", "tails", c.tails.control_radius);
    read(*it, "delta", "tails", c.tails.delta);
    if (auto f = it->find("initial"); f != it->end()) c.tails.initial = field_from_json(*f, "tails.initial");
  }
  if (auto it = j.find("output"); it != j.end()) {
    check_keys(*it, "output", {"dir", "trajectory_format", "tail_delta"});
    read(*it, "dir", "output", c.out_dir);
    std::string fmt = "csv";
    read(*it, "trajectory_format", "output", fmt);
    if (fmt == "csv") c.trajectory_format = TrajectoryFormat::csv;
    else if (fmt == "binary") c.trajectory_format = TrajectoryFormat::binary;
    else bad("output.trajectory_format", "must be 'csv' or 'binary'");
    read(*it, "tail_delta", "output", c.tail_delta);
  }
  if (auto it = j.find("seed"); it != j.end()) {
    if (it->is_number_unsigned()) c.seed = it->get<std::uint64_t>();
    else if (it->is_number_integer() && it->get<std::int64_t>() >= 0) c.seed = std::uint64_t(it->get<std::int64_t>());
    else bad("seed", "must be a nonnegative integer");
  }
  read(j, "threads", "config", c.threads);
  return c;
}

std::string lower(std::string s) {
  for (char& ch : s) ch = char(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

void apply_env_overrides(json& j) {
  static const std::string prefix = "MVLAB_";
  for (char** env = environ; env && *env; ++env) {
    const std::string entry(*env);
    const auto eq = entry.find('=');
    if (eq == std::string::npos || entry.compare(0, prefix.size(), prefix) != 0) continue;
    const std::string path = lower(entry.substr(prefix.size(), eq - prefix.size()));
    const std::string raw = entry.substr(eq + 1);
    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;

    json* node = &j;
    std::size_t start = 0;
    for (;;) {
      const auto sep = path.find("__", start);
      const std::string key = path.substr(start, sep == std::string::npos ? std::string::npos : sep - start);
      if (key.empty()) bad(entry.substr(0, eq), "malformed override name");
      if (sep == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      json& child = (*node)[key];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) bad(entry.substr(0, eq), "override path crosses a non-object");
      node = &child;
      start = sep + 2;
    }
  }
}

void validate(const RunConfig& c) {
  if (c.dim != 1 && c.dim != 2) bad("grid.dim", "must be 1 or 2");
  if (!(c.half_width > 0.0)) bad("grid.half_width", "must be positive");
  if (c.points < 4) bad("grid.points", "must be >= 4");
  if (c.points % 2 != 0) bad("grid.points", "must be even");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) bad("grid.alpha", "must lie strictly between 0 and 1");
  if (!(c.c_v > 0.0)) bad("grid.c_v", "must be positive");
  if (!(c.horizon > 0.0)) bad("time.horizon", "must be positive");
  if (c.steps < 1) bad("time.steps", "must be >= 1");
  if (c.coefficients.sigma.modes() < 1) bad("coefficients.sigma.modes", "needs at least one noise mode");
  try {
    c.coefficients.validate();
  } catch (const Error& e) {
    bad("coefficients", e.what());
  }
  c.initial.validate("initial.field");
  if (!(c.eps >= 0.0 && c.eps < 1.0)) bad("noise.eps", "must lie in [0, 1)");
  if (c.ensemble.spread < 0.0) bad("initial.spread", "must be nonnegative");
  try {
    c.picard.validate();
  } catch (const Error& e) {
    bad("picard", e.what());
  }
  if (c.condition_draws < 1) bad("conditions.draws", "must be >= 1");
  if (!(c.tails.half_width > 0.0)) bad("tails.half_width", "must be positive");
  if (c.tails.points < 4 || c.tails.points % 2 != 0) bad("tails.points", "must be even and >= 4");
  if (c.tails.controls < 1) bad("tails.controls", "must be >= 1");
  if (!(c.tails.control_radius >= 0.0)) bad("tails.control_radius", "must be nonnegative");
  if (!(c.tails.delta > 0.0)) bad("tails.delta", "must be positive");
  c.tails.initial.validate("tails.initial");
  if (!(c.tail_delta > 0.0)) bad("output.tail_delta", "must be positive");
  if (c.threads < 0) bad("threads", "must be >= 0");
  RateProblem probe{RateTarget::endpoint(GridFunction(c.grid())), c.eta_ladder, c.rate_budget, c.gap_threshold,
                    c.rate_max_iters_per_stage, c.threads};
  try {
    probe.validate();
  } catch (const Error& e) {
    bad("rate", e.what());
  }
}

}  // namespace

SpatialGrid RunConfig::grid() const { return SpatialGrid(dim, half_width, points); }
TimeGrid RunConfig::time_grid() const { return TimeGrid(horizon, steps); }
Model RunConfig::model() const { return Model(grid(), FractionalOrder(alpha), coefficients, c_v); }

RateProblem RunConfig::rate_problem(RateTarget target) const {
  return RateProblem{std::move(target), eta_ladder, rate_budget, gap_threshold, rate_max_iters_per_stage, threads};
}

std::vector<GridFunction> RunConfig::initial_states(const SpatialGrid& g) const {
  const GridFunction u0 = initial.sample(g, 0.0);
  std::vector<GridFunction> out(picard.particles, u0);
  if (ensemble.kind == InitialEnsemble::Kind::scaled_normal) {
    const CounterRng rng(derive_key(seed, "initial", 0));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= 1.0 + ensemble.spread * rng.normal(i, 0);
  }
  return out;
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical_json)));
  return buf;
}

void finalize_config(RunConfig& cfg) {
  validate(cfg);
  cfg.picard.seed = cfg.seed;
  cfg.picard.threads = cfg.threads;
  cfg.canonical_json = to_json(cfg, false).dump();
}

RunConfig parse_config(const std::string& text, bool apply_env) {
  json j = json::parse(text, nullptr, false, true);
  if (j.is_discarded()) throw ParameterError("config: not valid JSON");
  if (apply_env) apply_env_overrides(j);
  RunConfig cfg = from_json(j);
  finalize_config(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path, bool apply_env) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), apply_env);
}

std::string canonical_config_json() {
  RunConfig c;
  c.coefficients.f = DriftF{4, 1.0, SpaceTimeField::gaussian(0.5, 2.0), 2.0};
  c.coefficients.g = DriftG{SpaceTimeField::gaussian(0.5, 2.0), 0.5, 0.5, 0.5};
  c.coefficients.sigma.kappa = SpaceTimeField::gaussian(0.5, 2.0);
  for (double center : {-3.0, -1.0, 1.0, 3.0}) {
    c.coefficients.sigma.sigma1.push_back(SpaceTimeField::gaussian(0.3, 1.0, {center, 0.0}));
    c.coefficients.sigma.beta.push_back(0.2);
    c.coefficients.sigma.gamma.push_back(0.2);
  }
  c.initial = SpaceTimeField::gaussian(1.0, 1.0);
  c.out_dir = "runs/canonical";
  return to_json(c, true).dump(2);
}

}  // namespace mvlab
