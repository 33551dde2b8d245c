#include "mvlab/mvlab.h"

#include <cstring>
#include <new>
#include <string>
#include <vector>

#include "mvlab/commands.hpp"

struct mvlab_config {
  mvlab::RunConfig cfg;
};

struct mvlab_run {
  std::vector<std::string> messages;
  std::vector<std::string> warnings;
};

namespace {

thread_local std::string g_last_error;

mvlab_status status_of(int exit_code) { return static_cast<mvlab_status>(exit_code); }

template <class F>
mvlab_status guarded(F&& fn) {
  g_last_error.clear();
  try {
    return fn();
  } catch (const mvlab::Error& e) {
    g_last_error = e.what();
    return status_of(mvlab::exit_code_for(e.kind()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
  } catch (...) {
    g_last_error = "unknown internal error";
  }
  return MVLAB_ERR_INTERNAL;
}

mvlab_status missing(const char* what) {
  g_last_error = std::string(what) + " must not be NULL";
  return MVLAB_ERR_VALIDATION;
}

mvlab_status finish_run(const mvlab::CommandResult& res, mvlab_run** run) {
  *run = new mvlab_run{res.messages, res.warnings};
  if (res.exit_code != 0) g_last_error = "one or more verification criteria failed";
  return status_of(res.exit_code);
}

std::filesystem::path out_path(const mvlab_config* cfg, const char* out_dir) {
  return out_dir && *out_dir ? std::filesystem::path(out_dir) : std::filesystem::path(cfg->cfg.out_dir);
}

}  // namespace

extern "C" {

const char* mvlab_version(void) { return "0.1.0"; }

const char* mvlab_last_error(void) { return g_last_error.c_str(); }

mvlab_status mvlab_config_load(const char* path, mvlab_config** out) {
  if (!path) return missing("path");
  if (!out) return missing("out");
  *out = nullptr;
  return guarded([&] {
    *out = new mvlab_config{mvlab::load_config(path)};
    return MVLAB_OK;
  });
}

mvlab_status mvlab_config_parse(const char* json_text, mvlab_config** out) {
  if (!json_text) return missing("json_text");
  if (!out) return missing("out");
  *out = nullptr;
  return guarded([&] {
    *out = new mvlab_config{mvlab::parse_config(json_text)};
    return MVLAB_OK;
  });
}

mvlab_status mvlab_config_canonical(mvlab_config** out) {
  if (!out) return missing("out");
  *out = nullptr;
  return guarded([&] {
    *out = new mvlab_config{mvlab::parse_config(mvlab::canonical_config_json())};
    return MVLAB_OK;
  });
}

mvlab_status mvlab_config_set_seed(mvlab_config* cfg, uint64_t seed) {
  if (!cfg) return missing("cfg");
  return guarded([&] {
    cfg->cfg.seed = seed;
    mvlab::finalize_config(cfg->cfg);
    return MVLAB_OK;
  });
}

mvlab_status mvlab_config_set_threads(mvlab_config* cfg, int threads) {
  if (!cfg) return missing("cfg");
  return guarded([&] {
    mvlab::RunConfig next = cfg->cfg;
    next.threads = threads;
    mvlab::finalize_config(next);
    cfg->cfg = std::move(next);
    return MVLAB_OK;
  });
}

mvlab_status mvlab_config_hash(const mvlab_config* cfg, char* buf, size_t len) {
  if (!cfg) return missing("cfg");
  if (!buf) return missing("buf");
  const std::string h = cfg->cfg.hash();
  if (len < h.size() + 1) {
    g_last_error = "hash buffer needs at least 17 bytes";
    return MVLAB_ERR_VALIDATION;
  }
  std::memcpy(buf, h.c_str(), h.size() + 1);
  return MVLAB_OK;
}

const char* mvlab_config_output_dir(const mvlab_config* cfg) { return cfg ? cfg->cfg.out_dir.c_str() : ""; }

void mvlab_config_free(mvlab_config* cfg) { delete cfg; }

mvlab_status mvlab_simulate(const mvlab_config* cfg, const char* out_dir, mvlab_run** run) {
  if (!cfg) return missing("cfg");
  if (!run) return missing("run");
  *run = nullptr;
  return guarded([&] { return finish_run(mvlab::cmd_simulate(cfg->cfg, out_path(cfg, out_dir)), run); });
}

mvlab_status mvlab_skeleton(const mvlab_config* cfg, const char* out_dir, const char* control_path,
                            mvlab_run** run) {
  if (!cfg) return missing("cfg");
  if (!run) return missing("run");
  *run = nullptr;
  return guarded([&] {
    std::optional<std::filesystem::path> control;
    if (control_path && *control_path) control = control_path;
    return finish_run(mvlab::cmd_skeleton(cfg->cfg, out_path(cfg, out_dir), control), run);
  });
}

mvlab_status mvlab_rate(const mvlab_config* cfg, const char* out_dir, const char* target, mvlab_run** run) {
  if (!cfg) return missing("cfg");
  if (!target) return missing("target");
  if (!run) return missing("run");
  *run = nullptr;
  return guarded([&] { return finish_run(mvlab::cmd_rate(cfg->cfg, out_path(cfg, out_dir), target), run); });
}

mvlab_status mvlab_verify(const mvlab_config* cfg, const char* out_dir, const char* suite, mvlab_run** run) {
  if (!cfg) return missing("cfg");
  if (!run) return missing("run");
  *run = nullptr;
  return guarded([&] {
    return finish_run(mvlab::cmd_verify(cfg->cfg, out_path(cfg, out_dir), suite && *suite ? suite : "all"), run);
  });
}

size_t mvlab_run_message_count(const mvlab_run* run) { return run ? run->messages.size() : 0; }
const char* mvlab_run_message(const mvlab_run* run, size_t index) {
  return run && index < run->messages.size() ? run->messages[index].c_str() : nullptr;
}
size_t mvlab_run_warning_count(const mvlab_run* run) { return run ? run->warnings.size() : 0; }
const char* mvlab_run_warning(const mvlab_run* run, size_t index) {
  return run && index < run->warnings.size() ? run->warnings[index].c_str() : nullptr;
}
void mvlab_run_free(mvlab_run* run) { delete run; }

mvlab_status mvlab_fractional_laplacian(int dim, double half_width, int points, double alpha, const double* in,
                                        double* out) {
  if (!in) return missing("in");
  if (!out) return missing("out");
  return guarded([&] {
    const mvlab::SpatialGrid grid(dim, half_width, points);
    mvlab::GridFunction u(grid);
    std::memcpy(u.values().data(), in, grid.size() * sizeof(double));
    const mvlab::GridFunction r = mvlab::apply_fractional_laplacian(u, mvlab::FractionalOrder(alpha));
    std::memcpy(out, r.values().data(), grid.size() * sizeof(double));
    return MVLAB_OK;
  });
}

mvlab_status mvlab_semigroup_resolvent(int dim, double half_width, int points, double alpha, double tau,
                                       const double* in, double* out) {
  if (!in) return missing("in");
  if (!out) return missing("out");
  return guarded([&] {
    const mvlab::SpatialGrid grid(dim, half_width, points);
    mvlab::GridFunction u(grid);
    std::memcpy(u.values().data(), in, grid.size() * sizeof(double));
    const mvlab::GridFunction r = mvlab::apply_semigroup_resolvent(u, mvlab::FractionalOrder(alpha), tau);
    std::memcpy(out, r.values().data(), grid.size() * sizeof(double));
    return MVLAB_OK;
  });
}

mvlab_status mvlab_wasserstein2(int dim, double half_width, int points, size_t n, const double* mu, const double* nu,
                                double* out) {
  if (!mu) return missing("mu");
  if (!nu) return missing("nu");
  if (!out) return missing("out");
  return guarded([&] {
    const mvlab::SpatialGrid grid(dim, half_width, points);
    if (n == 0) throw mvlab::DomainError("empirical measures need at least one particle");
    const auto build = [&](const double* data) {
      std::vector<mvlab::GridFunction> atoms;
      for (size_t i = 0; i < n; ++i) {
        mvlab::GridFunction u(grid);
        std::memcpy(u.values().data(), data + i * grid.size(), grid.size() * sizeof(double));
        atoms.push_back(std::move(u));
      }
      return mvlab::EmpiricalMeasure(std::move(atoms));
    };
    *out = mvlab::wasserstein2(build(mu), build(nu));
    return MVLAB_OK;
  });
}

}  // extern "C"
