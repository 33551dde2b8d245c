#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mvlab/mvlab.h"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string suite = "all";
  std::string control;
  std::string target;
};

int report_failure(mvlab_status st) {
  std::fprintf(stderr, "error: %s\n", mvlab_last_error());
  return int(st);
}

int run_command(const std::string& command, const Options& opt) {
  mvlab_config* cfg = nullptr;
  mvlab_status st = opt.config.empty() ? mvlab_config_canonical(&cfg) : mvlab_config_load(opt.config.c_str(), &cfg);
  if (st != MVLAB_OK) return report_failure(st);
  if (opt.seed && (st = mvlab_config_set_seed(cfg, *opt.seed)) != MVLAB_OK) {
    mvlab_config_free(cfg);
    return report_failure(st);
  }
  if (opt.threads && (st = mvlab_config_set_threads(cfg, *opt.threads)) != MVLAB_OK) {
    mvlab_config_free(cfg);
    return report_failure(st);
  }

  const char* out = opt.out.empty() ? nullptr : opt.out.c_str();
  mvlab_run* run = nullptr;
  if (command == "simulate") st = mvlab_simulate(cfg, out, &run);
  else if (command == "skeleton") st = mvlab_skeleton(cfg, out, opt.control.empty() ? nullptr : opt.control.c_str(), &run);
  else if (command == "rate") st = mvlab_rate(cfg, out, opt.target.c_str(), &run);
  else st = mvlab_verify(cfg, out, opt.suite.c_str(), &run);

  if (run) {
    for (std::size_t i = 0; i < mvlab_run_message_count(run); ++i) std::printf("%s\n", mvlab_run_message(run, i));
    for (std::size_t i = 0; i < mvlab_run_warning_count(run); ++i)
      std::fprintf(stderr, "warning: %s\n", mvlab_run_warning(run, i));
    std::printf("output: %s\n", out ? out : mvlab_config_output_dir(cfg));
  }
  if (st != MVLAB_OK) std::fprintf(stderr, "error: %s\n", mvlab_last_error());
  mvlab_run_free(run);
  mvlab_config_free(cfg);
  return int(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional McKean-Vlasov SPDE laboratory: particle simulation, skeleton equations, rate-function "
               "estimation and verification suites"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(mvlab_version()));

  Options opt;
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON run configuration (default: built-in canonical instance)")
        ->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "output directory (default: output.dir from the config)");
    sub->add_option("--seed", opt.seed, "master 64-bit seed (overrides the config)");
    sub->add_option("--threads", opt.threads, "worker threads, 0 = all cores (never changes results)")
        ->check(CLI::NonNegativeNumber);
  };

  CLI::App* simulate = app.add_subcommand("simulate", "solve the McKean-Vlasov equation by Picard iteration");
  common(simulate);
  CLI::App* skeleton = app.add_subcommand("skeleton", "solve the deterministic and (optionally) controlled equations");
  common(skeleton);
  skeleton->add_option("--control", opt.control, "control CSV (columns t,v0..v{K-1}, one row per step)")
      ->check(CLI::ExistingFile);
  CLI::App* rate = app.add_subcommand("rate", "estimate the rate function at a target path");
  common(rate);
  rate->add_option("--target", opt.target,
                   "deterministic | manufactured:CONTROL.csv | trajectory:TRAJ.csv | terminal:FIELD.csv")
      ->required();
  CLI::App* verify = app.add_subcommand("verify", "run verification suites; exit 4 if any criterion fails");
  common(verify);
  verify->add_option("--suite", opt.suite,
                     "all | spectral | wasserstein | conditions | energy | picard | small_noise | controlled | "
                     "tails | rate | weak | determinism");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : MVLAB_ERR_VALIDATION;
  }

  for (const char* name : {"simulate", "skeleton", "rate", "verify"})
    if (app.got_subcommand(name)) return run_command(name, opt);
  return MVLAB_ERR_VALIDATION;
}
