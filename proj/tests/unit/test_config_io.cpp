#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "mvlab/commands.hpp"
#include "mvlab/config.hpp"
#include "mvlab/io.hpp"
#include "support.hpp"

using namespace mvlab;
using mvlab::testing::Gen;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string with(const std::string& pointer, const json& value) {
  json j = json::parse(canonical_config_json());
  j[json::json_pointer(pointer)] = value;
  return j.dump();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text, false);
  } catch (const ParameterError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "mvlab_unit" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct EnvGuard {
  std::string name;
  EnvGuard(const char* n, const char* v) : name(n) { ::setenv(n, v, 1); }
  ~EnvGuard() { ::unsetenv(name.c_str()); }
};

}  // namespace

TEST_CASE("the canonical config parses and round-trips through canonical JSON") {
  const RunConfig c = parse_config(canonical_config_json(), false);
  CHECK(c.points == 128);
  CHECK(c.half_width == 16.0);
  CHECK(c.alpha == 0.75);
  CHECK(c.steps == 200);
  CHECK(c.coefficients.sigma.modes() == 4);
  CHECK_FALSE(c.picard.lambda.has_value());
  const RunConfig again = parse_config(canonical_config_json(), false);
  CHECK(c.canonical_json == again.canonical_json);
  CHECK(c.hash() == again.hash());
  CHECK(c.hash().size() == 16);
}

TEST_CASE("validation errors name the offending field") {
  CHECK(error_of(with("/grid/points", 127)).find("grid.points") != std::string::npos);
  CHECK(error_of(with("/grid/alpha", 1.0)).find("grid.alpha") != std::string::npos);
  CHECK(error_of(with("/time/steps", 0)).find("time.steps") != std::string::npos);
  CHECK(error_of(with("/noise/eps", -0.5)).find("noise.eps") != std::string::npos);
  CHECK(error_of(with("/grid/points", "many")).find("grid.points") != std::string::npos);
  CHECK(error_of(with("/initial/field/kind", "lorentzian")).find("initial.field.kind") != std::string::npos);
  CHECK(error_of("{ not json").find("config") != std::string::npos);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK(error_of(with("/colour", 1)).find("colour") != std::string::npos);
  CHECK(error_of(with("/grid/spacing", 0.1)).find("grid.spacing") != std::string::npos);
  CHECK(error_of(with("/coefficients/f/q", 2)).find("unknown key") != std::string::npos);
}

TEST_CASE("environment variables override config entries") {
  {
    EnvGuard a("MVLAB_GRID__POINTS", "64");
    EnvGuard b("MVLAB_SEED", "99");
    EnvGuard c("MVLAB_PICARD__LAMBDA", "2.5");
    const RunConfig cfg = parse_config(canonical_config_json(), true);
    CHECK(cfg.points == 64);
    CHECK(cfg.seed == 99);
    REQUIRE(cfg.picard.lambda.has_value());
    CHECK(*cfg.picard.lambda == 2.5);
    CHECK(parse_config(canonical_config_json(), false).points == 128);
  }
  {
    EnvGuard a("MVLAB_OUTPUT__DIR", "elsewhere");
    CHECK(parse_config(canonical_config_json(), true).out_dir == "elsewhere");
  }
  {
    EnvGuard a("MVLAB_GRID__POINTS", "63");
    CHECK_THROWS_AS(parse_config(canonical_config_json(), true), ParameterError);
  }
}

TEST_CASE("the hash ignores threads and output directory but tracks everything else") {
  RunConfig a = parse_config(canonical_config_json(), false);
  RunConfig b = a;
  b.threads = 7;
  b.out_dir = "somewhere/else";
  finalize_config(b);
  CHECK(a.hash() == b.hash());
  RunConfig c = a;
  c.seed = 2;
  finalize_config(c);
  CHECK(a.hash() != c.hash());
  RunConfig d = a;
  d.eps = 0.05;
  finalize_config(d);
  CHECK(a.hash() != d.hash());
}

TEST_CASE("double formatting is shortest round-trip") {
  for (std::uint64_t c = 0; c < 200; ++c) {
    Gen gen(61, c);
    const double x = gen.normal() * std::pow(10.0, gen.integer(-300, 300));
    const std::string s = io::format_double(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
  CHECK(io::format_double(0.1) == "0.1");
  CHECK(io::format_double(1.0) == "1");
  CHECK(io::format_double(std::nan("")).empty());
}

TEST_CASE("trajectory, grid-function and control files round-trip exactly") {
  const fs::path dir = scratch("roundtrip");
  Gen gen(62);
  for (int dim : {1, 2}) {
    const SpatialGrid g(dim, 3.0, 8);
    const TimeGrid tg(0.7, 5);
    Trajectory tr{tg, {}};
    for (int s = 0; s <= tg.steps(); ++s) tr.states.push_back(gen.noise_field(g, 3.0));

    io::write_trajectory_csv(dir / "t.csv", tr);
    const Trajectory back = io::read_trajectory_csv(dir / "t.csv", g, tg);
    for (int s = 0; s <= tg.steps(); ++s) CHECK(back.at(s) == tr.at(s));

    io::write_trajectory_binary(dir / "t.bin", tr);
    const Trajectory blob = io::read_trajectory_binary(dir / "t.bin", g, tg);
    for (int s = 0; s <= tg.steps(); ++s) CHECK(blob.at(s) == tr.at(s));
    CHECK_THROWS_AS(io::read_trajectory_csv(dir / "t.csv", g, TimeGrid(0.7, 6)), IoError);

    io::write_grid_function_csv(dir / "u.csv", tr.terminal());
    CHECK(io::read_grid_function_csv(dir / "u.csv", g) == tr.terminal());

    const Control v = gen.control(tg.steps(), 3);
    io::write_control_csv(dir / "v.csv", v, tg);
    const Control w = io::read_control_csv(dir / "v.csv", tg, 3);
    CHECK(std::equal(v.values().begin(), v.values().end(), w.values().begin()));
    CHECK_THROWS(io::read_control_csv(dir / "v.csv", tg, 4));
  }
}

TEST_CASE("reading missing or malformed files fails with a typed error") {
  const fs::path dir = scratch("malformed");
  const SpatialGrid g(1, 1.0, 4);
  CHECK_THROWS_AS(io::read_grid_function_csv(dir / "absent.csv", g), IoError);
  io::write_text(dir / "bad.csv", "x,u\n1,abc\n");
  CHECK_THROWS_AS(io::read_csv(dir / "bad.csv"), Error);
  io::write_text(dir / "bad.bin", "NOTATRAJ");
  CHECK_THROWS_AS(io::read_trajectory_binary(dir / "bad.bin", g, TimeGrid(1.0, 1)), Error);
}

TEST_CASE("target specifications and exit codes") {
  CHECK(parse_target_spec("deterministic").kind == TargetSpec::Kind::deterministic);
  const TargetSpec m = parse_target_spec("manufactured:ctl.csv");
  CHECK(m.kind == TargetSpec::Kind::manufactured);
  CHECK(m.path == "ctl.csv");
  CHECK(parse_target_spec("trajectory:a.bin").kind == TargetSpec::Kind::trajectory);
  CHECK(parse_target_spec("terminal:u.csv").kind == TargetSpec::Kind::terminal);
  CHECK_THROWS_AS(parse_target_spec("somewhere"), ParameterError);
  CHECK_THROWS_AS(parse_target_spec("trajectory:"), ParameterError);

  CHECK(exit_code_for(ErrorKind::validation) == 2);
  CHECK(exit_code_for(ErrorKind::io) == 2);
  CHECK(exit_code_for(ErrorKind::numerical) == 3);
  CHECK(exit_code_for(ErrorKind::verification) == 4);
  CHECK(exit_code_for(ErrorKind::internal) == 1);
}

TEST_CASE("skeleton command with a zero control reproduces the deterministic path") {
  RunConfig cfg = mvlab::testing::small_config();
  const fs::path dir = scratch("skeleton");
  io::write_control_csv(dir / "zero.csv", Control(cfg.steps, cfg.coefficients.sigma.modes()), cfg.time_grid());
  const CommandResult r = cmd_skeleton(cfg, dir / "out", dir / "zero.csv");
  CHECK(r.exit_code == 0);
  const SpatialGrid g = cfg.grid();
  const Trajectory det = io::read_trajectory_csv(dir / "out" / "deterministic.csv", g, cfg.time_grid());
  const Trajectory ctl = io::read_trajectory_csv(dir / "out" / "controlled.csv", g, cfg.time_grid());
  CHECK(sup_distance_sq(det, ctl) == 0.0);
  const json manifest = json::parse(io::read_text(dir / "out" / "manifest.json"));
  CHECK(manifest["config_hash"] == cfg.hash());
}

TEST_CASE("verify command reports failure with exit code 4 on violated coefficients") {
  RunConfig cfg = mvlab::testing::small_config();
  cfg.coefficients.f.lambda_f = -1.0;
  finalize_config(cfg);
  const fs::path dir = scratch("verify_conditions");
  const CommandResult r = cmd_verify(cfg, dir, "conditions");
  CHECK(r.exit_code == 4);
  CHECK(fs::exists(dir / "verify_report.csv"));
  CHECK_THROWS_AS(cmd_verify(cfg, dir, "nonsense"), ParameterError);
}
