#include "gapkin_cli/commands.hpp"
#include "gapkin_cli/config.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace gapkin::cli;

namespace {

fs::path scratch(const std::string& name)
{
  fs::path p = fs::temp_directory_path() / ("gapkin_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p.parent_path());
  return p;
}

fs::path write(const fs::path& p, const std::string& text)
{
  fs::create_directories(p.parent_path());
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p)
{
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

int run(const std::string& args, const std::string& env = "")
{
  std::string cmd = env + " " + GAPKIN_EXE + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

const char* small_sim = R"(
experiment: small
seed: 99
domain: {type: disk, radius: 1.0}
velocity: {r0: 0.5, R0: 3.0}
wall: {kernel: maxwell, theta: [1.0]}
sim:
  particles: 20000
  batch: 7000
  t_end: 4
  record_dt: 0.5
  grid: [2, 4, 4, 4]
  initial: {type: invariant, tilt: 0.5}
spectral:
  grid: {boundary_nodes: 64, speed_nodes: 16}
)";

} // namespace

TEST(Config, DefaultsParse)
{
  RunConfig c = parse_config("experiment: x\n");
  EXPECT_EQ(c.domain.type, "disk");
  EXPECT_EQ(c.sim.mode, "evolve");
  EXPECT_NO_THROW(build_model(c));
}

TEST(Config, UnknownKeyRejected)
{
  EXPECT_THROW(parse_config("domain: {type: disk, radius: 1, colour: red}\n"), ConfigError);
  EXPECT_THROW(parse_config("simulation: {}\n"), ConfigError);
}

TEST(Config, BadValuesRejected)
{
  EXPECT_THROW(parse_config("domain: {type: square}\n"), ConfigError);
  EXPECT_THROW(parse_config("velocity: {r0: 3, R0: 1}\n"), ConfigError);
  EXPECT_THROW(parse_config("sim: {particles: many}\n"), ConfigError);
  EXPECT_THROW(parse_config("wall: {alpha: [1.5]}\n"), ConfigError);
  EXPECT_THROW(parse_config("acceptance: {only: [no_such_check]}\n"), ConfigError);
  EXPECT_THROW(parse_config("acceptance: {tolerances: {bogus: 1}}\n"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2\n"), ConfigError);
}

TEST(Config, DumpRoundTripsAndHashIgnoresOutput)
{
  RunConfig c = parse_config(small_sim);
  RunConfig d = parse_config(dump_config(c));
  EXPECT_EQ(config_hash(c), config_hash(d));
  EXPECT_EQ(dump_config(c), dump_config(d));
  d.output = "/elsewhere";
  EXPECT_EQ(config_hash(c), config_hash(d));
  d.seed += 1;
  EXPECT_NE(config_hash(c), config_hash(d));
  EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, SemanticChecks)
{
  RunConfig c = parse_config(small_sim);
  c.wall.alpha = {0.5};
  EXPECT_THROW(validate_semantics(c, "simulate"), ConfigError);
  EXPECT_THROW(validate_semantics(c, "invariant"), ConfigError);
  EXPECT_NO_THROW(validate_semantics(c, "spectrum"));
  RunConfig p = parse_config(small_sim);
  p.sim.initial.type = "pointcloud";
  p.sim.initial.points = {{2.0, 0, 0, 1, 0, 0}};
  EXPECT_THROW(validate_semantics(p, "simulate"), ConfigError);
  p.sim.initial.points = {{0.2, 0, 0, 0.1, 0, 0}};
  EXPECT_THROW(validate_semantics(p, "simulate"), ConfigError);
  p.sim.initial.points = {{0.2, 0, 0, 1.0, 0.5, 0}};
  EXPECT_NO_THROW(validate_semantics(p, "simulate"));
}

TEST(Commands, CsvPreambleCarriesHashAndSeed)
{
  RunConfig c = parse_config(small_sim);
  CommandResult r = cmd_geometry_check(c, 1);
  ASSERT_TRUE(r.files.count("geometry.csv"));
  EXPECT_EQ(r.files["geometry.csv"].rfind(csv_preamble(c), 0), 0u);
  EXPECT_TRUE(r.report.passed());
  auto j = nlohmann::json::parse(r.report.to_json());
  EXPECT_EQ(j["environment"]["config_hash"], config_hash(c));
}

TEST(Cli, MalformedConfigExitsTwoWithoutOutput)
{
  fs::path dir = scratch("malformed");
  fs::path cfg = write(dir.parent_path() / "malformed.yaml", "domain: {type: disk, radius: -1}\n");
  EXPECT_EQ(run("geometry-check --config " + cfg.string() + " --out " + dir.string()), 2);
  EXPECT_FALSE(fs::exists(dir));
  fs::path bad = write(dir.parent_path() / "syntax.yaml", "domain: {type: disk\n");
  EXPECT_EQ(run("simulate --config " + bad.string() + " --out " + dir.string()), 2);
  EXPECT_FALSE(fs::exists(dir));
}

TEST(Cli, UsageErrorsExitTwo)
{
  EXPECT_EQ(run("no-such-command"), 2);
  EXPECT_EQ(run("simulate --config /nonexistent.yaml"), 2);
  fs::path cfg = write(scratch("env").parent_path() / "env.yaml", small_sim);
  EXPECT_EQ(run("geometry-check --config " + cfg.string() + " --out " + scratch("env").string(), "GAPKIN_THREADS=zero"), 2);
}

TEST(Cli, GeometryCheckWritesReport)
{
  fs::path dir = scratch("geom");
  fs::path cfg = write(dir.parent_path() / "geom.yaml", small_sim);
  ASSERT_EQ(run("geometry-check --config " + cfg.string() + " --out " + dir.string()), 0);
  for (const char* f : {"report.json", "geometry.csv", "config.resolved.yaml"}) EXPECT_TRUE(fs::exists(dir / f)) << f;
  auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["command"], "geometry-check");
  EXPECT_EQ(j["status"], "pass");
  // the resolved config reproduces the hash
  RunConfig again = load_config((dir / "config.resolved.yaml").string());
  EXPECT_EQ(config_hash(again), j["environment"]["config_hash"].get<std::string>());
}

TEST(Cli, BrokenToleranceFailsWithExitOne)
{
  fs::path dir = scratch("broken");
  fs::path cfg = write(dir.parent_path() / "broken.yaml", R"(
experiment: broken
acceptance:
  only: [change_of_variables]
  tolerances: {cov_ball: 0}
)");
  EXPECT_EQ(run("acceptance --config " + cfg.string() + " --out " + dir.string()), 1);
  auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  ASSERT_EQ(j["checks"].size(), 11u);
  int failed = 0, skipped = 0;
  for (const auto& c : j["checks"]) {
    failed += c["status"] == "fail";
    skipped += c["status"] == "skipped";
  }
  EXPECT_EQ(failed, 1);
  EXPECT_EQ(skipped, 10);
}

TEST(Cli, SimulateBitStableAcrossThreadsAndReruns)
{
  fs::path cfg = write(scratch("det").parent_path() / "det.yaml", small_sim);
  std::string ref;
  for (int t : {1, 2, 8}) {
    fs::path dir = scratch("det" + std::to_string(t));
    ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + dir.string() + " --threads " + std::to_string(t)), 0);
    std::string csv = slurp(dir / "simulate.csv");
    ASSERT_FALSE(csv.empty());
    if (ref.empty())
      ref = csv;
    else
      EXPECT_EQ(csv, ref) << "threads=" << t;
  }
  fs::path again = scratch("det_again");
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + again.string(), "GAPKIN_THREADS=3"), 0);
  EXPECT_EQ(slurp(again / "simulate.csv"), ref);
}

TEST(Cli, SeedOverrideChangesOutput)
{
  fs::path cfg = write(scratch("seed").parent_path() / "seed.yaml", small_sim);
  fs::path a = scratch("seed_a"), b = scratch("seed_b");
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + a.string()), 0);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + b.string() + " --seed 7"), 0);
  EXPECT_NE(slurp(a / "simulate.csv"), slurp(b / "simulate.csv"));
  EXPECT_NE(slurp(b / "simulate.csv").find("seed=7"), std::string::npos);
}

TEST(Cli, AbsorbingEmpties)
{
  fs::path dir = scratch("abs");
  fs::path cfg = write(dir.parent_path() / "abs.yaml", R"(
domain: {type: disk, radius: 1.0}
velocity: {r0: 0.5, R0: 3.0}
sim:
  mode: absorbing
  particles: 20000
  t_end: 5
  record_dt: 0.5
  initial: {type: uniform}
)");
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + dir.string()), 0);
  auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  bool found = false;
  for (const auto& c : j["checks"])
    if (c["name"] == "absorbed_after_D_over_r0") {
      found = true;
      EXPECT_EQ(c["status"], "pass");
    }
  EXPECT_TRUE(found);
}

TEST(Cli, PureSpecularSpectrumRefused)
{
  fs::path dir = scratch("specular");
  fs::path cfg = write(dir.parent_path() / "specular.yaml", R"(
wall: {kernel: maxwell, theta: [1.0], alpha: [1.0]}
spectral:
  full_grid: {boundary_nodes: 16, speed_nodes: 4, direction_nodes: 4}
)");
  EXPECT_EQ(run("spectrum --config " + cfg.string() + " --out " + dir.string()), 1);
  auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  ASSERT_EQ(j["checks"].size(), 1u);
  EXPECT_EQ(j["checks"][0]["name"], "admissible");
  EXPECT_NE(j["checks"][0]["detail"].get<std::string>().find("c_beta"), std::string::npos);
}

TEST(Cli, StochasticSpectrumHasRootAtZero)
{
  fs::path dir = scratch("spec");
  fs::path cfg = write(dir.parent_path() / "spec.yaml", R"(
spectral:
  grid: {boundary_nodes: 64, speed_nodes: 16}
  scan: {complex: false, re_min: -1.0, re_max: 0.25}
)");
  ASSERT_EQ(run("spectrum --config " + cfg.string() + " --out " + dir.string()), 0);
  auto j = nlohmann::json::parse(slurp(dir / "report.json"));
  EXPECT_EQ(j["checks"][0]["name"], "root_at_zero");
  EXPECT_EQ(j["checks"][0]["status"], "pass");
  EXPECT_GE(j["values"]["root_count"].get<double>(), 1.0);
}
