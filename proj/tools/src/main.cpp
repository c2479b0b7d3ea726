#include "gapkin_cli/commands.hpp"

#include <gapkin/common.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace fs = std::filesystem;
using namespace gapkin::cli;

namespace {

int env_threads()
{
  const char* s = std::getenv("GAPKIN_THREADS");
  if (!s || !*s) return 1;
  char* end = nullptr;
  long v = std::strtol(s, &end, 10);
  if (*end != '\0' || v < 1 || v > 1024) throw ConfigError(fmt::format("GAPKIN_THREADS: invalid value '{}'", s));
  return static_cast<int>(v);
}

void write_file(const fs::path& p, const std::string& text)
{
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

void print_summary(const RunReport& r, const fs::path& dir)
{
  for (const auto& c : r.checks) {
    if (r.command == "acceptance") break; // already streamed
    std::cout << fmt::format("[{:>7}] {:<32} value={} tol={}  {}\n", status_name(c.status), c.name, num(c.value),
                             num(c.tolerance), c.detail);
  }
  std::cout << fmt::format("{}: {} (config {}), output in {}\n", r.command, r.passed() ? "PASS" : "FAIL",
                           r.config_hash, dir.string());
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Collisionless kinetic transport with diffuse walls"};
  app.require_subcommand(1);
  app.set_version_flag("--version", GAPKIN_VERSION);

  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  const std::map<std::string, std::string> help = {
      {"geometry-check", "change-of-variables and flatness checks"},
      {"validate-wall", "kernel normalization, integrability and partly diffuse constants"},
      {"simulate", "Monte Carlo time series with rebound-law checks"},
      {"spectrum", "eigenvalue-1 scan of the boundary operator"},
      {"invariant", "invariant density from the Perron vector"},
      {"laplace-check", "Monte Carlo vs resolvent terms of the Laplace transform"},
      {"acceptance", "the full acceptance suite"},
  };
  for (const auto& [name, fn] : commands()) {
    auto* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("-c,--config", config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--out", out_dir, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "master seed (overrides the config)");
    sub->add_option("-j,--threads", threads, "worker threads (default: $GAPKIN_THREADS or 1)")
        ->check(CLI::Range(1, 1024));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();

  RunConfig cfg;
  int n_threads = 1;
  try {
    cfg = load_config(config_path);
    if (seed) cfg.seed = *seed;
    validate_semantics(cfg, cmd);
    n_threads = threads ? *threads : env_threads();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  fs::path dir = !out_dir.empty() ? fs::path(out_dir)
                 : !cfg.output.empty() ? fs::path(cfg.output)
                                       : fs::path("gapkin-out") / (cfg.experiment.empty() ? cmd : cfg.experiment);
  cfg.output = dir.string();

  try {
    CommandResult res = commands().at(cmd)(cfg, n_threads);
    fs::create_directories(dir);
    write_file(dir / "config.resolved.yaml", dump_config(cfg));
    for (const auto& [name, text] : res.files) write_file(dir / name, text);
    write_file(dir / "report.json", res.report.to_json());
    print_summary(res.report, dir);
    return res.report.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << cmd << ": " << e.what() << "\n";
    return 1;
  }
}
