// Runs the eleven acceptance criteria at their stated tolerances and prints
// one PASS/FAIL line per criterion. Exit status is nonzero if any fails.
#include "gapkin_cli/acceptance.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <thread>

using namespace gapkin::cli;

int main(int argc, char** argv)
{
  AcceptanceOptions o;
  o.seed = 1;
  o.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* t = std::getenv("GAPKIN_THREADS")) o.threads = std::max(1, std::atoi(t));
  o.tolerances = {
      {"cov_disk", 1e-6},       {"cov_ball", 1e-5},           {"cov_extra", 1e-5},
      {"flatness", 1e-6},       {"w0_norm", 1e-6},            {"w0_leading", 1e-8},
      {"full_grid_agreement", 1e-4},                          {"invariant_closed_form", 1e-6},
      {"stationarity_band_scale", 1.0},                       {"decay_ratio", 1.5},
      {"laplace_rel", 0.05},    {"gap_rate_rel", 0.25},       {"c_beta", 1e-12},
      {"lambda_beta", 1e-7},    {"truncation_ratio", 0.2},
  };
  o.rebound_particles = 100000;
  o.laplace_particles = 1000000;
  o.decay_particles = 10000000;

  std::vector<std::string> only(argv + 1, argv + argc);
  const auto& names = check_names();
  int failed = 0;
  run_acceptance(o, only, [&](const Check& c) {
    auto idx = std::find(names.begin(), names.end(), c.name) - names.begin() + 1;
    if (c.status == Status::fail) ++failed;
    std::cout << fmt::format("criterion {:>2} {:<22} {:<4} {:8.2f}s  {}\n", idx, c.name,
                             c.status == Status::pass ? "PASS" : c.status == Status::fail ? "FAIL" : "SKIP", c.seconds,
                             c.detail)
              << std::flush;
  });
  std::cout << (failed ? fmt::format("{} criteria failed\n", failed) : std::string("all criteria passed\n"));
  return failed ? 1 : 0;
}
