#pragma once

#include "gapkin_cli/config.hpp"
#include "gapkin_cli/report.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace gapkin::cli {

//! The acceptance checks, one per criterion, in suite order.
const std::vector<std::string>& check_names();

//! Tolerance name -> default value. Overridable from the config.
std::map<std::string, double> default_tolerances();

struct AcceptanceOptions {
  std::uint64_t seed = 1;
  int threads = 1;
  std::map<std::string, double> tolerances; // merged over the defaults
  std::size_t rebound_particles = 100000;
  std::size_t stationarity_particles = 200000;
  std::size_t laplace_particles = 1000000;
  std::size_t decay_particles = 10000000;
  std::size_t determinism_particles = 20000;

  double tol(const std::string& name) const;
};

AcceptanceOptions acceptance_options(const RunConfig& c, int threads);

//! Runs one named check.
Check run_check(const std::string& name, const AcceptanceOptions& o);

//! Runs the selected checks (all when `only` is empty); every check appears
//! exactly once in the result, unselected ones as skipped.
std::vector<Check> run_acceptance(const AcceptanceOptions& o, const std::vector<std::string>& only = {},
                                  const std::function<void(const Check&)>& on_check = {});

} // namespace gapkin::cli
