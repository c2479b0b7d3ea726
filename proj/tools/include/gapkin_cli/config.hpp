#pragma once

#include <gapkin/geometry.hpp>
#include <gapkin/spectral.hpp>
#include <gapkin/transport.hpp>
#include <gapkin/velocity.hpp>
#include <gapkin/wall.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapkin::cli {

// Raised for anything wrong with the config file itself: parse errors,
// unknown keys, wrong types, out-of-range values. Maps to exit code 2.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct DomainConfig {
  std::string type = "disk"; // disk | ball | ellipse
  double radius = 1.0;
  double a = 1.0, b = 1.0; // ellipse semi-axes
};

struct VelocityConfig {
  double r0 = 0.5, R0 = 3.0;
  std::string weight = "power"; // power | stretched | gaussian
  double m = 0.0;               // power exponent
  double alpha = 0.0, s = 1.0;  // stretched
  double beta = 0.0;            // gaussian
  int radial_nodes = 64;
};

struct WallConfig {
  std::string kernel = "maxwell"; // maxwell | uniform
  std::vector<double> theta{1.0}; // one value = constant field
  std::vector<double> alpha{0.0};
  std::string reflection = "specular"; // specular | bounceback
};

struct InitialConfig {
  std::string type = "uniform"; // uniform | pointcloud | invariant
  double tilt = 0.0;            // invariant: Psi_H (1 + tilt x1 / R)
  std::vector<std::array<double, 6>> points; // pointcloud: x0 x1 x2 v0 v1 v2
};

struct FitConfig {
  bool enabled = false;
  double t_min = 1.5, t_max = 5.0;
};

struct SimConfig {
  std::size_t particles = 100000;
  std::size_t batch = 1000000;
  double t_end = 10.0;
  double record_dt = 0.5;
  std::string mode = "evolve"; // evolve | absorbing
  int max_generation = 10;
  int rebound_checks = 5;
  std::array<int, 4> grid{2, 4, 8, 4}; // n_r, n_phi, n_rho, n_mu
  InitialConfig initial;
  FitConfig fit;
};

struct SpectralConfig {
  SpectralGrid grid;
  ScanSettings scan;
  SpectralGrid full_grid{64, 16, 16, 8, 8192, 1e-13, 20000, 1};
};

struct GeometryConfig {
  int panels = 64;
  int flatness_samples = 512;
};

struct LaplaceConfig {
  std::size_t particles = 1000000;
  std::vector<int> n{0, 1};
  std::vector<double> lambda{0.5, 1.0};
  double tilt = 0.5;
  double rel_tol = 0.05;
};

struct AcceptanceConfig {
  std::vector<std::string> only; // empty = every check
  std::map<std::string, double> tolerances;
  std::size_t rebound_particles = 100000;
  std::size_t stationarity_particles = 200000;
  std::size_t laplace_particles = 1000000;
  std::size_t decay_particles = 10000000;
  std::size_t determinism_particles = 20000;
};

struct RunConfig {
  std::string experiment = "run";
  std::uint64_t seed = 1;
  std::string output; // not part of the hash
  DomainConfig domain;
  VelocityConfig velocity;
  WallConfig wall;
  SimConfig sim;
  SpectralConfig spectral;
  GeometryConfig geometry;
  LaplaceConfig laplace;
  AcceptanceConfig acceptance;
};

//! Parse and validate; throws ConfigError.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

//! Canonical YAML of the fully resolved config (defaults filled in).
std::string dump_config(const RunConfig& c, bool with_output = true);
//! FNV-1a of the canonical dump without the output directory, as 16 hex
//! digits. Worker count is not a config setting, so it never enters the hash.
std::string config_hash(const RunConfig& c);

// Model objects built from a config. The wall keeps references into the
// domain and speed measure, so everything lives in one bundle.
struct Model {
  Domain domain;
  SpeedMeasure speeds;
  std::unique_ptr<Wall> wall;
};

std::unique_ptr<Model> build_model(const RunConfig& c);

} // namespace gapkin::cli
