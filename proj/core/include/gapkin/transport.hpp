#pragma once

#include "gapkin/common.hpp"
#include "gapkin/geometry.hpp"
#include "gapkin/velocity.hpp"
#include "gapkin/wall.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace gapkin {

struct Particle {
  Vec x = Vec::Zero();
  Vec v = Vec::Zero();
  double weight = 1.0;
  std::uint32_t rebounds = 0;
  double next_hit = 0.0; // absolute time of the next wall hit
  bool alive = true;
};

// State right after a rebound.
struct Event {
  double t = 0.0;
  Vec x = Vec::Zero();
  Vec v = Vec::Zero();
};

struct Ensemble {
  std::vector<Particle> particles;
  std::uint64_t seed = 0;
  std::uint64_t index_offset = 0; // global index of particles[0]
  double time = 0.0;
  int log_depth = 0;         // events kept per particle
  std::vector<Event> events; // particle-major, log_depth slots each

  const Event& event(std::size_t p, int k) const { return events[p * log_depth + (k - 1)]; }
};

using Observable = std::function<double(const Vec& x, const Vec& v)>;
using Density = std::function<double(const Vec& x, const Vec& v)>;

enum class Mode { evolve, absorbing };

class Simulator {
public:
  Simulator(const Wall& wall, Mode mode = Mode::evolve, int threads = 1)
    : wall_(wall), mode_(mode), threads_(threads)
  {}

  const Wall& wall() const { return wall_; }
  const Domain& domain() const { return wall_.kernel().domain(); }
  int threads() const { return threads_; }

  //! Fill next_hit for freshly placed particles.
  void prime(Ensemble& ens) const;
  //! Free flight + wall events until t_target.
  void advance(Ensemble& ens, double t_target) const;

private:
  const Wall& wall_;
  Mode mode_;
  int threads_;
};

// --- initial data ---------------------------------------------------------

//! n particles uniform in Omega x V w.r.t. dx m(dv), each of weight `weight`.
Ensemble sample_uniform(const Domain& dom, const SpeedMeasure& sm, std::size_t n, std::uint64_t seed,
                        std::uint64_t offset, double weight, int threads = 1);

//! Weighted sampling of a density f: x uniform, speed from the proposal h(rho),
//! uniform direction; weights f / proposal / n_total.
Ensemble sample_weighted(const Domain& dom, const SpeedMeasure& sm, const Density& f,
                         const std::function<double(double)>& h, std::size_t n, std::size_t n_total,
                         std::uint64_t seed, std::uint64_t offset, int threads = 1);

//! Same with a signed density (negative weights allowed). Evolving only the
//! deviation f - Psi from equilibrium removes the equilibrium's sampling noise.
Ensemble sample_signed(const Domain& dom, const SpeedMeasure& sm, const Density& f,
                       const std::function<double(double)>& h, std::size_t n, std::size_t n_total,
                       std::uint64_t seed, std::uint64_t offset, int threads = 1);

//! Copies of given (x, v) points cycling through the list.
Ensemble sample_pointcloud(const std::vector<std::pair<Vec, Vec>>& pts, std::size_t n,
                           std::uint64_t seed, std::uint64_t offset, double weight);

// --- observables ---------------------------------------------------------

struct GenerationMass {
  double t = 0.0;
  std::vector<double> mass; // last entry collects every generation >= n_max
};

GenerationMass generation_masses(const Ensemble& ens, int n_max);
double total_mass(const Ensemble& ens);

// Histogram over (r, phi, rho, mu) with r = |x|, phi = azimuth of x,
// rho = |v|, mu = cos angle(x, v). n_phi = 1 is the rotation-reduced grid.
// Radial bins are equal-volume (uniform in r^d).
class PhaseGrid {
public:
  PhaseGrid(const Domain& dom, const SpeedMeasure& sm, int n_r, int n_phi, int n_rho, int n_mu);

  std::size_t cells() const { return static_cast<std::size_t>(n_r_) * n_phi_ * n_rho_ * n_mu_; }
  std::size_t index(const Vec& x, const Vec& v) const;
  double measure(std::size_t cell) const { return measure_[cell]; }
  bool same_as(const PhaseGrid& o) const;
  int n_r() const { return n_r_; }
  int n_phi() const { return n_phi_; }
  int n_rho() const { return n_rho_; }
  int n_mu() const { return n_mu_; }
  //! Cell bounds: r, phi, rho, mu (lo, hi) pairs.
  void bounds(std::size_t cell, double* lo, double* hi) const;
  int dim() const { return dim_; }

private:
  int dim_;
  double R_, r0_, R0_;
  int n_r_, n_phi_, n_rho_, n_mu_;
  std::vector<double> measure_;
};

struct Histogram {
  std::vector<double> mass;
  std::vector<double> sumsq; // sum of squared weights per cell (noise estimate)
  double total() const;
  std::vector<double> density(const PhaseGrid& g) const;
};

Histogram estimate_density(const Ensemble& ens, const PhaseGrid& grid);
void accumulate_density(const Ensemble& ens, const PhaseGrid& grid, Histogram& h);
//! Cell indices of alive particles (for bootstrap); dead particles get SIZE_MAX.
std::vector<std::size_t> cell_indices(const Ensemble& ens, const PhaseGrid& grid);
//! Cell masses of an analytic density by tensor Gauss quadrature.
Histogram project_density(const PhaseGrid& grid, const Domain& dom, const SpeedMeasure& sm,
                          const Density& f, int order = 4);

double l1_distance(const Histogram& a, const Histogram& b);
//! Expected L1 distance between the histogram and its mean from sampling noise.
double l1_noise(const Histogram& h);

//! L1 distances between bootstrap resamples of a weighted sample and the sample.
std::vector<double> bootstrap_l1(const std::vector<std::size_t>& cells,
                                 const std::vector<double>& weights, std::size_t n_cells,
                                 int replicates, std::uint64_t seed);

struct DecayFit {
  double rate = 0;
  double intercept = 0;
  double residual = 0;
  int points = 0;
};

//! Least squares line through (t, log d) on [t_min, t_max]; points with
//! d < 3 noise are dropped.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& d, double t_min,
                        double t_max, const std::vector<double>& noise = {});

struct LaplaceEstimate {
  double value = 0;
  double stderr_ = 0;
  double sum = 0, sumsq = 0; // of per-particle contributions scaled by count
  std::size_t count = 0;
};

//! Monte Carlo estimate of int_0^inf e^{-lambda t} <g, U_{n+1}(t) f> dt from
//! the event log of an ensemble advanced past the (n+1)-th rebound.
LaplaceEstimate laplace_functional(const Ensemble& ens, const Domain& dom, int n, double lambda,
                                   const Observable& g, int order = 16, int threads = 1);
LaplaceEstimate combine(const LaplaceEstimate& a, const LaplaceEstimate& b);

// --- time series driver -------------------------------------------------------

struct SeriesRow {
  double t = 0;
  double total = 0;
  std::vector<double> gen;
  double l1 = std::numeric_limits<double>::quiet_NaN();
  double noise = std::numeric_limits<double>::quiet_NaN();
};

struct SeriesSpec {
  std::size_t particles = 100000;
  std::size_t batch = 1000000;
  double t_end = 10;
  double record_dt = 0.5;
  int max_generation = 10;
  int rebound_checks = 5; // k-th rebound <= k D / r0 for k up to this
  std::optional<PhaseGrid> grid;
  std::optional<Histogram> equilibrium;
  bool keep_initial_cells = false;
};

struct SeriesResult {
  std::vector<SeriesRow> rows;
  std::vector<std::string> violations;
  std::vector<std::size_t> initial_cells;
  std::vector<double> initial_weights;
  std::vector<Histogram> histograms; // per record time when a grid is given
};

//! Runs batches from `factory(offset, count)` and aggregates per record time.
SeriesResult run_series(const Simulator& sim, double r0,
                        const std::function<Ensemble(std::uint64_t, std::size_t)>& factory,
                        const SeriesSpec& spec);

} // namespace gapkin
