#include "gapkin_cli/acceptance.hpp"
#include "gapkin_cli/commands.hpp"

#include <gapkin/spectral.hpp>

#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace gapkin::cli {

const std::vector<std::string>& check_names()
{
  static const std::vector<std::string> names = {
      "change_of_variables", "flatness",        "rebound_vanishing", "stochastic_structure",
      "invariant_density",   "kernel_decay",    "laplace_identity",  "gap_vs_decay",
      "partly_diffuse",      "truncated_kernel", "determinism"};
  return names;
}

std::map<std::string, double> default_tolerances()
{
  return {
      {"cov_disk", 1e-6},
      {"cov_ball", 1e-5},
      {"cov_extra", 1e-5},
      {"flatness", 1e-6},
      {"w0_norm", 1e-6},
      {"w0_leading", 1e-8},
      {"full_grid_agreement", 1e-4},
      {"invariant_closed_form", 1e-6},
      {"stationarity_band_scale", 1.0},
      {"decay_ratio", 1.5},
      {"laplace_rel", 0.05},
      {"gap_rate_rel", 0.25},
      {"c_beta", 1e-12},
      {"lambda_beta", 1e-7},
      {"truncation_ratio", 0.2},
  };
}

double AcceptanceOptions::tol(const std::string& name) const
{
  auto it = tolerances.find(name);
  if (it != tolerances.end()) return it->second;
  return default_tolerances().at(name);
}

AcceptanceOptions acceptance_options(const RunConfig& c, int threads)
{
  AcceptanceOptions o;
  o.seed = c.seed;
  o.threads = threads;
  o.tolerances = default_tolerances();
  for (const auto& [k, v] : c.acceptance.tolerances) o.tolerances[k] = v;
  o.rebound_particles = c.acceptance.rebound_particles;
  o.stationarity_particles = c.acceptance.stationarity_particles;
  o.laplace_particles = c.acceptance.laplace_particles;
  o.decay_particles = c.acceptance.decay_particles;
  o.determinism_particles = c.acceptance.determinism_particles;
  return o;
}

namespace {

// Reference preset: unit disk, speeds in [0.5, 3], Maxwell wall at theta = 1.
struct Reference {
  Domain dom = Domain::disk(1.0);
  SpeedMeasure sm{2, 0.5, 3.0};
  DiffuseKernel k = DiffuseKernel::maxwell(dom, sm, BoundaryField(1.0));
  Wall wall{k};
};

Check finish(Check c, bool ok)
{
  c.status = ok ? Status::pass : Status::fail;
  return c;
}

// --- 1 -------------------------------------------------------------------
Check change_of_variables(const AcceptanceOptions& o)
{
  Check c{"change_of_variables"};
  auto one = [](const Vec&) { return 1.0; };
  double worst_disk = 0, worst_ball = 0, worst_extra = 0;

  Domain disk = Domain::disk(1.0);
  for (double t : {0.0, 0.7, 2.0, 4.5}) {
    CovResult r = change_of_variables_check(disk, disk.point_at(t), one);
    worst_disk = std::max({worst_disk, std::abs(r.lhs - 2.0), std::abs(r.rhs - 2.0)});
  }
  Domain ball = Domain::ball(1.0);
  for (auto [th, ph] : {std::pair{0.3, 0.0}, std::pair{1.4, 2.0}, std::pair{2.8, 5.0}}) {
    CovResult r = change_of_variables_check(ball, ball.sphere_point(th, ph), one);
    worst_ball = std::max({worst_ball, std::abs(r.lhs - pi), std::abs(r.rhs - pi)});
  }
  const std::vector<std::function<double(const Vec&)>> extra = {
      [](const Vec& s) { return s[0] * s[0]; },
      [](const Vec& s) { return std::exp(s[0] + 0.5 * s[1]); },
      [](const Vec& s) { return std::pow(1.0 + s[1], 3); },
      [](const Vec& s) { return 1.0 / (2.0 + s[0] - s[2]); },
      [](const Vec& s) { return std::cos(3.0 * s[0]) * std::sin(2.0 * s[1]) + 1.0; },
  };
  Domain ell = Domain::ellipse(1.5, 0.8);
  for (const auto& g : extra) {
    for (const Domain* dom : {&disk, &ball, &ell}) {
      Vec x = dom->dim() == 2 ? dom->point_at(1.1) : dom->sphere_point(1.1, 0.4);
      CovResult r = change_of_variables_check(*dom, x, g);
      worst_extra = std::max(worst_extra, std::abs(r.lhs - r.rhs));
    }
  }
  c.value = std::max({worst_disk, worst_ball, worst_extra});
  c.tolerance = o.tol("cov_disk");
  c.detail = fmt::format("disk |err| {:.3g} (tol {:g}), ball |err| {:.3g} (tol {:g}), 5 extra functions |lhs-rhs| "
                         "{:.3g} (tol {:g})",
                         worst_disk, o.tol("cov_disk"), worst_ball, o.tol("cov_ball"), worst_extra,
                         o.tol("cov_extra"));
  return finish(c, worst_disk <= o.tol("cov_disk") && worst_ball <= o.tol("cov_ball") &&
                       worst_extra <= o.tol("cov_extra"));
}

// --- 2 -------------------------------------------------------------------
Check flatness(const AcceptanceOptions& o)
{
  Check c{"flatness"};
  double c1 = flatness_constant(Domain::disk(1.0), 512).C;
  double c2 = flatness_constant(Domain::disk(2.0), 512).C;
  c.value = std::max(std::abs(c1 - 0.5), std::abs(c2 - 0.25));
  c.tolerance = o.tol("flatness");
  c.detail = fmt::format("R=1: C={:.12g} (want 0.5); R=2: C={:.12g} (want 0.25)", c1, c2);
  return finish(c, c.value <= c.tolerance);
}

// --- 3 -------------------------------------------------------------------
Check rebound_vanishing(const AcceptanceOptions& o)
{
  Check c{"rebound_vanishing"};
  Reference ref;
  Simulator sim(ref.wall, Mode::evolve, o.threads);
  const std::size_t n = o.rebound_particles;
  SeriesSpec spec;
  spec.particles = n;
  spec.batch = 200000;
  spec.t_end = 24.0;
  spec.record_dt = 0.5;
  spec.max_generation = 5;
  spec.rebound_checks = 5;
  SeriesResult res = run_series(
      sim, ref.sm.r0(),
      [&](std::uint64_t off, std::size_t cnt) {
        return sample_uniform(ref.dom, ref.sm, cnt, o.seed, off, 1.0 / double(n), o.threads);
      },
      spec);
  // generation masses must be exactly zero after (n + 1) D / r0 = 4 (n + 1)
  std::size_t zero_rows = 0;
  for (const auto& row : res.rows)
    for (int g = 0; g < spec.max_generation; ++g)
      if (row.t >= 4.0 * (g + 1)) zero_rows += row.gen[g] == 0.0;
  c.value = static_cast<double>(res.violations.size());
  c.tolerance = 0;
  c.detail = fmt::format("{} particles, rebounds 1..5 checked against k D/r0 (+1e-9), {} generation/time "
                         "cells required to vanish; {} violations",
                         n, zero_rows, res.violations.size());
  if (!res.violations.empty()) c.detail += "; first: " + res.violations.front();
  return finish(c, res.violations.empty());
}

// --- 4 -------------------------------------------------------------------
Check stochastic_structure(const AcceptanceOptions& o)
{
  Check c{"stochastic_structure"};
  Reference ref;
  SpectralGrid g;
  g.threads = o.threads;
  BoundaryDiscretization disc(ref.k, g);
  ReducedOperator W0(disc, 0.0);
  double norm = W0.norm_L1();
  PowerResult lead = W0.leading();
  Eigen::VectorXcd v = lead.vector;
  double vmin = v.real().minCoeff(), vmax = v.real().maxCoeff();
  bool positive = (vmin > 0) || (vmax < 0);

  SpectralGrid gs;
  gs.boundary_nodes = 64;
  gs.speed_nodes = 16;
  gs.direction_nodes = 16;
  gs.threads = o.threads;
  BoundaryDiscretization small(ref.k, gs);
  double worst = 0;
  std::string pairs;
  for (double l : {0.0, 0.2, 0.5}) {
    cplx red = ReducedOperator(small, l).leading().value;
    cplx full = FullGridOperator(ref.wall, gs, l).leading().value;
    worst = std::max(worst, std::abs(red - full));
    pairs += fmt::format(" lambda={:g}: {:.10f}/{:.10f}", l, red.real(), full.real());
  }
  double lead_err = std::abs(lead.value - 1.0);
  c.value = std::max({std::abs(norm - 1.0), lead_err, worst});
  c.tolerance = o.tol("w0_norm");
  c.detail = fmt::format("||W(0)|| = {:.12f} (tol {:g}); leading = {:.13f} (tol {:g}); eigenvector positive: "
                         "{}; reduced/full leading{} (tol {:g})",
                         norm, o.tol("w0_norm"), lead.value.real(), o.tol("w0_leading"), positive ? "yes" : "no",
                         pairs, o.tol("full_grid_agreement"));
  return finish(c, std::abs(norm - 1.0) <= o.tol("w0_norm") && lead_err <= o.tol("w0_leading") && positive &&
                       worst <= o.tol("full_grid_agreement"));
}

// --- 5 -------------------------------------------------------------------
Check invariant_density_check(const AcceptanceOptions& o)
{
  Check c{"invariant_density"};
  Reference ref;
  SpectralGrid g;
  g.threads = o.threads;
  BoundaryDiscretization disc(ref.k, g);
  InvariantDensity inv = invariant_density(disc);

  // flux balance: the wall Maxwellian reproduces itself, so u = C exp(-s^2/2)
  // with C fixed by unit mass over the disk x annulus
  double zv = 2.0 * pi * integrate(gauss_legendre(64, 0.5, 3.0), [](double r) { return r * std::exp(-r * r / 2); });
  const double C = 1.0 / (pi * zv);
  double num = 0, den = 0;
  for (std::size_t i = 0; i < disc.nx(); ++i)
    for (std::size_t a = 0; a < disc.ns(); ++a) {
      double s = disc.speeds().x[a], w = disc.grid().w[i] * disc.c()[a];
      double exact = C * std::exp(-s * s / 2);
      num += w * std::abs(inv.table()(i, a) - exact);
      den += w * exact;
    }
  double rel = num / den;

  // stationarity of the simulator started from Psi_H
  const std::size_t n = o.stationarity_particles;
  Simulator sim(ref.wall, Mode::evolve, o.threads);
  PhaseGrid grid(ref.dom, ref.sm, 2, 4, 4, 4);
  SeriesSpec spec;
  spec.particles = n;
  spec.batch = 500000;
  spec.t_end = 40.0;
  spec.record_dt = 2.0;
  spec.grid = grid;
  spec.keep_initial_cells = true;
  Density psi = [&](const Vec& x, const Vec& v) { return inv(x, v); };
  auto h = [](double r) { return r * std::exp(-r * r / 2); };
  SeriesResult res = run_series(
      sim, ref.sm.r0(),
      [&](std::uint64_t off, std::size_t cnt) {
        return sample_weighted(ref.dom, ref.sm, psi, h, cnt, n, o.seed, off, o.threads);
      },
      spec);
  auto boot = bootstrap_l1(res.initial_cells, res.initial_weights, grid.cells(), 256, o.seed);
  double mean = std::accumulate(boot.begin(), boot.end(), 0.0) / boot.size(), var = 0;
  for (double b : boot) var += (b - mean) * (b - mean);
  double sd = std::sqrt(var / (boot.size() - 1));
  // Two independent samples of the same law sit sqrt(2) further apart than one
  // sample from the law. Every recorded time is compared with the same t = 0
  // histogram, so the band is family-wise: Bonferroni at 1% over K times.
  const double K = static_cast<double>(res.histograms.size() - 1);
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - 0.01 / K);
  double band = o.tol("stationarity_band_scale") * std::sqrt(2.0) * (mean + z * sd);
  double worst = 0, worst_t = 0;
  for (std::size_t k = 1; k < res.histograms.size(); ++k) {
    double d = l1_distance(res.histograms[k], res.histograms[0]);
    if (d > worst) {
      worst = d;
      worst_t = res.rows[k].t;
    }
  }
  c.value = rel;
  c.tolerance = o.tol("invariant_closed_form");
  c.detail = fmt::format("relative L1 error vs C M_theta: {:.3g} (tol {:g}); Perron residual {:.2g}; stationarity: "
                         "max L1 to t=0 histogram {:.4g} at t={:g}, bootstrap band {:.4g} (z={:.2f}, {} particles, t<=40)",
                         rel, c.tolerance, inv.residual(), worst, worst_t, band, z, n);
  return finish(c, rel <= c.tolerance && worst <= band && res.violations.empty());
}

// --- 6 -------------------------------------------------------------------
Check kernel_decay(const AcceptanceOptions& o)
{
  Check c{"kernel_decay"};
  // truncation R0 = 5 sqrt(theta) (see the velocity defaults)
  Domain dom = Domain::disk(1.0);
  SpeedMeasure sm(2, 0.5, 5.0);
  DiffuseKernel k = DiffuseKernel::maxwell(dom, sm, BoundaryField(1.0));
  std::vector<double> vals;
  std::string list;
  for (double eta : {1.0, 10.0, 100.0, 1000.0}) {
    cplx l(1.0, eta);
    vals.push_back(decay_bound_n2(k, l) * std::abs(l));
    list += fmt::format(" eta={:g}:{:.4f}", eta, vals.back());
  }
  double ratio = *std::max_element(vals.begin(), vals.end()) / vals.front();

  // tail of the resolvent series with C = sup over the sampled |lambda| n2
  SpectralGrid g;
  g.boundary_nodes = 64;
  g.speed_nodes = 16;
  g.threads = o.threads;
  BoundaryDiscretization disc(k, g);
  bool tail_ok = true;
  std::string tails;
  for (cplx l : {cplx(1.0, 1.0), cplx(1.0, 3.0)}) {
    double Cl = std::max(*std::max_element(vals.begin(), vals.end()), decay_bound_n2(k, l) * std::abs(l));
    ReducedOperator W(disc, l);
    for (int N : {4, 6}) {
      double lhs = resolvent_tail_norm(W, N);
      double rhs = resolvent_tail_bound(Cl, N, l, dom.diameter(), sm.r0());
      tail_ok = tail_ok && lhs <= rhs;
      tails += fmt::format(" [{:g}{:+g}i N={}: {:.3g} <= {:.3g}]", l.real(), l.imag(), N, lhs, rhs);
    }
  }
  c.value = ratio;
  c.tolerance = o.tol("decay_ratio");
  c.detail = fmt::format("n2|lambda| at eps=1:{}; max/first = {:.4f} (tol {:g}); tail inequality:{}", list, ratio,
                         c.tolerance, tails);
  return finish(c, ratio <= c.tolerance && tail_ok);
}

// --- 7 -------------------------------------------------------------------
Check laplace_identity(const AcceptanceOptions& o)
{
  Check c{"laplace_identity"};
  RunConfig rc;
  rc.seed = o.seed;
  rc.laplace.particles = o.laplace_particles;
  rc.laplace.n = {0, 1};
  rc.laplace.lambda = {0.5, 1.0};
  rc.laplace.rel_tol = o.tol("laplace_rel");
  CommandResult r = cmd_laplace_check(rc, o.threads);
  double worst = 0;
  std::string rows;
  for (const auto& ch : r.report.checks) {
    worst = std::max(worst, ch.value);
    rows += " " + ch.detail + ";";
  }
  c.value = worst;
  c.tolerance = o.tol("laplace_rel");
  c.detail = fmt::format("{} particles;{}", o.laplace_particles, rows);
  return finish(c, r.report.passed() && !r.report.checks.empty());
}

// --- 8 -------------------------------------------------------------------
Check gap_vs_decay(const AcceptanceOptions& o)
{
  Check c{"gap_vs_decay"};
  Reference ref;
  SpectralGrid g;
  g.threads = o.threads;
  ScanSettings s; // Re in [-1.5, 0.25], Im in [0, 3], step 0.05
  SpectralScan scan = scan_spectrum(ref.wall, g, s);
  const double gap = scan.gap;

  // Only the deviation a x1 Psi_H from equilibrium is simulated (signed
  // weights); its L1 norm is the distance to equilibrium. The deviation lives
  // in the m = 1 sector, which holds the slowest nonzero roots.
  SpectralGrid gi;
  gi.boundary_nodes = 128;
  gi.speed_nodes = 32;
  BoundaryDiscretization disc(ref.k, gi);
  InvariantDensity inv = invariant_density(disc);
  Density dev = [&](const Vec& x, const Vec& v) { return inv(x, v) * x[0]; };
  auto h = [](double r) { return r * std::exp(-r * r / 2); };
  Simulator sim(ref.wall, Mode::evolve, o.threads);
  const std::size_t n = o.decay_particles;

  std::vector<double> rates;
  std::string fits;
  bool ok = std::isfinite(gap) && gap > 0;
  for (auto gg : {std::array<int, 4>{2, 4, 8, 4}, std::array<int, 4>{1, 4, 8, 8}}) {
    PhaseGrid grid(ref.dom, ref.sm, gg[0], gg[1], gg[2], gg[3]);
    Histogram zero;
    zero.mass.assign(grid.cells(), 0.0);
    zero.sumsq.assign(grid.cells(), 0.0);
    SeriesSpec spec;
    spec.particles = n;
    spec.batch = 1000000;
    spec.t_end = 6.0;
    spec.record_dt = 0.25;
    spec.grid = grid;
    spec.equilibrium = zero;
    SeriesResult res = run_series(
        sim, ref.sm.r0(),
        [&](std::uint64_t off, std::size_t cnt) {
          return sample_signed(ref.dom, ref.sm, dev, h, cnt, n, o.seed, off, o.threads);
        },
        spec);
    std::vector<double> t, d, nz;
    for (const auto& row : res.rows) {
      t.push_back(row.t);
      d.push_back(row.l1);
      nz.push_back(row.noise);
    }
    DecayFit fit = fit_decay_rate(t, d, 1.5, 5.0, nz);
    rates.push_back(fit.rate);
    ok = ok && fit.rate > 0 && std::abs(fit.rate / gap - 1.0) <= o.tol("gap_rate_rel") && res.violations.empty();
    fits += fmt::format(" grid {}x{}x{}x{}: rate {:.4f} ({} points);", gg[0], gg[1], gg[2], gg[3], fit.rate,
                        fit.points);
  }
  double dev_max = 0;
  for (double r : rates) dev_max = std::max(dev_max, std::abs(r / gap - 1.0));
  c.value = dev_max;
  c.tolerance = o.tol("gap_rate_rel");
  c.detail = fmt::format("scan gap {:.6f} (refinement delta {:.2g});{} {} particles, fit window [1.5, 5]", gap,
                         scan.gap_delta, fits, n);
  return finish(c, ok);
}

// --- 9 -------------------------------------------------------------------
Check partly_diffuse(const AcceptanceOptions& o)
{
  Check c{"partly_diffuse"};
  Reference ref;
  Wall half(ref.k, BoundaryField(0.5));
  BetaConstants bc = beta_constants(half, ref.sm.r0());
  const double lb_ref = 0.0359603;
  bool const_ok = std::abs(bc.c_beta - 0.75) <= o.tol("c_beta") && std::abs(bc.lambda_beta - lb_ref) <= o.tol("lambda_beta") &&
                  bc.admissible;

  // beta oscillating over [0.4, 0.6] around the boundary
  std::vector<double> alpha;
  for (int i = 0; i < 16; ++i) alpha.push_back(i % 2 ? 0.4 : 0.6);
  Wall osc(ref.k, BoundaryField(alpha));
  BetaConstants bo = beta_constants(osc, ref.sm.r0());

  // strip scan on the brute-force grid, then again with doubled boundary nodes
  ScanSettings s;
  s.re_min = -1.0; // truncated to -0.9 lambda_beta by the scan
  s.re_max = 0.25;
  s.im_max = 3.0;
  s.step = 0.05;
  SpectralGrid g;
  g.boundary_nodes = 32;
  g.speed_nodes = 8;
  g.direction_nodes = 8;
  g.threads = o.threads;
  SpectralScan a = scan_spectrum(half, g, s);
  SpectralGrid g2 = g;
  g2.boundary_nodes = 64;
  ScanSettings s2 = s;
  s2.refine = false;
  SpectralScan b = scan_spectrum(half, g2, s2);
  bool deltas_ok = true;
  double max_delta = 0;
  for (const Root& r : a.roots) {
    deltas_ok = deltas_ok && std::isfinite(r.refinement_delta) && r.refinement_delta < 1e-3;
    max_delta = std::max(max_delta, r.refinement_delta);
  }
  bool scan_ok = a.has_root_at_zero() && a.root_count() == b.root_count() && deltas_ok;

  c.value = std::abs(bc.lambda_beta - lb_ref);
  c.tolerance = o.tol("lambda_beta");
  c.detail = fmt::format("beta=0.5: c_beta={:.15g} lambda_beta={:.10f}; oscillating beta in [0.4,0.6]: c_beta={:.4f} "
                         "admissible={}; strip Re >= {:.6f}: {} roots (32x8x8) vs {} (64x8x8), root at 0: {}, "
                         "max refinement delta {:.2g}",
                         bc.c_beta, bc.lambda_beta, bo.c_beta, bo.admissible ? "true" : "false", a.strip_re_min,
                         a.root_count(), b.root_count(), a.has_root_at_zero() ? "yes" : "no",
                         max_delta);
  return finish(c, const_ok && !bo.admissible && scan_ok);
}

// --- 10 ------------------------------------------------------------------
Check truncated_kernel(const AcceptanceOptions& o)
{
  Check c{"truncated_kernel"};
  Domain dom = Domain::disk(1.0);
  std::vector<double> eps = {0.4, 0.2, 0.1, 0.05, 0.025};
  std::vector<double> v;
  for (double e : eps) v.push_back(truncated_kernel_norm(dom, e, 1.0));
  double worst = 0;
  bool decreasing = true;
  std::string list;
  for (std::size_t i = 1; i < v.size(); ++i) {
    double r = v[i - 1] / v[i];
    decreasing = decreasing && v[i] < v[i - 1];
    worst = std::max(worst, std::abs(r - 4.0));
    list += fmt::format(" {:g}->{:g}: {:.4f}", eps[i - 1], eps[i], r);
  }
  c.value = worst;
  c.tolerance = o.tol("truncation_ratio");
  c.detail = fmt::format("ratios per halving:{}; last norm {:.3g}", list, v.back());
  return finish(c, decreasing && worst <= c.tolerance && v.back() < 1e-2);
}

// --- 11 ------------------------------------------------------------------
Check determinism(const AcceptanceOptions& o)
{
  Check c{"determinism"};
  RunConfig rc;
  rc.seed = o.seed;
  rc.sim.particles = o.determinism_particles;
  rc.sim.batch = std::max<std::size_t>(1, o.determinism_particles / 3); // several batches
  rc.sim.t_end = 10.0;
  rc.sim.record_dt = 0.5;
  rc.sim.initial.type = "invariant";
  rc.sim.initial.tilt = 0.5;
  rc.sim.fit.enabled = true;
  std::vector<std::string> csv;
  for (int th : {1, 2, 8}) csv.push_back(cmd_simulate(rc, th).files.at("simulate.csv"));
  bool same = csv[0] == csv[1] && csv[0] == csv[2];
  c.value = same ? 0.0 : 1.0;
  c.tolerance = 0.0;
  c.detail = fmt::format("simulate.csv ({} bytes, {} particles) across 1, 2, 8 workers: {}", csv[0].size(),
                         o.determinism_particles, same ? "identical" : "differ");
  return finish(c, same);
}

} // namespace

Check run_check(const std::string& name, const AcceptanceOptions& o)
{
  static const std::map<std::string, Check (*)(const AcceptanceOptions&)> table = {
      {"change_of_variables", change_of_variables},
      {"flatness", flatness},
      {"rebound_vanishing", rebound_vanishing},
      {"stochastic_structure", stochastic_structure},
      {"invariant_density", invariant_density_check},
      {"kernel_decay", kernel_decay},
      {"laplace_identity", laplace_identity},
      {"gap_vs_decay", gap_vs_decay},
      {"partly_diffuse", partly_diffuse},
      {"truncated_kernel", truncated_kernel},
      {"determinism", determinism},
  };
  auto fn = table.find(name);
  if (fn == table.end()) throw std::invalid_argument("unknown check '" + name + "'");
  auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    c = fn->second(o);
  } catch (const std::exception& e) {
    c.name = name;
    c.status = Status::fail;
    c.detail = std::string("error: ") + e.what();
  }
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

std::vector<Check> run_acceptance(const AcceptanceOptions& o, const std::vector<std::string>& only,
                                  const std::function<void(const Check&)>& on_check)
{
  std::vector<Check> out;
  for (const auto& name : check_names()) {
    Check c;
    if (only.empty() || std::find(only.begin(), only.end(), name) != only.end()) {
      c = run_check(name, o);
    } else {
      c.name = name;
      c.status = Status::skipped;
      c.detail = "not selected";
    }
    if (on_check) on_check(c);
    out.push_back(c);
  }
  return out;
}

} // namespace gapkin::cli
