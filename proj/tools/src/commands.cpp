#include "gapkin_cli/commands.hpp"
#include "gapkin_cli/acceptance.hpp"

#include <gapkin/spectral.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>

namespace gapkin::cli {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

RunReport base_report(const RunConfig& c, const std::string& cmd, int threads)
{
  RunReport r;
  r.command = cmd;
  r.experiment = c.experiment;
  r.config_hash = config_hash(c);
  r.seed = c.seed;
  r.threads = threads;
  return r;
}

std::string grid_name(const SpectralGrid& g, bool directions)
{
  return directions ? fmt::format("{}x{}x{}", g.boundary_nodes, g.speed_nodes, g.direction_nodes)
                    : fmt::format("{}x{}", g.boundary_nodes, g.speed_nodes);
}

Check make_check(std::string name, double value, double tol, bool ok, std::string detail)
{
  Check c;
  c.name = std::move(name);
  c.value = value;
  c.tolerance = tol;
  c.status = ok ? Status::pass : Status::fail;
  c.detail = std::move(detail);
  return c;
}

// CSV fields with commas or quotes get quoted.
std::string field(const std::string& s)
{
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

double domain_scale(const Domain& dom) { return dom.radius(); }

// Speed proposal for weighted sampling: the radial density of m times a
// Gaussian at the hottest wall temperature.
std::function<double(double)> proposal(const DiffuseKernel& k)
{
  const int d = k.domain().dim();
  const double th = k.theta().max();
  const SpeedMeasure* sm = &k.speeds();
  return [=](double r) { return std::pow(r, d - 1) * sm->weight(r) * std::exp(-r * r / (2.0 * th)); };
}

SpectralGrid with_threads(SpectralGrid g, int threads)
{
  g.threads = threads;
  return g;
}

} // namespace

std::string csv_preamble(const RunConfig& c)
{
  return fmt::format("# config_hash={} seed={}\n", config_hash(c), c.seed);
}

void validate_semantics(const RunConfig& c, const std::string& command)
{
  std::unique_ptr<Model> m;
  try {
    m = build_model(c);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  const Wall& wall = *m->wall;
  const bool diffuse = wall.pure_diffuse();
  const int d = m->domain.dim();
  if (command == "simulate") {
    if (c.sim.initial.type == "invariant" && !diffuse)
      throw ConfigError("sim.initial: invariant initial data needs a pure diffuse wall (alpha = 0)");
    for (const auto& p : c.sim.initial.points) {
      Vec x(p[0], p[1], p[2]), v(p[3], p[4], p[5]);
      if (d == 2 && (p[2] != 0.0 || p[5] != 0.0))
        throw ConfigError("sim.initial.points: planar domains need zero third components");
      if (!m->domain.contains(x, 0.0) || m->domain.on_boundary(x, 1e-12))
        throw ConfigError("sim.initial.points: point outside the open domain");
      if (!m->speeds.in_support(v.norm())) throw ConfigError("sim.initial.points: speed outside [r0, R0]");
    }
  }
  if ((command == "invariant" || command == "laplace-check") && !diffuse)
    throw ConfigError(command + ": needs a pure diffuse wall (alpha = 0)");
  if (command == "spectrum" && !diffuse && d != 2)
    throw ConfigError("spectrum: partly diffuse walls are supported for d = 2 only");
}

// --- geometry-check ---------------------------------------------------------

CommandResult cmd_geometry_check(const RunConfig& c, int threads)
{
  auto t0 = Clock::now();
  auto m = build_model(c);
  const Domain& dom = m->domain;
  const int d = dom.dim();
  CommandResult out;
  out.report = base_report(c, "geometry-check", threads);
  std::ostringstream csv;
  csv << csv_preamble(c) << "check,point,function,lhs,rhs,reference,abs_error\n";

  const std::vector<std::pair<std::string, std::function<double(const Vec&)>>> fns = {
      {"one", [](const Vec&) { return 1.0; }},
      {"s0^2", [](const Vec& s) { return s[0] * s[0]; }},
      {"exp(s0+s1/2)", [](const Vec& s) { return std::exp(s[0] + 0.5 * s[1]); }},
      {"(1+s1)^3", [](const Vec& s) { return std::pow(1.0 + s[1], 3); }},
      {"1/(2+s0-s2)", [](const Vec& s) { return 1.0 / (2.0 + s[0] - s[2]); }},
      {"cos(3s0)sin(2s1)+1", [](const Vec& s) { return std::cos(3.0 * s[0]) * std::sin(2.0 * s[1]) + 1.0; }},
  };
  std::vector<Vec> pts;
  for (int i = 0; i < 4; ++i)
    pts.push_back(d == 2 ? dom.point_at(0.3 + 1.6 * i) : dom.sphere_point(0.3 + 0.8 * i, 1.3 * i));
  const double tol = d == 2 ? 1e-6 : 1e-5;
  double worst_one = 0, worst_pair = 0;
  for (std::size_t p = 0; p < pts.size(); ++p)
    for (const auto& [name, g] : fns) {
      CovResult r = change_of_variables_check(dom, pts[p], g, c.geometry.panels);
      double ref = name == "one" ? kappa(d) : std::numeric_limits<double>::quiet_NaN();
      double err = name == "one" ? std::max(std::abs(r.lhs - ref), std::abs(r.rhs - ref)) : std::abs(r.lhs - r.rhs);
      (name == "one" ? worst_one : worst_pair) = std::max(name == "one" ? worst_one : worst_pair, err);
      csv << "change_of_variables," << p << "," << field(name) << "," << num(r.lhs) << "," << num(r.rhs) << ","
          << num(ref) << "," << num(err) << "\n";
    }
  out.report.checks.push_back(make_check("change_of_variables_constant", worst_one, tol, worst_one <= tol,
                                         fmt::format("g = 1: both sides equal {:g}", kappa(d))));
  out.report.checks.push_back(make_check("change_of_variables_functions", worst_pair, 1e-5, worst_pair <= 1e-5,
                                         "five further test functions, |lhs - rhs|"));

  Flatness fl = flatness_constant(dom, c.geometry.flatness_samples);
  if (dom.shape() == Shape::ellipse) {
    bool ok = std::isfinite(fl.C) && fl.C > 0;
    csv << "flatness,,,,," << "," << num(fl.C) << ",\n";
    out.report.checks.push_back(make_check("flatness", fl.C, 0, ok, "finite positive flatness constant (alpha = 1)"));
  } else {
    double ref = 1.0 / (2.0 * dom.radius());
    double err = std::abs(fl.C - ref);
    csv << "flatness,,,," << num(fl.C) << "," << num(ref) << "," << num(err) << "\n";
    out.report.checks.push_back(make_check("flatness", fl.C, 1e-6, err <= 1e-6,
                                           fmt::format("alpha = 1, expected 1/(2R) = {:g}", ref)));
  }
  out.report.values["flatness_C"] = fl.C;
  out.report.grids["panels"] = std::to_string(c.geometry.panels);
  out.report.timings["total"] = since(t0);
  out.files["geometry.csv"] = csv.str();
  return out;
}

// --- validate-wall ------------------------------------------------------------

CommandResult cmd_validate_wall(const RunConfig& c, int threads)
{
  auto t0 = Clock::now();
  auto m = build_model(c);
  const Wall& wall = *m->wall;
  const DiffuseKernel& k = wall.kernel();
  CommandResult out;
  out.report = base_report(c, "validate-wall", threads);
  std::ostringstream csv;
  csv << csv_preamble(c) << "name,value,pass,note\n";
  auto row = [&](const std::string& name, double v, bool ok, const std::string& note) {
    csv << field(name) << "," << num(v) << "," << (ok ? "true" : "false") << "," << field(note) << "\n";
    out.report.checks.push_back(make_check(name, v, 0, ok, note));
  };

  // stochasticity: kappa_d int rho^d varpi k drho = 1 at sampled wall points
  const int d = m->domain.dim();
  double worst = 0;
  for (int i = 0; i < 8; ++i) {
    Vec x = d == 2 ? m->domain.point_at(2.0 * pi * i / 8) : m->domain.sphere_point(0.2 + 0.35 * i, 0.8 * i);
    for (double rin : {m->speeds.r0(), 0.5 * (m->speeds.r0() + m->speeds.R0())}) {
      double s = kappa(d) * m->speeds.radial_integrate(
                                [&](double r) { return std::pow(r, d) * m->speeds.weight(r) * k.eval(x, r, rin); });
      worst = std::max(worst, std::abs(s - 1.0));
    }
  }
  row("kernel_normalization", worst, worst <= 1e-8, "max |kappa_d int rho^d varpi k drho - 1| over 8 wall points");

  for (const IntegrabilityCheck& a : validate_integrability(k)) row("integrability_" + a.name, a.value, a.pass, a.note);

  if (!wall.pure_diffuse()) {
    BetaConstants bc = beta_constants(wall, m->speeds.r0());
    row("c_beta", bc.c_beta, bc.admissible,
        bc.admissible ? "admissible (c_beta < 1)" : "not admissible: c_beta >= 1");
    out.report.values["lambda_beta"] = bc.lambda_beta;
    out.report.values["osc_beta"] = bc.osc;
    out.report.values["beta_inf"] = bc.beta_inf;
  }
  out.report.timings["total"] = since(t0);
  out.files["wall.csv"] = csv.str();
  return out;
}

// --- simulate -----------------------------------------------------------------

CommandResult cmd_simulate(const RunConfig& c, int threads)
{
  auto t0 = Clock::now();
  auto m = build_model(c);
  const Wall& wall = *m->wall;
  const Domain& dom = m->domain;
  const SpeedMeasure& sm = m->speeds;
  const auto& s = c.sim;
  CommandResult out;
  out.report = base_report(c, "simulate", threads);
  const Mode mode = s.mode == "absorbing" ? Mode::absorbing : Mode::evolve;
  Simulator sim(wall, mode, threads);
  const std::size_t N = s.particles;

  std::unique_ptr<BoundaryDiscretization> disc;
  std::optional<InvariantDensity> inv;
  if (wall.pure_diffuse()) {
    disc = std::make_unique<BoundaryDiscretization>(wall.kernel(), with_threads(c.spectral.grid, threads));
    inv = invariant_density(*disc);
    out.report.grids["invariant"] = grid_name(c.spectral.grid, false);
  }
  Density psi = [&](const Vec& x, const Vec& v) { return (*inv)(x, v); };
  const double R = domain_scale(dom), tilt = s.initial.tilt;
  Density f = [&](const Vec& x, const Vec& v) { return (*inv)(x, v) * (1.0 + tilt * x[0] / R); };
  auto h = proposal(wall.kernel());
  std::vector<std::pair<Vec, Vec>> pts;
  for (const auto& p : s.initial.points) pts.push_back({Vec(p[0], p[1], p[2]), Vec(p[3], p[4], p[5])});

  auto factory = [&](std::uint64_t off, std::size_t cnt) -> Ensemble {
    if (s.initial.type == "uniform") return sample_uniform(dom, sm, cnt, c.seed, off, 1.0 / double(N), threads);
    if (s.initial.type == "pointcloud") return sample_pointcloud(pts, cnt, c.seed, off, 1.0 / double(N));
    return sample_weighted(dom, sm, f, h, cnt, N, c.seed, off, threads);
  };

  SeriesSpec spec;
  spec.particles = N;
  spec.batch = s.batch;
  spec.t_end = s.t_end;
  spec.record_dt = s.record_dt;
  spec.max_generation = s.max_generation;
  spec.rebound_checks = s.rebound_checks;
  std::string l1_note;
  if (dom.shape() != Shape::ellipse) {
    PhaseGrid grid(dom, sm, s.grid[0], s.grid[1], s.grid[2], s.grid[3]);
    spec.grid = grid;
    if (mode == Mode::absorbing) {
      Histogram zero;
      zero.mass.assign(grid.cells(), 0.0);
      zero.sumsq.assign(grid.cells(), 0.0);
      spec.equilibrium = zero;
    } else if (inv) {
      spec.equilibrium = project_density(grid, dom, sm, psi, 4);
    } else {
      l1_note = "no invariant density for partly diffuse walls";
    }
    out.report.grids["histogram"] = fmt::format("{}x{}x{}x{}", s.grid[0], s.grid[1], s.grid[2], s.grid[3]);
  } else {
    l1_note = "no phase grid for the ellipse";
  }

  auto t_run = Clock::now();
  SeriesResult res = run_series(sim, sm.r0(), factory, spec);
  out.report.timings["run"] = since(t_run);

  std::ostringstream csv;
  csv << csv_preamble(c) << "t,total_mass";
  for (int n = 0; n <= s.max_generation; ++n) csv << ",gen" << n;
  csv << ",l1_to_equilibrium\n";
  for (const auto& row : res.rows) {
    csv << num(row.t) << "," << num(row.total);
    for (double g : row.gen) csv << "," << num(g);
    csv << "," << num(row.l1) << "\n";
  }
  out.files["simulate.csv"] = csv.str();

  std::string vdetail = fmt::format("k-th rebound <= k D/r0 for k <= {}, generation n empty for t >= (n+1) D/r0",
                                    s.rebound_checks);
  if (!res.violations.empty()) {
    vdetail += "; first violation: " + res.violations.front();
    for (const auto& v : res.violations) std::cerr << "violation: " << v << "\n";
  }
  out.report.checks.push_back(make_check("rebound_law", static_cast<double>(res.violations.size()), 0,
                                         res.violations.empty(), vdetail));
  if (mode == Mode::absorbing) {
    const double tD = dom.diameter() / sm.r0();
    double left = 0;
    for (const auto& row : res.rows)
      if (row.t >= tD) left = std::max(left, std::abs(row.total));
    out.report.checks.push_back(
        make_check("absorbed_after_D_over_r0", left, 0, left == 0.0, fmt::format("total mass for t >= {:g}", tD)));
  }
  if (!l1_note.empty()) out.report.values["l1_available"] = 0;
  if (!res.rows.empty()) {
    out.report.values["final_total_mass"] = res.rows.back().total;
    out.report.values["final_l1"] = res.rows.back().l1;
  }
  if (s.fit.enabled && spec.equilibrium && mode == Mode::evolve) {
    std::vector<double> t, dd, nz;
    for (const auto& row : res.rows) {
      t.push_back(row.t);
      dd.push_back(row.l1);
      nz.push_back(row.noise);
    }
    try {
      DecayFit fit = fit_decay_rate(t, dd, s.fit.t_min, s.fit.t_max, nz);
      out.report.values["decay_rate"] = fit.rate;
      out.report.checks.push_back(make_check("decay_rate_positive", fit.rate, 0, fit.rate > 0,
                                             fmt::format("log-linear fit on [{:g}, {:g}], {} points", s.fit.t_min,
                                                         s.fit.t_max, fit.points)));
    } catch (const DomainError& e) {
      out.report.checks.push_back(make_check("decay_rate_positive", std::numeric_limits<double>::quiet_NaN(), 0,
                                             false, e.what()));
    }
  }
  out.report.timings["total"] = since(t0);
  return out;
}

// --- spectrum -----------------------------------------------------------------

CommandResult cmd_spectrum(const RunConfig& c, int threads)
{
  auto t0 = Clock::now();
  auto m = build_model(c);
  const Wall& wall = *m->wall;
  CommandResult out;
  out.report = base_report(c, "spectrum", threads);
  const bool diffuse = wall.pure_diffuse();
  SpectralGrid g = with_threads(diffuse ? c.spectral.grid : c.spectral.full_grid, threads);
  out.report.grids[diffuse ? "reduced" : "full"] = grid_name(g, !diffuse);

  if (!diffuse) {
    BetaConstants bc = beta_constants(wall, m->speeds.r0());
    out.report.values["c_beta"] = bc.c_beta;
    out.report.values["lambda_beta"] = bc.lambda_beta;
    if (!bc.admissible) {
      std::string msg = fmt::format("refused: partly diffuse wall is not admissible, c_beta = {:g} >= 1", bc.c_beta);
      std::cerr << msg << "\n";
      out.report.checks.push_back(make_check("admissible", bc.c_beta, 1.0, false, msg));
      out.report.timings["total"] = since(t0);
      return out;
    }
    out.report.checks.push_back(make_check("admissible", bc.c_beta, 1.0, true, "c_beta < 1"));
  }

  SpectralScan scan = scan_spectrum(wall, g, c.spectral.scan);
  std::ostringstream field_csv, roots_csv;
  field_csv << csv_preamble(c) << (c.spectral.scan.complex_plane ? "re,im,min_abs_mu_minus_1\n" : "re,im,r\n");
  for (const auto& p : scan.field)
    field_csv << num(p.lambda.real()) << "," << num(p.lambda.imag()) << "," << num(p.value) << "\n";
  roots_csv << csv_preamble(c) << "re,im,residual,refinement_delta\n";
  double worst_delta = 0;
  for (const auto& r : scan.roots) {
    roots_csv << num(r.lambda.real()) << "," << num(r.lambda.imag()) << "," << num(r.residual) << ","
              << num(r.refinement_delta) << "\n";
    if (!std::isnan(r.refinement_delta)) worst_delta = std::max(worst_delta, r.refinement_delta);
  }
  out.files["spectrum.csv"] = field_csv.str();
  out.files["roots.csv"] = roots_csv.str();

  out.report.checks.push_back(make_check("root_at_zero", scan.has_root_at_zero() ? 0.0 : 1.0, 1e-6,
                                         scan.has_root_at_zero(), "stochastic wall: lambda = 0 is a root"));
  if (c.spectral.scan.refine)
    out.report.checks.push_back(make_check("roots_refinement_stable", worst_delta, 0, std::isfinite(worst_delta),
                                           "every root re-located on the doubled grid (max delta reported)"));
  out.report.values["gap"] = scan.gap;
  out.report.values["gap_refinement_delta"] = scan.gap_delta;
  out.report.values["root_count"] = static_cast<double>(scan.root_count());
  out.report.values["flagged_cells"] = static_cast<double>(scan.flagged);
  out.report.values["strip_re_min"] = scan.strip_re_min;
  if (!scan.note.empty()) std::cerr << "note: " << scan.note << "\n";
  out.report.timings["total"] = since(t0);
  return out;
}

// --- invariant ----------------------------------------------------------------

CommandResult cmd_invariant(const RunConfig& c, int threads)
{
  auto t0 = Clock::now();
  auto m = build_model(c);
  const DiffuseKernel& k = m->wall->kernel();
  CommandResult out;
  out.report = base_report(c, "invariant", threads);
  BoundaryDiscretization disc(k, with_threads(c.spectral.grid, threads));
  out.report.grids["reduced"] = grid_name(c.spectral.grid, false);
  InvariantDensity inv = invariant_density(disc);

  std::ostringstream csv;
  csv << csv_preamble(c) << "node,param,speed,value\n";
  for (std::size_t i = 0; i < disc.nx(); ++i)
    for (std::size_t a = 0; a < disc.ns(); ++a)
      csv << i << "," << num(disc.grid().param[i]) << "," << num(disc.speeds().x[a]) << "," << num(inv.table()(i, a))
          << "\n";
  out.files["invariant.csv"] = csv.str();

  out.report.checks.push_back(make_check("perron_residual", inv.residual(), 1e-10, inv.residual() <= 1e-10,
                                         inv.warning().empty() ? "fixed point of W(0)" : inv.warning()));
  if (k.preset() == DiffuseKernel::Preset::maxwell && k.theta().constant()) {
    // a constant-temperature wall Maxwellian is itself stationary
    const int d = m->domain.dim();
    const double th = k.theta().value();
    const SpeedMeasure& sm = m->speeds;
    double zv = sphere_area(d) * sm.radial_integrate([&](double r) {
      return std::pow(r, d - 1) * sm.weight(r) * std::exp(-r * r / (2.0 * th));
    });
    const double C = 1.0 / (m->domain.volume() * zv);
    double num_ = 0, den = 0;
    for (std::size_t i = 0; i < disc.nx(); ++i)
      for (std::size_t a = 0; a < disc.ns(); ++a) {
        double sp = disc.speeds().x[a], w = disc.grid().w[i] * disc.c()[a];
        double exact = C * std::exp(-sp * sp / (2.0 * th));
        num_ += w * std::abs(inv.table()(i, a) - exact);
        den += w * exact;
      }
    out.report.checks.push_back(make_check("closed_form", num_ / den, 1e-6, num_ / den <= 1e-6,
                                           "relative L1 error against C M_theta(|v|)"));
  }
  out.report.values["raw_mass"] = inv.raw_mass();
  out.report.timings["total"] = since(t0);
  return out;
}

// --- laplace-check ------------------------------------------------------------

CommandResult cmd_laplace_check(const RunConfig& c, int threads)
{
  auto t0 = Clock::now();
  auto m = build_model(c);
  const Wall& wall = *m->wall;
  const Domain& dom = m->domain;
  const SpeedMeasure& sm = m->speeds;
  const auto& L = c.laplace;
  CommandResult out;
  out.report = base_report(c, "laplace-check", threads);

  const double R = domain_scale(dom), tilt = L.tilt, vmax = sm.R0();
  Density f = [=](const Vec& x, const Vec& v) { return (1.0 + tilt * x[0] / R) * std::exp(-v.squaredNorm() / 2.0); };
  Observable g = [=](const Vec& x, const Vec& v) { return 1.0 + (x[1] / R) * (x[1] / R) + 0.3 * v[0] / vmax; };
  auto h = proposal(wall.kernel());
  const int nmax = *std::max_element(L.n.begin(), L.n.end());
  const double t_end = (nmax + 2) * dom.diameter() / sm.r0() + 1e-9;

  Simulator sim(wall, Mode::evolve, threads);
  std::map<std::pair<int, std::size_t>, LaplaceEstimate> est;
  const std::size_t batch = 250000;
  auto t_mc = Clock::now();
  for (std::size_t off = 0; off < L.particles; off += batch) {
    std::size_t cnt = std::min(batch, L.particles - off);
    Ensemble ens = sample_weighted(dom, sm, f, h, cnt, L.particles, c.seed, off, threads);
    ens.log_depth = nmax + 2;
    sim.prime(ens);
    sim.advance(ens, t_end);
    for (int n : L.n)
      for (std::size_t q = 0; q < L.lambda.size(); ++q) {
        LaplaceEstimate e = laplace_functional(ens, dom, n, L.lambda[q], g, 16, threads);
        auto key = std::make_pair(n, q);
        est[key] = est.count(key) ? combine(est[key], e) : e;
      }
  }
  out.report.timings["monte_carlo"] = since(t_mc);

  BoundaryDiscretization disc(wall.kernel(), with_threads(c.spectral.grid, threads));
  out.report.grids["reduced"] = grid_name(c.spectral.grid, false);
  std::ostringstream csv;
  csv << csv_preamble(c) << "n,lambda,monte_carlo,stderr,resolvent,rel_error\n";
  for (int n : L.n)
    for (std::size_t q = 0; q < L.lambda.size(); ++q) {
      const LaplaceEstimate& e = est[{n, q}];
      double res = resolvent_term(disc, n, L.lambda[q], f, g).real();
      double rel = std::abs(e.value - res) / std::abs(res);
      csv << n << "," << num(L.lambda[q]) << "," << num(e.value) << "," << num(e.stderr_) << "," << num(res) << ","
          << num(rel) << "\n";
      out.report.checks.push_back(make_check(fmt::format("laplace_n{}_lambda{:g}", n, L.lambda[q]), rel, L.rel_tol,
                                             rel <= L.rel_tol,
                                             fmt::format("n={} lambda={:g}: MC {:.6g} +- {:.2g} vs resolvent {:.6g}",
                                                         n, L.lambda[q], e.value, e.stderr_, res)));
    }
  out.files["laplace.csv"] = csv.str();
  out.report.timings["total"] = since(t0);
  return out;
}

// --- acceptance -----------------------------------------------------------------

CommandResult cmd_acceptance(const RunConfig& c, int threads)
{
  auto t0 = Clock::now();
  CommandResult out;
  out.report = base_report(c, "acceptance", threads);
  AcceptanceOptions o = acceptance_options(c, threads);
  out.report.checks = run_acceptance(o, c.acceptance.only, [](const Check& ch) {
    std::cout << fmt::format("[{:>7}] {:<22} {:>8.2f}s  {}\n", status_name(ch.status), ch.name, ch.seconds,
                             ch.detail)
              << std::flush;
  });
  std::ostringstream csv;
  csv << csv_preamble(c) << "check,status,value,tolerance,detail\n";
  for (const auto& ch : out.report.checks)
    csv << ch.name << "," << status_name(ch.status) << "," << num(ch.value) << "," << num(ch.tolerance) << ","
        << field(ch.detail) << "\n";
  out.files["acceptance.csv"] = csv.str();
  for (const auto& ch : out.report.checks) out.report.timings[ch.name] = ch.seconds;
  out.report.timings["total"] = since(t0);
  return out;
}

const std::map<std::string, Command>& commands()
{
  static const std::map<std::string, Command> table = {
      {"geometry-check", cmd_geometry_check}, {"validate-wall", cmd_validate_wall},
      {"simulate", cmd_simulate},             {"spectrum", cmd_spectrum},
      {"invariant", cmd_invariant},           {"laplace-check", cmd_laplace_check},
      {"acceptance", cmd_acceptance},
  };
  return table;
}

} // namespace gapkin::cli
