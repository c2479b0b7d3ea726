#include "gapkin/transport.hpp"

#include "gapkin/parallel.hpp"
#include "gapkin/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gapkin {

void Simulator::prime(Ensemble& ens) const
{
  const Domain& dom = domain();
  parallel_for(ens.particles.size(), threads_, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Particle& p = ens.particles[i];
      if (p.alive) p.next_hit = ens.time + dom.exit_time(p.x, p.v);
    }
  });
  if (ens.log_depth > 0 && ens.events.size() != ens.particles.size() * ens.log_depth)
    ens.events.assign(ens.particles.size() * ens.log_depth, Event{});
}

void Simulator::advance(Ensemble& ens, double t_target) const
{
  if (t_target < ens.time) throw DomainError("advance: target time lies in the past");
  const Domain& dom = domain();
  const double snap_tol = 1e-9 * dom.diameter();
  const double t0 = ens.time;
  parallel_for(ens.particles.size(), threads_, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Particle& p = ens.particles[i];
      if (!p.alive) continue;
      double t = t0;
      while (p.alive && p.next_hit <= t_target) {
        Vec hit = p.x + (p.next_hit - t) * p.v;
        Vec snapped = dom.snap(hit);
        if ((snapped - hit).norm() > snap_tol) {
          std::ostringstream os;
          os << "particle " << ens.index_offset + i << " left the domain by "
             << (snapped - hit).norm() << " at t=" << p.next_hit;
          throw GeometryError(os.str());
        }
        t = p.next_hit;
        p.x = snapped;
        ++p.rebounds;
        if (mode_ == Mode::absorbing) {
          p.alive = false;
        } else {
          Rng rng(ens.seed, ens.index_offset + i, p.rebounds);
          p.v = wall_.resample_outgoing(p.x, p.v, rng);
          p.next_hit = t + dom.exit_time(p.x, p.v);
        }
        if (static_cast<int>(p.rebounds) <= ens.log_depth)
          ens.events[i * ens.log_depth + (p.rebounds - 1)] = Event{t, p.x, p.v};
      }
      if (p.alive) p.x += (t_target - t) * p.v;
    }
  });
  ens.time = t_target;
}

namespace {

Vec uniform_point(const Domain& dom, Rng& rng)
{
  for (;;) {
    Vec x = Vec::Zero();
    for (int k = 0; k < dom.dim(); ++k) x[k] = dom.axis(k) * (2.0 * rng.uniform() - 1.0);
    if (dom.level(x) < 0) return x;
  }
}

} // namespace

Ensemble sample_uniform(const Domain& dom, const SpeedMeasure& sm, std::size_t n, std::uint64_t seed,
                        std::uint64_t offset, double weight, int threads)
{
  const int d = sm.dim();
  SpeedSampler speed(sm.r0(), sm.R0(), [&](double r) { return std::pow(r, d - 1) * sm.weight(r); });
  Ensemble ens;
  ens.seed = seed;
  ens.index_offset = offset;
  ens.particles.resize(n);
  parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Rng rng(seed, offset + i, 0);
      Particle& p = ens.particles[i];
      p.x = uniform_point(dom, rng);
      p.v = speed.sample(rng) * sample_uniform_direction(d, rng);
      p.weight = weight;
    }
  });
  return ens;
}

namespace {

Ensemble importance_sample(const Domain& dom, const SpeedMeasure& sm, const Density& f,
                           const std::function<double(double)>& h, std::size_t n, std::size_t n_total,
                           std::uint64_t seed, std::uint64_t offset, int threads, bool allow_negative)
{
  const int d = sm.dim();
  SpeedSampler speed(sm.r0(), sm.R0(), h);
  const double vol = dom.volume(), zh = speed.mass(), area = sphere_area(d);
  Ensemble ens;
  ens.seed = seed;
  ens.index_offset = offset;
  ens.particles.resize(n);
  parallel_for(n, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Rng rng(seed, offset + i, 0);
      Particle& p = ens.particles[i];
      p.x = uniform_point(dom, rng);
      double rho = speed.sample(rng);
      p.v = rho * sample_uniform_direction(d, rng);
      double prop = h(rho) / (zh * area * std::pow(rho, d - 1) * sm.weight(rho) * vol);
      p.weight = f(p.x, p.v) / prop / static_cast<double>(n_total);
      if (!std::isfinite(p.weight) || (!allow_negative && p.weight < 0))
        throw DomainError(allow_negative ? "sample_signed: density must be finite"
                                         : "sample_weighted: density must be finite and nonnegative");
    }
  });
  return ens;
}

} // namespace

Ensemble sample_weighted(const Domain& dom, const SpeedMeasure& sm, const Density& f,
                         const std::function<double(double)>& h, std::size_t n, std::size_t n_total,
                         std::uint64_t seed, std::uint64_t offset, int threads)
{
  return importance_sample(dom, sm, f, h, n, n_total, seed, offset, threads, false);
}

Ensemble sample_signed(const Domain& dom, const SpeedMeasure& sm, const Density& f,
                       const std::function<double(double)>& h, std::size_t n, std::size_t n_total,
                       std::uint64_t seed, std::uint64_t offset, int threads)
{
  return importance_sample(dom, sm, f, h, n, n_total, seed, offset, threads, true);
}

Ensemble sample_pointcloud(const std::vector<std::pair<Vec, Vec>>& pts, std::size_t n,
                           std::uint64_t seed, std::uint64_t offset, double weight)
{
  if (pts.empty()) throw DomainError("pointcloud: no points given");
  Ensemble ens;
  ens.seed = seed;
  ens.index_offset = offset;
  ens.particles.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pv = pts[(offset + i) % pts.size()];
    ens.particles[i].x = pv.first;
    ens.particles[i].v = pv.second;
    ens.particles[i].weight = weight;
  }
  return ens;
}

GenerationMass generation_masses(const Ensemble& ens, int n_max)
{
  GenerationMass g;
  g.t = ens.time;
  g.mass.assign(n_max + 1, 0.0);
  for (const Particle& p : ens.particles)
    if (p.alive) g.mass[std::min<std::size_t>(p.rebounds, n_max)] += p.weight;
  return g;
}

double total_mass(const Ensemble& ens)
{
  double s = 0.0;
  for (const Particle& p : ens.particles)
    if (p.alive) s += p.weight;
  return s;
}

PhaseGrid::PhaseGrid(const Domain& dom, const SpeedMeasure& sm, int n_r, int n_phi, int n_rho,
                     int n_mu)
  : dim_(dom.dim()), R_(dom.radius()), r0_(sm.r0()), R0_(sm.R0()), n_r_(n_r), n_phi_(n_phi),
    n_rho_(n_rho), n_mu_(n_mu)
{
  if (dom.shape() == Shape::ellipse) throw DomainError("PhaseGrid: needs a disk or ball");
  if (n_r < 1 || n_phi < 1 || n_rho < 1 || n_mu < 1) throw DomainError("PhaseGrid: empty axis");
  measure_.resize(cells());
  const int d = dim_;
  for (std::size_t c = 0; c < cells(); ++c) {
    double lo[4], hi[4];
    bounds(c, lo, hi);
    double xr = d == 2 ? (hi[0] * hi[0] - lo[0] * lo[0]) / 2.0 * (hi[1] - lo[1])
                       : (std::pow(hi[0], 3) - std::pow(lo[0], 3)) / 3.0 * (hi[1] - lo[1]) * 2.0;
    Rule q = gauss_legendre(16, lo[2], hi[2]);
    double vr = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) vr += q.w[k] * std::pow(q.x[k], d - 1) * sm.weight(q.x[k]);
    double va = d == 2 ? 2.0 * (std::acos(lo[3]) - std::acos(hi[3])) : 2.0 * pi * (hi[3] - lo[3]);
    measure_[c] = xr * vr * va;
  }
}

void PhaseGrid::bounds(std::size_t cell, double* lo, double* hi) const
{
  int im = static_cast<int>(cell % n_mu_);
  cell /= n_mu_;
  int ir = static_cast<int>(cell % n_rho_);
  cell /= n_rho_;
  int ip = static_cast<int>(cell % n_phi_);
  int irr = static_cast<int>(cell / n_phi_);
  lo[0] = R_ * std::pow(static_cast<double>(irr) / n_r_, 1.0 / dim_);
  hi[0] = R_ * std::pow(static_cast<double>(irr + 1) / n_r_, 1.0 / dim_);
  lo[1] = 2.0 * pi * ip / n_phi_;
  hi[1] = 2.0 * pi * (ip + 1) / n_phi_;
  lo[2] = r0_ + (R0_ - r0_) * ir / n_rho_;
  hi[2] = r0_ + (R0_ - r0_) * (ir + 1) / n_rho_;
  lo[3] = -1.0 + 2.0 * im / n_mu_;
  hi[3] = -1.0 + 2.0 * (im + 1) / n_mu_;
}

std::size_t PhaseGrid::index(const Vec& x, const Vec& v) const
{
  auto bin = [](double u, int n) -> int {
    if (u < -1e-9 || u > 1.0 + 1e-9) throw DomainError("PhaseGrid: particle outside grid bounds");
    return std::clamp(static_cast<int>(u * n), 0, n - 1);
  };
  double r = x.norm(), rho = v.norm();
  int ir = bin(std::pow(r / R_, dim_), n_r_);
  double phi = std::atan2(x[1], x[0]);
  if (phi < 0) phi += 2.0 * pi;
  int ip = std::min(n_phi_ - 1, static_cast<int>(phi / (2.0 * pi) * n_phi_));
  int is = bin((rho - r0_) / (R0_ - r0_), n_rho_);
  double mu = r > 0 ? std::clamp(x.dot(v) / (r * rho), -1.0, 1.0) : 0.0;
  int im = bin(0.5 * (mu + 1.0), n_mu_);
  return ((static_cast<std::size_t>(ir) * n_phi_ + ip) * n_rho_ + is) * n_mu_ + im;
}

bool PhaseGrid::same_as(const PhaseGrid& o) const
{
  return dim_ == o.dim_ && R_ == o.R_ && r0_ == o.r0_ && R0_ == o.R0_ && n_r_ == o.n_r_ &&
         n_phi_ == o.n_phi_ && n_rho_ == o.n_rho_ && n_mu_ == o.n_mu_;
}

double Histogram::total() const
{
  double s = 0.0;
  for (double m : mass) s += m;
  return s;
}

std::vector<double> Histogram::density(const PhaseGrid& g) const
{
  std::vector<double> d(mass.size());
  for (std::size_t c = 0; c < mass.size(); ++c) d[c] = mass[c] / g.measure(c);
  return d;
}

std::vector<std::size_t> cell_indices(const Ensemble& ens, const PhaseGrid& grid)
{
  std::vector<std::size_t> idx(ens.particles.size(), SIZE_MAX);
  for (std::size_t i = 0; i < ens.particles.size(); ++i) {
    const Particle& p = ens.particles[i];
    if (p.alive) idx[i] = grid.index(p.x, p.v);
  }
  return idx;
}

void accumulate_density(const Ensemble& ens, const PhaseGrid& grid, Histogram& h)
{
  if (h.mass.size() != grid.cells()) {
    h.mass.assign(grid.cells(), 0.0);
    h.sumsq.assign(grid.cells(), 0.0);
  }
  for (const Particle& p : ens.particles) {
    if (!p.alive) continue;
    std::size_t c = grid.index(p.x, p.v);
    h.mass[c] += p.weight;
    h.sumsq[c] += p.weight * p.weight;
  }
}

Histogram estimate_density(const Ensemble& ens, const PhaseGrid& grid)
{
  Histogram h;
  accumulate_density(ens, grid, h);
  return h;
}

Histogram project_density(const PhaseGrid& grid, const Domain& dom, const SpeedMeasure& sm,
                          const Density& f, int order)
{
  Histogram h;
  h.mass.assign(grid.cells(), 0.0);
  h.sumsq.assign(grid.cells(), 0.0);
  const int d = grid.dim();
  const int qphi = order * std::max(1, 8 / grid.n_phi());
  for (std::size_t c = 0; c < grid.cells(); ++c) {
    double lo[4], hi[4];
    grid.bounds(c, lo, hi);
    Rule qr = gauss_legendre(order, lo[0], hi[0]);
    Rule qp = gauss_legendre(qphi, lo[1], hi[1]);
    Rule qs = gauss_legendre(order, lo[2], hi[2]);
    double s = 0.0;
    if (d == 2) {
      Rule qa = gauss_legendre(order, std::acos(hi[3]), std::acos(lo[3]));
      for (std::size_t a = 0; a < qr.size(); ++a)
        for (std::size_t b = 0; b < qp.size(); ++b) {
          double r = qr.x[a], ph = qp.x[b];
          Vec x(r * std::cos(ph), r * std::sin(ph), 0.0);
          for (std::size_t k = 0; k < qs.size(); ++k) {
            double rho = qs.x[k], wv = qs.w[k] * rho * sm.weight(rho);
            for (std::size_t m = 0; m < qa.size(); ++m)
              for (int sgn : {-1, 1}) {
                double ang = ph + sgn * qa.x[m];
                Vec v(rho * std::cos(ang), rho * std::sin(ang), 0.0);
                s += qr.w[a] * r * qp.w[b] * wv * qa.w[m] * f(x, v);
              }
          }
        }
    } else {
      Rule qc = gauss_legendre(order, -1.0, 1.0);
      Rule qm = gauss_legendre(order, lo[3], hi[3]);
      Rule qx = trapezoid_periodic(8, 0.0, 2.0 * pi);
      for (std::size_t a = 0; a < qr.size(); ++a)
        for (std::size_t t = 0; t < qc.size(); ++t)
          for (std::size_t b = 0; b < qp.size(); ++b) {
            double r = qr.x[a], ct = qc.x[t], st = std::sqrt(1 - ct * ct), ph = qp.x[b];
            Vec xh(st * std::cos(ph), st * std::sin(ph), ct);
            Vec x = r * xh;
            Vec e1 = (std::abs(xh[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0));
            e1 = (e1 - e1.dot(xh) * xh).normalized();
            Vec e2 = xh.cross(e1);
            double wx = qr.w[a] * r * r * qc.w[t] * qp.w[b];
            for (std::size_t k = 0; k < qs.size(); ++k) {
              double rho = qs.x[k], wv = qs.w[k] * rho * rho * sm.weight(rho);
              for (std::size_t m = 0; m < qm.size(); ++m) {
                double mu = qm.x[m], sm_ = std::sqrt(std::max(0.0, 1 - mu * mu));
                for (std::size_t j = 0; j < qx.size(); ++j) {
                  Vec dir = mu * xh + sm_ * (std::cos(qx.x[j]) * e1 + std::sin(qx.x[j]) * e2);
                  s += wx * wv * qm.w[m] * qx.w[j] * f(x, rho * dir);
                }
              }
            }
          }
    }
    h.mass[c] = s;
  }
  (void)dom;
  return h;
}

double l1_distance(const Histogram& a, const Histogram& b)
{
  if (a.mass.size() != b.mass.size()) throw DomainError("l1_distance: grid mismatch");
  double s = 0.0;
  for (std::size_t c = 0; c < a.mass.size(); ++c) s += std::abs(a.mass[c] - b.mass[c]);
  return s;
}

double l1_noise(const Histogram& h)
{
  double s = 0.0;
  for (double q : h.sumsq) s += std::sqrt(q);
  return std::sqrt(2.0 / pi) * s;
}

std::vector<double> bootstrap_l1(const std::vector<std::size_t>& cells,
                                 const std::vector<double>& weights, std::size_t n_cells,
                                 int replicates, std::uint64_t seed)
{
  std::vector<double> base(n_cells, 0.0), out;
  const std::size_t n = cells.size();
  for (std::size_t i = 0; i < n; ++i)
    if (cells[i] != SIZE_MAX) base[cells[i]] += weights[i];
  for (int r = 0; r < replicates; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r), 0x5eedULL);
    std::vector<double> m(n_cells, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t i = static_cast<std::size_t>(rng.uniform() * n);
      if (i >= n) i = n - 1;
      if (cells[i] != SIZE_MAX) m[cells[i]] += weights[i];
    }
    double s = 0.0;
    for (std::size_t c = 0; c < n_cells; ++c) s += std::abs(m[c] - base[c]);
    out.push_back(s);
  }
  return out;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& d, double t_min,
                        double t_max, const std::vector<double>& noise)
{
  if (t.size() != d.size()) throw DomainError("fit_decay_rate: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_min || t[i] > t_max) continue;
    if (!(d[i] > 0)) continue;
    if (!noise.empty() && d[i] < 3.0 * noise[i]) continue;
    xs.push_back(t[i]);
    ys.push_back(std::log(d[i]));
  }
  if (xs.size() < 4) throw DomainError("fit_decay_rate: fewer than 4 usable points");
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  DecayFit fit;
  double slope = sxy / sxx;
  fit.rate = -slope;
  fit.intercept = my - slope * mx;
  double rss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (fit.intercept + slope * xs[i]);
    rss += e * e;
  }
  fit.residual = std::sqrt(rss / n);
  fit.points = static_cast<int>(xs.size());
  return fit;
}

LaplaceEstimate laplace_functional(const Ensemble& ens, const Domain& dom, int n, double lambda,
                                   const Observable& g, int order, int threads)
{
  if (n < 0) throw DomainError("laplace_functional: n must be >= 0");
  if (!(lambda > 0)) throw DomainError("laplace_functional: lambda must be positive");
  if (n + 1 > ens.log_depth) throw DomainError("laplace_functional: generation beyond the event log");
  const std::size_t np = ens.particles.size();
  std::vector<double> y(np, 0.0);
  Rule q = composite_gl(order, 2, 0.0, 1.0);
  parallel_for(np, threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      const Particle& p = ens.particles[i];
      if (p.rebounds < static_cast<std::uint32_t>(n + 1))
        throw DomainError("laplace_functional: ensemble not advanced past rebound n+1");
      const Event& ev = ens.event(i, n + 1);
      double tau = dom.exit_time(ev.x, ev.v);
      double s = 0.0;
      for (std::size_t k = 0; k < q.size(); ++k) {
        double u = q.x[k] * tau;
        s += q.w[k] * tau * std::exp(-lambda * (ev.t + u)) * g(ev.x + u * ev.v, ev.v);
      }
      y[i] = p.weight * s;
    }
  });
  LaplaceEstimate est;
  est.count = np;
  for (double v : y) {
    est.sum += v;
    est.sumsq += v * v;
  }
  est.value = est.sum;
  double N = static_cast<double>(np);
  est.stderr_ = N > 1 ? std::sqrt(std::max(0.0, N / (N - 1) * (est.sumsq - est.sum * est.sum / N))) : 0.0;
  return est;
}

LaplaceEstimate combine(const LaplaceEstimate& a, const LaplaceEstimate& b)
{
  LaplaceEstimate c;
  c.count = a.count + b.count;
  c.sum = a.sum + b.sum;
  c.sumsq = a.sumsq + b.sumsq;
  c.value = c.sum;
  double N = static_cast<double>(c.count);
  c.stderr_ = N > 1 ? std::sqrt(std::max(0.0, N / (N - 1) * (c.sumsq - c.sum * c.sum / N))) : 0.0;
  return c;
}

SeriesResult run_series(const Simulator& sim, double r0,
                        const std::function<Ensemble(std::uint64_t, std::size_t)>& factory,
                        const SeriesSpec& spec)
{
  if (!(spec.record_dt > 0) || spec.t_end < 0) throw DomainError("run_series: bad time grid");
  const double D = sim.domain().diameter();
  const auto nrec = static_cast<std::size_t>(std::floor(spec.t_end / spec.record_dt + 1e-9)) + 1;
  SeriesResult res;
  res.rows.resize(nrec);
  if (spec.grid) res.histograms.resize(nrec);
  for (std::size_t k = 0; k < nrec; ++k) {
    res.rows[k].t = k * spec.record_dt;
    res.rows[k].gen.assign(spec.max_generation + 1, 0.0);
  }
  const std::size_t batch = std::max<std::size_t>(1, spec.batch);
  for (std::size_t off = 0; off < spec.particles; off += batch) {
    std::size_t cnt = std::min(batch, spec.particles - off);
    Ensemble ens = factory(off, cnt);
    ens.log_depth = std::max(ens.log_depth, spec.rebound_checks);
    ens.events.clear();
    sim.prime(ens);
    for (std::size_t k = 0; k < nrec; ++k) {
      sim.advance(ens, res.rows[k].t);
      GenerationMass gm = generation_masses(ens, spec.max_generation);
      for (int n = 0; n <= spec.max_generation; ++n) res.rows[k].gen[n] += gm.mass[n];
      res.rows[k].total += total_mass(ens);
      if (spec.grid) {
        accumulate_density(ens, *spec.grid, res.histograms[k]);
        if (k == 0 && spec.keep_initial_cells) {
          auto idx = cell_indices(ens, *spec.grid);
          res.initial_cells.insert(res.initial_cells.end(), idx.begin(), idx.end());
          for (const Particle& p : ens.particles) res.initial_weights.push_back(p.weight);
        }
      }
    }
    // hard rebound law, per particle
    for (std::size_t i = 0; i < ens.particles.size(); ++i) {
      const Particle& p = ens.particles[i];
      int kmax = std::min<int>(static_cast<int>(p.rebounds), std::min(spec.rebound_checks, ens.log_depth));
      for (int k = 1; k <= kmax; ++k) {
        double tk = ens.event(i, k).t;
        if (tk > k * D / r0 + 1e-9) {
          std::ostringstream os;
          os << "particle " << ens.index_offset + i << ": rebound " << k << " at t=" << tk
             << " exceeds " << k * D / r0;
          res.violations.push_back(os.str());
        }
      }
    }
  }
  for (std::size_t k = 0; k < nrec; ++k) {
    SeriesRow& row = res.rows[k];
    for (int n = 0; n < spec.max_generation; ++n)
      if (row.t >= (n + 1) * D / r0 && row.gen[n] != 0.0) {
        std::ostringstream os;
        os << "generation " << n << " carries mass " << row.gen[n] << " at t=" << row.t;
        res.violations.push_back(os.str());
      }
    if (spec.grid) {
      row.noise = l1_noise(res.histograms[k]);
      if (spec.equilibrium) row.l1 = l1_distance(res.histograms[k], *spec.equilibrium);
    }
  }
  return res;
}

} // namespace gapkin
