#include <gapkin/spectral.hpp>
#include <gapkin/transport.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace gapkin;

namespace {

struct Disk {
  Domain dom = Domain::disk(1.0);
  SpeedMeasure sm{2, 0.5, 3.0};
  DiffuseKernel k = DiffuseKernel::maxwell(dom, sm, BoundaryField(1.0));
  Wall wall{k};
};

Ensemble single(const Vec& x, const Vec& v)
{
  return sample_pointcloud({{x, v}}, 1, 1, 0, 1.0);
}

} // namespace

TEST(Simulator, FreeFlight)
{
  Disk d;
  Simulator sim(d.wall);
  Ensemble e = single(Vec(0, 0, 0), Vec(1, 0, 0));
  sim.prime(e);
  sim.advance(e, 0.5);
  EXPECT_NEAR((e.particles[0].x - Vec(0.5, 0, 0)).norm(), 0.0, 1e-15);
  EXPECT_EQ(e.particles[0].rebounds, 0u);
}

TEST(Simulator, StaysInsideAndKeepsMass)
{
  Disk d;
  Simulator sim(d.wall, Mode::evolve, 2);
  Ensemble e = sample_uniform(d.dom, d.sm, 5000, 11, 0, 1.0 / 5000, 2);
  double before = total_mass(e);
  sim.prime(e);
  sim.advance(e, 7.3);
  EXPECT_NEAR(total_mass(e), before, 1e-12);
  for (const auto& p : e.particles) {
    ASSERT_TRUE(d.dom.contains(p.x, 1e-9));
    ASSERT_TRUE(d.sm.in_support(p.v.norm()));
  }
}

TEST(Simulator, AbsorbingEmptiesByDiameterOverR0)
{
  Disk d;
  Simulator sim(d.wall, Mode::absorbing);
  Ensemble e = sample_uniform(d.dom, d.sm, 20000, 3, 0, 1.0);
  sim.prime(e);
  sim.advance(e, d.dom.diameter() / d.sm.r0());
  EXPECT_EQ(total_mass(e), 0.0);
}

TEST(Simulator, AbsorbingBall)
{
  Domain ball = Domain::ball(1.0);
  SpeedMeasure sm(3, 0.5, 3.0, WeightProfile::power(0), 32, 64);
  Wall w(DiffuseKernel::uniform(ball, sm));
  Simulator sim(w, Mode::absorbing);
  Ensemble e = sample_uniform(ball, sm, 5000, 3, 0, 1.0);
  sim.prime(e);
  sim.advance(e, 4.0);
  EXPECT_EQ(total_mass(e), 0.0);
}

TEST(Simulator, ThreadCountDoesNotChangeTrajectories)
{
  Disk d;
  Ensemble a = sample_uniform(d.dom, d.sm, 3000, 5, 0, 1.0, 1);
  Ensemble b = sample_uniform(d.dom, d.sm, 3000, 5, 0, 1.0, 4);
  Simulator s1(d.wall, Mode::evolve, 1), s4(d.wall, Mode::evolve, 4);
  s1.prime(a);
  s4.prime(b);
  s1.advance(a, 6.0);
  s4.advance(b, 6.0);
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    ASSERT_EQ(a.particles[i].x, b.particles[i].x);
    ASSERT_EQ(a.particles[i].v, b.particles[i].v);
    ASSERT_EQ(a.particles[i].rebounds, b.particles[i].rebounds);
  }
}

TEST(Generations, VanishAfterTau)
{
  Disk d;
  Simulator sim(d.wall);
  SeriesSpec spec;
  spec.particles = 20000;
  spec.t_end = 12.0;
  spec.record_dt = 0.5;
  spec.max_generation = 4;
  auto res = run_series(
      sim, d.sm.r0(),
      [&](std::uint64_t off, std::size_t n) { return sample_uniform(d.dom, d.sm, n, 8, off, 1.0 / 20000); }, spec);
  EXPECT_TRUE(res.violations.empty());
  ASSERT_FALSE(res.rows.empty());
  EXPECT_NEAR(res.rows[0].gen[0], 1.0, 1e-12);
  const double tau = d.dom.diameter() / d.sm.r0();
  for (const auto& row : res.rows) {
    EXPECT_NEAR(std::accumulate(row.gen.begin(), row.gen.end(), 0.0), row.total, 1e-12);
    EXPECT_NEAR(row.total, 1.0, 1e-12);
    for (int n = 0; n < 4; ++n)
      if (row.t >= (n + 1) * tau) EXPECT_EQ(row.gen[n], 0.0) << "generation " << n << " at t=" << row.t;
  }
}

TEST(Histogram, PointMassSingleCell)
{
  Disk d;
  PhaseGrid g(d.dom, d.sm, 2, 4, 4, 4);
  Ensemble e = sample_pointcloud({{Vec(0.3, 0.2, 0), Vec(1.0, 0.5, 0)}}, 100, 1, 0, 0.01);
  Histogram h = estimate_density(e, g);
  int occupied = 0;
  for (double m : h.mass) occupied += m > 0;
  EXPECT_EQ(occupied, 1);
  EXPECT_NEAR(h.total(), 1.0, 1e-12);
}

TEST(Histogram, CellMeasuresSumToPhaseVolume)
{
  Disk d;
  PhaseGrid g(d.dom, d.sm, 3, 4, 5, 6);
  double s = 0;
  for (std::size_t c = 0; c < g.cells(); ++c) s += g.measure(c);
  // |Omega| * m(V) = pi * pi (R0^2 - r0^2)
  EXPECT_NEAR(s, pi * pi * (9.0 - 0.25), 1e-9);
}

TEST(Histogram, ProjectionOfUniformDensity)
{
  Disk d;
  PhaseGrid g(d.dom, d.sm, 2, 4, 4, 4);
  Histogram h = project_density(g, d.dom, d.sm, [](const Vec&, const Vec&) { return 1.0; });
  for (std::size_t c = 0; c < g.cells(); ++c) EXPECT_NEAR(h.mass[c], g.measure(c), 1e-10);
}

TEST(Histogram, SampleWithinBootstrapBand)
{
  Disk d;
  PhaseGrid g(d.dom, d.sm, 2, 4, 4, 4);
  Density q = [&](const Vec& x, const Vec& v) { return (1.0 + 0.5 * x[0]) * std::exp(-v.squaredNorm() / 4); };
  Histogram exact = project_density(g, d.dom, d.sm, q, 6);
  const std::size_t n = 200000;
  auto h = [](double r) { return r; };
  Ensemble e = sample_weighted(d.dom, d.sm, q, h, n, n, 21, 0, 1);
  Histogram est = estimate_density(e, g);
  auto boot = bootstrap_l1(cell_indices(e, g), [&] {
    std::vector<double> w;
    for (const auto& p : e.particles) w.push_back(p.weight);
    return w;
  }(), g.cells(), 64, 4);
  double mean = std::accumulate(boot.begin(), boot.end(), 0.0) / boot.size();
  EXPECT_LT(l1_distance(est, exact), 2.0 * mean);
  EXPECT_NEAR(est.total(), exact.total(), 0.02 * exact.total());
}

TEST(Histogram, AzimuthalMarginalUniformForSymmetricData)
{
  Disk d;
  PhaseGrid g(d.dom, d.sm, 1, 8, 1, 1);
  const std::size_t n = 400000;
  Ensemble e = sample_uniform(d.dom, d.sm, n, 17, 0, 1.0 / n);
  Histogram h = estimate_density(e, g);
  for (double m : h.mass) EXPECT_NEAR(m, 1.0 / 8, 5 * std::sqrt(0.125 * 0.875 / n));
}

TEST(L1, Basics)
{
  Histogram a{{0.5, 0.5, 0.0}, {}}, b{{0.0, 0.0, 1.0}, {}}, c{{0.0, 1.0, 0.0}, {}};
  EXPECT_EQ(l1_distance(a, a), 0.0);
  EXPECT_EQ(l1_distance(b, c), 2.0);
  EXPECT_EQ(l1_distance(a, c), 1.0);
}

TEST(DecayFit, ExactExponential)
{
  std::vector<double> t, d1, d5;
  for (int i = 0; i <= 40; ++i) {
    t.push_back(0.25 * i);
    d1.push_back(std::exp(-0.3 * t.back()));
    d5.push_back(5 * std::exp(-0.3 * t.back()));
  }
  auto f = fit_decay_rate(t, d1, 0, 10);
  EXPECT_NEAR(f.rate, 0.3, 1e-12);
  auto g = fit_decay_rate(t, d5, 0, 10);
  EXPECT_NEAR(g.rate, 0.3, 1e-12);
  EXPECT_NEAR(g.intercept, std::log(5.0), 1e-12);
}

TEST(DecayFit, NoiseFloorTrimmed)
{
  std::mt19937_64 gen(42);
  std::normal_distribution<double> nd(0.0, 1e-4);
  std::vector<double> t, d, noise;
  for (int i = 0; i <= 120; ++i) {
    t.push_back(0.25 * i);
    d.push_back(std::abs(std::exp(-0.3 * t.back()) + nd(gen)) + 1e-4);
    noise.push_back(1e-4);
  }
  auto f = fit_decay_rate(t, d, 0, 30, noise);
  EXPECT_NEAR(f.rate, 0.3, 0.02);
}

TEST(Laplace, AgreesWithResolvent)
{
  Disk d;
  SpectralGrid g;
  g.boundary_nodes = 128;
  g.speed_nodes = 32;
  BoundaryDiscretization disc(d.k, g);
  Density f = [](const Vec& x, const Vec& v) { return (1.0 + 0.5 * x[0]) * std::exp(-v.squaredNorm() / 2); };
  Observable obs = [](const Vec& x, const Vec& v) { return 1.0 + x[1] * x[1] + 0.1 * v[0]; };
  const std::size_t n = 300000;
  auto h = [](double r) { return r * std::exp(-r * r / 2); };
  Ensemble e = sample_weighted(d.dom, d.sm, f, h, n, n, 3, 0, 1);
  e.log_depth = 3;
  Simulator sim(d.wall);
  sim.prime(e);
  sim.advance(e, 3 * d.dom.diameter() / d.sm.r0() + 1e-9);
  for (int k : {0, 1}) {
    LaplaceEstimate mc = laplace_functional(e, d.dom, k, 0.7, obs);
    double res = resolvent_term(disc, k, 0.7, f, obs).real();
    EXPECT_NEAR(mc.value, res, std::max(4 * mc.stderr_, 0.01 * std::abs(res))) << "n=" << k;
  }
}

TEST(Laplace, ZeroObservable)
{
  Disk d;
  Ensemble e = sample_uniform(d.dom, d.sm, 1000, 1, 0, 1e-3);
  e.log_depth = 2;
  Simulator sim(d.wall);
  sim.prime(e);
  sim.advance(e, 9.0);
  auto est = laplace_functional(e, d.dom, 0, 1.0, [](const Vec&, const Vec&) { return 0.0; });
  EXPECT_EQ(est.value, 0.0);
}

TEST(Laplace, LargeLambdaSmallOnBothSides)
{
  Disk d;
  SpectralGrid g;
  g.boundary_nodes = 128;
  g.speed_nodes = 32;
  BoundaryDiscretization disc(d.k, g);
  Density f = [](const Vec&, const Vec& v) { return std::exp(-v.squaredNorm() / 2); };
  Observable one = [](const Vec&, const Vec&) { return 1.0; };
  double r1 = resolvent_term(disc, 0, 5.0, f, one).real(), r2 = resolvent_term(disc, 0, 50.0, f, one).real();
  EXPECT_GT(r1, r2);
  EXPECT_GT(r2, 0.0);
  EXPECT_LT(r2, 2e-2 * r1);
}

TEST(Sampling, PointcloudRejectsNothingAndCycles)
{
  std::vector<std::pair<Vec, Vec>> pts = {{Vec(0, 0, 0), Vec(1, 0, 0)}, {Vec(0.1, 0, 0), Vec(0, 1, 0)}};
  Ensemble e = sample_pointcloud(pts, 5, 1, 0, 0.2);
  ASSERT_EQ(e.particles.size(), 5u);
  EXPECT_EQ(e.particles[2].x, pts[0].first);
  EXPECT_EQ(e.particles[3].v, pts[1].second);
}

TEST(Sampling, SignedWeightsAllowed)
{
  Disk d;
  Density f = [](const Vec& x, const Vec& v) { return x[0] * std::exp(-v.squaredNorm() / 2); };
  auto h = [](double r) { return r * std::exp(-r * r / 2); };
  EXPECT_THROW(sample_weighted(d.dom, d.sm, f, h, 1000, 1000, 1, 0), DomainError);
  Ensemble e = sample_signed(d.dom, d.sm, f, h, 100000, 100000, 1, 0);
  EXPECT_NEAR(total_mass(e), 0.0, 0.02);
}
