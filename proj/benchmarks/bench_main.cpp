#include <gapkin/spectral.hpp>
#include <gapkin/transport.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace gapkin;

namespace {

struct Disk {
  Domain dom = Domain::disk(1.0);
  SpeedMeasure sm{2, 0.5, 3.0};
  DiffuseKernel k = DiffuseKernel::maxwell(dom, sm, BoundaryField(1.0));
  Wall wall{k};
};

std::vector<std::pair<Vec, Vec>> random_phase_points(const Domain& dom, int n)
{
  std::mt19937_64 g(7);
  std::uniform_real_distribution<double> u(-1, 1), s(0.5, 3.0);
  std::vector<std::pair<Vec, Vec>> pts;
  while (static_cast<int>(pts.size()) < n) {
    Vec x(0.9 * u(g), 0.9 * u(g), 0);
    if (dom.level(x) > -1e-3) continue;
    Vec v(u(g), u(g), 0);
    if (v.norm() < 1e-3) continue;
    pts.emplace_back(x, s(g) * v.normalized());
  }
  return pts;
}

void bm_exit_time(benchmark::State& st, Domain dom)
{
  auto pts = random_phase_points(dom, 1024);
  std::size_t i = 0;
  for (auto _ : st) {
    const auto& [x, v] = pts[i++ & 1023];
    benchmark::DoNotOptimize(dom.exit_time(x, v));
  }
}
BENCHMARK_CAPTURE(bm_exit_time, disk, Domain::disk(1.0));
BENCHMARK_CAPTURE(bm_exit_time, ellipse, Domain::ellipse(1.5, 1.0));

SpectralGrid grid(int nx, int ns)
{
  SpectralGrid g;
  g.boundary_nodes = nx;
  g.speed_nodes = ns;
  return g;
}

void bm_discretize(benchmark::State& st)
{
  Disk d;
  for (auto _ : st) {
    BoundaryDiscretization disc(d.k, grid(static_cast<int>(st.range(0)), 16));
    benchmark::DoNotOptimize(disc.nx());
  }
}
BENCHMARK(bm_discretize)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void bm_reduced_apply(benchmark::State& st)
{
  Disk d;
  BoundaryDiscretization disc(d.k, grid(static_cast<int>(st.range(0)), 16));
  ReducedOperator W(disc, cplx(-0.5, 1.0));
  Eigen::VectorXcd u = Eigen::VectorXcd::Ones(static_cast<Eigen::Index>(W.size()));
  for (auto _ : st) {
    u = W.apply(u);
    u /= u.norm();
  }
}
BENCHMARK(bm_reduced_apply)->Arg(64)->Arg(128)->Unit(benchmark::kMicrosecond);

void bm_reduced_eigenvalues(benchmark::State& st)
{
  Disk d;
  BoundaryDiscretization disc(d.k, grid(static_cast<int>(st.range(0)), 16));
  for (auto _ : st) {
    ReducedOperator W(disc, cplx(-1.1, 1.5));
    benchmark::DoNotOptimize(W.eigenvalues());
  }
}
BENCHMARK(bm_reduced_eigenvalues)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void bm_advance(benchmark::State& st)
{
  Disk d;
  Simulator sim(d.wall);
  for (auto _ : st) {
    st.PauseTiming();
    Ensemble ens = sample_uniform(d.dom, d.sm, 10000, 1, 0, 1e-4);
    sim.prime(ens);
    st.ResumeTiming();
    sim.advance(ens, 5.0);
    benchmark::DoNotOptimize(ens.particles.data());
  }
  st.SetItemsProcessed(st.iterations() * 10000);
}
BENCHMARK(bm_advance)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
