#include "gapkin/quadrature.hpp"

#include "gapkin/common.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace gapkin {

namespace {

// Reference nodes on [-1, 1] via Newton on P_n, cached per order.
const Rule& reference_rule(int n)
{
  static std::mutex mtx;
  static std::map<int, Rule> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    double w = 2.0 / ((1.0 - z * z) * dp * dp);
    r.x[i] = -z;
    r.x[n - 1 - i] = z;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return cache.emplace(n, std::move(r)).first->second;
}

} // namespace

Rule gauss_legendre(int n, double a, double b)
{
  if (n < 1) throw DomainError("gauss_legendre: order must be >= 1");
  const Rule& ref = reference_rule(n);
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  double h = 0.5 * (b - a), c = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = c + h * ref.x[i];
    r.w[i] = h * ref.w[i];
  }
  return r;
}

Rule composite_gl(int order, int panels, double a, double b)
{
  if (panels < 1) throw DomainError("composite_gl: need at least one panel");
  Rule r;
  r.x.reserve(static_cast<std::size_t>(order) * panels);
  r.w.reserve(static_cast<std::size_t>(order) * panels);
  double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    Rule g = gauss_legendre(order, a + p * h, a + (p + 1) * h);
    r.x.insert(r.x.end(), g.x.begin(), g.x.end());
    r.w.insert(r.w.end(), g.w.begin(), g.w.end());
  }
  return r;
}

Rule trapezoid_periodic(int n, double a, double period)
{
  Rule r;
  r.x.resize(n);
  r.w.assign(n, period / n);
  for (int i = 0; i < n; ++i) r.x[i] = a + period * i / n;
  return r;
}

double integrate(const Rule& r, const std::function<double(double)>& f)
{
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) s += r.w[i] * f(r.x[i]);
  return s;
}

} // namespace gapkin
