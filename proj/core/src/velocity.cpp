#include "gapkin/velocity.hpp"

#include <algorithm>
#include <cmath>

namespace gapkin {

WeightProfile WeightProfile::power(double m)
{
  if (m < 0) throw DomainError("power weight needs m >= 0");
  WeightProfile w;
  w.kind = Kind::power;
  w.m = m;
  return w;
}

WeightProfile WeightProfile::stretched(double alpha, double s)
{
  if (!(s > 0 && s < 2)) throw DomainError("stretched weight needs s in (0,2)");
  WeightProfile w;
  w.kind = Kind::stretched;
  w.alpha = alpha;
  w.s = s;
  return w;
}

WeightProfile WeightProfile::gaussian(double beta)
{
  WeightProfile w;
  w.kind = Kind::gaussian;
  w.beta = beta;
  return w;
}

double WeightProfile::operator()(double rho) const
{
  switch (kind) {
  case Kind::power: return std::pow(rho, m);
  case Kind::stretched: return std::exp(alpha * std::pow(rho, s));
  case Kind::gaussian: return std::exp(beta * rho * rho);
  }
  return 0.0;
}

double WeightProfile::derivative(double rho) const
{
  switch (kind) {
  case Kind::power: return m == 0.0 ? 0.0 : m * std::pow(rho, m - 1.0);
  case Kind::stretched: return alpha * s * std::pow(rho, s - 1.0) * (*this)(rho);
  case Kind::gaussian: return 2.0 * beta * rho * (*this)(rho);
  }
  return 0.0;
}

SpeedMeasure::SpeedMeasure(int dim, double r0, double R0, WeightProfile w, int radial, int angular)
  : dim_(dim), r0_(r0), R0_(R0), w_(w)
{
  if (dim != 2 && dim != 3) throw DomainError("SpeedMeasure: dimension must be 2 or 3");
  if (!(r0 > 0 && R0 > r0)) throw DomainError("SpeedMeasure: need 0 < r0 < R0");
  if (radial < 1 || angular < 4) throw DomainError("SpeedMeasure: quadrature order too small");
  radial_ = gauss_legendre(radial, r0, R0);
  if (dim == 2) {
    for (int i = 0; i < angular; ++i) {
      double a = 2.0 * pi * (i + 0.5) / angular;
      dirs_.emplace_back(std::cos(a), std::sin(a), 0.0);
      dir_w_.push_back(2.0 * pi / angular);
    }
  } else {
    int nt = std::max(2, angular / 2);
    Rule ct = gauss_legendre(nt, -1.0, 1.0);
    for (int i = 0; i < nt; ++i)
      for (int j = 0; j < angular; ++j) {
        double ph = 2.0 * pi * (j + 0.5) / angular, c = ct.x[i], s = std::sqrt(1 - c * c);
        dirs_.emplace_back(s * std::cos(ph), s * std::sin(ph), c);
        dir_w_.push_back(ct.w[i] * 2.0 * pi / angular);
      }
  }
}

double SpeedMeasure::radial_density(double rho) const
{
  return sphere_area(dim_) * std::pow(rho, dim_ - 1) * w_(rho);
}

double SpeedMeasure::polar_integrate(const std::function<double(const Vec&)>& psi) const
{
  double total = 0.0;
  for (std::size_t a = 0; a < radial_.size(); ++a) {
    double rho = radial_.x[a], inner = 0.0;
    for (std::size_t k = 0; k < dirs_.size(); ++k) {
      double v = psi(rho * dirs_[k]);
      if (!std::isfinite(v)) throw NumericError("polar_integrate: non-finite integrand");
      inner += dir_w_[k] * v;
    }
    total += radial_.w[a] * std::pow(rho, dim_ - 1) * w_(rho) * inner;
  }
  return total;
}

double SpeedMeasure::radial_integrate(const std::function<double(double)>& f) const
{
  return integrate(radial_, f);
}

SpeedSampler::SpeedSampler(double r0, double R0, const std::function<double(double)>& h,
                           int resolution)
  : r0_(r0), R0_(R0)
{
  if (resolution < 1) throw DomainError("SpeedSampler: resolution must be positive");
  cdf_.assign(resolution + 1, 0.0);
  double dx = (R0 - r0) / resolution;
  for (int i = 0; i < resolution; ++i) {
    Rule g = gauss_legendre(4, r0 + i * dx, r0 + (i + 1) * dx);
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
      double v = h(g.x[k]);
      if (v < 0 || !std::isfinite(v)) throw DomainError("SpeedSampler: density must be finite and >= 0");
      s += g.w[k] * v;
    }
    cdf_[i + 1] = cdf_[i] + s;
  }
  mass_ = cdf_.back();
  if (!(mass_ > 0)) throw DomainError("SpeedSampler: density vanishes identically");
  for (auto& c : cdf_) c /= mass_;
  cdf_.back() = 1.0;
}

double SpeedSampler::quantile(double u) const
{
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t i = it == cdf_.begin() ? 0 : static_cast<std::size_t>(it - cdf_.begin()) - 1;
  if (i >= cdf_.size() - 1) i = cdf_.size() - 2;
  double lo = cdf_[i], hi = cdf_[i + 1];
  double f = hi > lo ? (u - lo) / (hi - lo) : 0.5;
  double dx = (R0_ - r0_) / (cdf_.size() - 1);
  return std::clamp(r0_ + (i + f) * dx, r0_, R0_);
}

double SpeedSampler::cdf(double rho) const
{
  if (rho <= r0_) return 0.0;
  if (rho >= R0_) return 1.0;
  double dx = (R0_ - r0_) / (cdf_.size() - 1);
  double p = (rho - r0_) / dx;
  auto i = static_cast<std::size_t>(p);
  if (i >= cdf_.size() - 1) return 1.0;
  return cdf_[i] + (p - i) * (cdf_[i + 1] - cdf_[i]);
}

namespace {

void frame(const Vec& n, Vec& e1, Vec& e2)
{
  Vec a = std::abs(n[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
  e1 = (a - a.dot(n) * n).normalized();
  e2 = n.cross(e1);
}

} // namespace

Vec sample_cosine_direction(const Vec& n, int d, Rng& rng)
{
  if (d == 2) {
    Vec t(-n[1], n[0], 0.0);
    for (;;) {
      double s = 2.0 * rng.uniform() - 1.0; // sin(theta)
      double c = std::sqrt(std::max(0.0, 1.0 - s * s));
      if (c > 0) return c * n + s * t;
    }
  }
  // Malley: uniform point in the unit disk lifted to the hemisphere
  Vec e1, e2;
  frame(n, e1, e2);
  for (;;) {
    double r = std::sqrt(rng.uniform()), ph = 2.0 * pi * rng.uniform();
    double c = std::sqrt(std::max(0.0, 1.0 - r * r));
    if (c > 0) return (c * n + r * std::cos(ph) * e1 + r * std::sin(ph) * e2).normalized();
  }
}

Vec sample_uniform_direction(int d, Rng& rng)
{
  if (d == 2) {
    double a = 2.0 * pi * rng.uniform();
    return Vec(std::cos(a), std::sin(a), 0.0);
  }
  double z = 2.0 * rng.uniform() - 1.0, ph = 2.0 * pi * rng.uniform();
  double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return Vec(s * std::cos(ph), s * std::sin(ph), z);
}

} // namespace gapkin
