#pragma once

#include "gapkin/common.hpp"
#include "gapkin/quadrature.hpp"
#include "gapkin/rng.hpp"

#include <functional>
#include <vector>

namespace gapkin {

// Radial weight varpi(rho).
struct WeightProfile {
  enum class Kind { power, stretched, gaussian };
  Kind kind = Kind::power;
  double m = 0.0;     // power: rho^m
  double alpha = 0.0; // stretched: exp(alpha rho^s)
  double s = 1.0;
  double beta = 0.0; // gaussian: exp(beta rho^2)

  static WeightProfile power(double m);
  static WeightProfile stretched(double alpha, double s);
  static WeightProfile gaussian(double beta);

  double operator()(double rho) const;
  double derivative(double rho) const;
};

// m(dv) = varpi(|v|) dv restricted to r0 <= |v| <= R0.
class SpeedMeasure {
public:
  SpeedMeasure(int dim, double r0, double R0, WeightProfile w = WeightProfile::power(0),
               int radial = 64, int angular = 128);

  int dim() const { return dim_; }
  double r0() const { return r0_; }
  double R0() const { return R0_; }
  const WeightProfile& profile() const { return w_; }
  double weight(double rho) const { return w_(rho); }
  double weight_derivative(double rho) const { return w_.derivative(rho); }
  //! Density of m0: |S^{d-1}| rho^{d-1} varpi(rho).
  double radial_density(double rho) const;
  bool in_support(double rho) const { return rho >= r0_ && rho <= R0_; }

  const Rule& radial_rule() const { return radial_; }
  //! Unit directions and weights (sum = |S^{d-1}|).
  const std::vector<Vec>& directions() const { return dirs_; }
  const std::vector<double>& direction_weights() const { return dir_w_; }

  //! (1/|S^{d-1}|) int m0(drho) int_{S^{d-1}} psi(rho sigma) dsigma.
  double polar_integrate(const std::function<double(const Vec&)>& psi) const;
  //! int_{r0}^{R0} f(rho) drho with the radial rule.
  double radial_integrate(const std::function<double(double)>& f) const;

private:
  int dim_;
  double r0_, R0_;
  WeightProfile w_;
  Rule radial_;
  std::vector<Vec> dirs_;
  std::vector<double> dir_w_;
};

// Inverse-CDF sampler for a density proportional to h on [r0, R0].
class SpeedSampler {
public:
  SpeedSampler() = default;
  SpeedSampler(double r0, double R0, const std::function<double(double)>& h, int resolution = 4096);

  double sample(Rng& rng) const { return quantile(rng.uniform()); }
  double quantile(double u) const;
  double cdf(double rho) const;
  double mass() const { return mass_; }

private:
  double r0_ = 0, R0_ = 0, mass_ = 0;
  std::vector<double> cdf_; // normalized, size resolution + 1
};

//! Direction with density |sigma.n| / kappa_d on {sigma.n > 0}.
Vec sample_cosine_direction(const Vec& n, int d, Rng& rng);

//! Uniform direction on S^{d-1}.
Vec sample_uniform_direction(int d, Rng& rng);

} // namespace gapkin
