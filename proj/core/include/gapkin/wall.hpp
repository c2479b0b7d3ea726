#pragma once

#include "gapkin/common.hpp"
#include "gapkin/geometry.hpp"
#include "gapkin/velocity.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace gapkin {

// Scalar field on the boundary: a constant, or periodic samples placed
// uniformly in the normalized boundary parameter (d=2: t/2pi, d=3: azimuth/2pi)
// and interpolated linearly.
class BoundaryField {
public:
  BoundaryField(double c = 0.0) : samples_{c} {}
  explicit BoundaryField(std::vector<double> samples);

  double at(const Domain& dom, const Vec& x) const;
  bool constant() const { return samples_.size() == 1; }
  double value() const { return samples_.front(); }
  double max() const;
  double min() const;
  double max_jump() const;
  const std::vector<double>& samples() const { return samples_; }

private:
  std::vector<double> samples_;
};

// Isotropic diffuse kernel k(x, rho, rho_in): rho is the speed leaving the
// wall, rho_in the speed arriving at it.
class DiffuseKernel {
public:
  enum class Preset { maxwell, uniform, custom };
  using Profile = std::function<double(const Vec& x, double rho, double rho_in)>;

  static DiffuseKernel maxwell(const Domain& dom, const SpeedMeasure& sm, BoundaryField theta,
                               int table_resolution = 4096);
  static DiffuseKernel uniform(const Domain& dom, const SpeedMeasure& sm,
                               int table_resolution = 4096);
  //! General kernel G(x, rho, rho_in), normalized numerically for each (x, rho_in).
  static DiffuseKernel custom(const Domain& dom, const SpeedMeasure& sm, Profile G);

  Preset preset() const { return preset_; }
  //! k independent of the incoming speed.
  bool separable() const { return preset_ != Preset::custom; }
  //! k independent of the wall point.
  bool x_independent() const { return preset_ == Preset::uniform || theta_.constant(); }
  const Domain& domain() const { return *dom_; }
  const SpeedMeasure& speeds() const { return *sm_; }
  const BoundaryField& theta() const { return theta_; }
  double theta_at(const Vec& x) const { return theta_.at(*dom_, x); }

  //! Unnormalized profile G(x, rho) (presets) or G(x, rho, rho_in) (custom).
  double profile(const Vec& x, double rho, double rho_in = 0.0) const;
  double profile_derivative(const Vec& x, double rho, double rho_in = 0.0) const;
  //! gamma(x) = kappa_d int rho^d varpi G drho over the truncated annulus.
  double gamma(const Vec& x, double rho_in = 0.0) const;

  //! k(x, rho, rho_in); arguments outside [r0, R0] raise a DomainError.
  double eval(const Vec& x, double rho, double rho_in) const;
  //! Same formula without the annulus check (used for truncation tests).
  double eval_extended(const Vec& x, double rho, double rho_in) const;
  //! d k / d rho and d k / d rho_in.
  double d_rho(const Vec& x, double rho, double rho_in) const;
  double d_rho_in(const Vec& x, double rho, double rho_in) const;

  //! Speed with density proportional to k(x, rho, rho_in) rho^d varpi(rho).
  double sample_speed(const Vec& x, double rho_in, Rng& rng) const;

private:
  DiffuseKernel() = default;
  double gamma_for_theta(double theta) const;

  Preset preset_ = Preset::maxwell;
  std::shared_ptr<const Domain> dom_;
  std::shared_ptr<const SpeedMeasure> sm_;
  BoundaryField theta_{1.0};
  Profile custom_;
  Rule gamma_rule_;
  double gamma_const_ = 0.0; // cached when the kernel is x-independent
  double theta_max_ = 1.0;
  std::shared_ptr<const SpeedSampler> envelope_;
};

enum class Reflection { specular, bounceback };

// alpha R + (1 - alpha) K.
class Wall {
public:
  explicit Wall(DiffuseKernel k, BoundaryField alpha = BoundaryField(0.0),
                Reflection refl = Reflection::specular);

  const DiffuseKernel& kernel() const { return k_; }
  const BoundaryField& alpha() const { return alpha_; }
  Reflection reflection() const { return refl_; }
  double alpha_at(const Vec& x) const { return alpha_.at(k_.domain(), x); }
  double beta_at(const Vec& x) const { return 1.0 - alpha_at(x); }
  bool pure_diffuse() const { return alpha_.constant() && alpha_.value() == 0.0; }

  //! Reflection map V(x, v).
  Vec reflect(const Vec& x, const Vec& v) const;

  //! Outgoing velocity for a particle hitting the wall at x with v_in.v.n > 0.
  //! `diffuse` (optional) reports which branch fired.
  Vec resample_outgoing(const Vec& x, const Vec& v_in, Rng& rng, bool* diffuse = nullptr) const;

private:
  DiffuseKernel k_;
  BoundaryField alpha_;
  Reflection refl_;
};

struct BetaConstants {
  double osc = 0;
  double beta_inf = 0;
  double c_beta = 0;
  double lambda_beta = 0; // +inf when c_beta = 0, NaN when not admissible
  bool admissible = false;
};

BetaConstants beta_constants(const Wall& wall, double r0);

struct IntegrabilityCheck {
  std::string name;
  double value;
  bool pass;
  std::string note;
};

//! Integrability conditions on the truncated measure, with truncation-growth
//! tests standing in for the rho -> infinity statements.
std::vector<IntegrabilityCheck> validate_integrability(const DiffuseKernel& k, int nodes = 64);

} // namespace gapkin
