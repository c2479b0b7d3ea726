#include "gapkin/wall.hpp"

#include <algorithm>
#include <cmath>

namespace gapkin {

BoundaryField::BoundaryField(std::vector<double> samples) : samples_(std::move(samples))
{
  if (samples_.empty()) throw DomainError("BoundaryField: no samples");
}

double BoundaryField::at(const Domain& dom, const Vec& x) const
{
  if (constant()) return samples_[0];
  double t = dom.dim() == 2 ? dom.param_of(x) : std::atan2(x[1], x[0]);
  if (t < 0) t += 2.0 * pi;
  double p = t / (2.0 * pi) * samples_.size();
  auto i = static_cast<std::size_t>(std::floor(p));
  double f = p - std::floor(p);
  i %= samples_.size();
  return (1.0 - f) * samples_[i] + f * samples_[(i + 1) % samples_.size()];
}

double BoundaryField::max() const { return *std::max_element(samples_.begin(), samples_.end()); }
double BoundaryField::min() const { return *std::min_element(samples_.begin(), samples_.end()); }

double BoundaryField::max_jump() const
{
  double j = 0.0;
  for (std::size_t i = 0; i < samples_.size(); ++i)
    j = std::max(j, std::abs(samples_[(i + 1) % samples_.size()] - samples_[i]));
  return j;
}

DiffuseKernel DiffuseKernel::maxwell(const Domain& dom, const SpeedMeasure& sm, BoundaryField theta,
                                     int table_resolution)
{
  if (!(theta.min() > 0)) throw DomainError("maxwell wall: temperature must be positive");
  if (dom.dim() != sm.dim()) throw DomainError("maxwell wall: dimension mismatch");
  DiffuseKernel k;
  k.preset_ = Preset::maxwell;
  k.dom_ = std::make_shared<const Domain>(dom);
  k.sm_ = std::make_shared<const SpeedMeasure>(sm);
  k.theta_ = std::move(theta);
  k.theta_max_ = k.theta_.max();
  k.gamma_rule_ = composite_gl(16, 16, sm.r0(), sm.R0());
  if (k.theta_.constant()) k.gamma_const_ = k.gamma_for_theta(k.theta_.value());
  for (double th : k.theta_.samples())
    if (k.gamma_for_theta(th) < 1e-12) throw DomainError("maxwell wall: degenerate gamma (below 1e-12)");
  const int d = sm.dim();
  const double tm = k.theta_max_;
  const auto* smp = k.sm_.get();
  k.envelope_ = std::make_shared<const SpeedSampler>(
      sm.r0(), sm.R0(),
      [=](double r) { return std::pow(r, d) * smp->weight(r) * std::exp(-r * r / (2.0 * tm)); },
      table_resolution);
  return k;
}

DiffuseKernel DiffuseKernel::uniform(const Domain& dom, const SpeedMeasure& sm, int table_resolution)
{
  if (dom.dim() != sm.dim()) throw DomainError("uniform wall: dimension mismatch");
  DiffuseKernel k;
  k.preset_ = Preset::uniform;
  k.dom_ = std::make_shared<const Domain>(dom);
  k.sm_ = std::make_shared<const SpeedMeasure>(sm);
  k.gamma_rule_ = composite_gl(16, 16, sm.r0(), sm.R0());
  k.gamma_const_ = k.gamma(Vec::Zero());
  const int d = sm.dim();
  const auto* smp = k.sm_.get();
  k.envelope_ = std::make_shared<const SpeedSampler>(
      sm.r0(), sm.R0(), [=](double r) { return std::pow(r, d) * smp->weight(r); }, table_resolution);
  return k;
}

DiffuseKernel DiffuseKernel::custom(const Domain& dom, const SpeedMeasure& sm, Profile G)
{
  if (dom.dim() != sm.dim()) throw DomainError("custom wall: dimension mismatch");
  DiffuseKernel k;
  k.preset_ = Preset::custom;
  k.dom_ = std::make_shared<const Domain>(dom);
  k.sm_ = std::make_shared<const SpeedMeasure>(sm);
  k.custom_ = std::move(G);
  k.gamma_rule_ = composite_gl(16, 16, sm.r0(), sm.R0());
  return k;
}

double DiffuseKernel::gamma_for_theta(double theta) const
{
  const int d = sm_->dim();
  double norm = std::pow(2.0 * pi * theta, -0.5 * d), s = 0.0;
  for (std::size_t i = 0; i < gamma_rule_.size(); ++i) {
    double r = gamma_rule_.x[i];
    s += gamma_rule_.w[i] * std::pow(r, d) * sm_->weight(r) * norm * std::exp(-r * r / (2.0 * theta));
  }
  return kappa(d) * s;
}

double DiffuseKernel::profile(const Vec& x, double rho, double rho_in) const
{
  switch (preset_) {
  case Preset::maxwell: {
    double th = theta_at(x);
    return std::pow(2.0 * pi * th, -0.5 * sm_->dim()) * std::exp(-rho * rho / (2.0 * th));
  }
  case Preset::uniform: return 1.0;
  case Preset::custom: return custom_(x, rho, rho_in);
  }
  return 0.0;
}

double DiffuseKernel::profile_derivative(const Vec& x, double rho, double rho_in) const
{
  switch (preset_) {
  case Preset::maxwell: return -rho / theta_at(x) * profile(x, rho);
  case Preset::uniform: return 0.0;
  case Preset::custom: {
    double h = 1e-6 * std::max(1.0, rho);
    return (custom_(x, rho + h, rho_in) - custom_(x, rho - h, rho_in)) / (2.0 * h);
  }
  }
  return 0.0;
}

double DiffuseKernel::gamma(const Vec& x, double rho_in) const
{
  if (gamma_const_ > 0) return gamma_const_;
  if (preset_ == Preset::maxwell) return gamma_for_theta(theta_at(x));
  const int d = sm_->dim();
  double s = 0.0;
  for (std::size_t i = 0; i < gamma_rule_.size(); ++i) {
    double r = gamma_rule_.x[i];
    s += gamma_rule_.w[i] * std::pow(r, d) * sm_->weight(r) * profile(x, r, rho_in);
  }
  double g = kappa(d) * s;
  if (g < 1e-12) throw DomainError("diffuse kernel: degenerate gamma (below 1e-12)");
  return g;
}

double DiffuseKernel::eval_extended(const Vec& x, double rho, double rho_in) const
{
  // the uniform law lives on the annulus only
  if (preset_ == Preset::uniform && (rho < sm_->r0() || rho > sm_->R0())) return 0.0;
  return profile(x, rho, rho_in) / gamma(x, rho_in);
}

double DiffuseKernel::eval(const Vec& x, double rho, double rho_in) const
{
  const double tol = 1e-12 * sm_->R0();
  if (rho < sm_->r0() - tol || rho > sm_->R0() + tol || rho_in < sm_->r0() - tol ||
      rho_in > sm_->R0() + tol)
    throw DomainError("diffuse kernel: speed outside [r0, R0]");
  return eval_extended(x, rho, rho_in);
}

double DiffuseKernel::d_rho(const Vec& x, double rho, double rho_in) const
{
  return profile_derivative(x, rho, rho_in) / gamma(x, rho_in);
}

double DiffuseKernel::d_rho_in(const Vec& x, double rho, double rho_in) const
{
  if (separable()) return 0.0;
  double h = 1e-6 * std::max(1.0, rho_in);
  return (eval_extended(x, rho, rho_in + h) - eval_extended(x, rho, rho_in - h)) / (2.0 * h);
}

double DiffuseKernel::sample_speed(const Vec& x, double rho_in, Rng& rng) const
{
  switch (preset_) {
  case Preset::uniform: return envelope_->sample(rng);
  case Preset::maxwell: {
    double th = theta_at(x);
    if (th >= theta_max_) return envelope_->sample(rng);
    double c = 0.5 * (1.0 / th - 1.0 / theta_max_);
    for (;;) {
      double r = envelope_->sample(rng);
      if (rng.uniform() < std::exp(-c * r * r)) return r;
    }
  }
  case Preset::custom: {
    const int d = sm_->dim();
    SpeedSampler s(
        sm_->r0(), sm_->R0(),
        [&](double r) { return std::pow(r, d) * sm_->weight(r) * profile(x, r, rho_in); }, 512);
    return s.sample(rng);
  }
  }
  return sm_->r0();
}

Wall::Wall(DiffuseKernel k, BoundaryField alpha, Reflection refl)
  : k_(std::move(k)), alpha_(std::move(alpha)), refl_(refl)
{
  if (alpha_.min() < 0 || alpha_.max() > 1) throw DomainError("wall: alpha must lie in [0,1]");
}

Vec Wall::reflect(const Vec& x, const Vec& v) const
{
  if (refl_ == Reflection::bounceback) return -v;
  Vec n = k_.domain().normal(x);
  return v - 2.0 * v.dot(n) * n;
}

Vec Wall::resample_outgoing(const Vec& x, const Vec& v_in, Rng& rng, bool* diffuse) const
{
  const Domain& dom = k_.domain();
  Vec n = dom.normal(x);
  double rho_in = v_in.norm();
  bool tangential = std::abs(v_in.dot(n)) < 1e-12 * rho_in;
  if (!tangential && !pure_diffuse()) {
    double a = alpha_at(x);
    if (a > 0 && rng.uniform() < a) {
      if (diffuse) *diffuse = false;
      return reflect(x, v_in);
    }
  }
  if (diffuse) *diffuse = true;
  const SpeedMeasure& sm = k_.speeds();
  double rin = std::clamp(rho_in, sm.r0(), sm.R0());
  double rho = k_.sample_speed(x, rin, rng);
  return rho * sample_cosine_direction(-n, dom.dim(), rng);
}

BetaConstants beta_constants(const Wall& wall, double r0)
{
  BetaConstants b;
  double amin = wall.alpha().min(), amax = wall.alpha().max();
  b.beta_inf = 1.0 - amin;
  b.osc = amax - amin;
  b.c_beta = (1.0 + b.osc) * (1.0 + b.osc) - b.beta_inf * b.beta_inf;
  b.admissible = b.c_beta < 1.0;
  double D = wall.kernel().domain().diameter();
  if (!b.admissible)
    b.lambda_beta = std::numeric_limits<double>::quiet_NaN();
  else if (b.c_beta <= 0.0)
    b.lambda_beta = std::numeric_limits<double>::infinity();
  else
    b.lambda_beta = -(r0 / (2.0 * D)) * std::log(b.c_beta);
  return b;
}

namespace {

std::vector<Vec> sample_boundary(const Domain& dom, int n)
{
  std::vector<Vec> pts;
  if (dom.dim() == 2) {
    for (int i = 0; i < n; ++i) pts.push_back(dom.point_at(2.0 * pi * i / n));
  } else {
    for (int i = 0; i < n; ++i) pts.push_back(dom.sphere_point(0.5 * pi, 2.0 * pi * i / n));
    pts.push_back(dom.sphere_point(0.0, 0.0));
  }
  return pts;
}

} // namespace

std::vector<IntegrabilityCheck> validate_integrability(const DiffuseKernel& k, int nodes)
{
  const Domain& dom = k.domain();
  const SpeedMeasure& sm = k.speeds();
  const int d = sm.dim();
  const double r0 = sm.r0(), R0 = sm.R0();
  auto ys = sample_boundary(dom, k.x_independent() ? 1 : nodes);
  std::vector<double> rin = k.separable() ? std::vector<double>{r0}
                                          : std::vector<double>{r0, 0.5 * (r0 + R0), R0};
  Rule out_speeds = gauss_legendre(32, r0, R0);

  auto finite_or_throw = [](double v, const char* name) {
    if (!std::isfinite(v)) throw NumericError(std::string("non-finite integrand in condition ") + name);
    return v;
  };

  // rho^{d+2} k(y,s,rho) k(y,rho,w) varpi(rho) at the truncation edge
  auto edge_decay = [&](double R) {
    double best = 0.0;
    for (const Vec& y : ys)
      for (double w : rin) {
        double ks = 0.0;
        for (double s : out_speeds.x) ks = std::max(ks, k.eval_extended(y, s, R));
        ks = std::max(ks, k.eval_extended(y, r0, R));
        best = std::max(best, std::pow(R, d + 2) * ks * k.eval_extended(y, R, w) * sm.weight(R));
      }
    return finite_or_throw(best, "edge_decay");
  };
  // int rho^{d+1} (rho k |varpi'| + rho varpi |k_rho| + k varpi)
  auto mixed = [&](double a, double R) {
    Rule q = composite_gl(16, 32, a, R);
    double best = 0.0;
    for (const Vec& y : ys)
      for (double w : rin) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) {
          double r = q.x[i], kk = k.eval_extended(y, r, w);
          s += q.w[i] * std::pow(r, d + 1) *
               (r * kk * std::abs(sm.weight_derivative(r)) +
                r * sm.weight(r) * std::abs(k.d_rho(y, r, w)) + kk * sm.weight(r));
        }
        best = std::max(best, s);
      }
    return finite_or_throw(best, "mixed_integral");
  };
  // int rho^{d+2} varpi k(y,rho,w) int s^d varpi |d k(x,s,rho)/d rho| ds
  auto deriv_product = [&](double a, double R) {
    if (k.separable()) return 0.0;
    Rule q = composite_gl(16, 16, a, R);
    double best = 0.0;
    for (const Vec& y : ys)
      for (const Vec& x : ys)
        for (double w : rin) {
          double s = 0.0;
          for (std::size_t i = 0; i < q.size(); ++i) {
            double r = q.x[i], inner = 0.0;
            for (std::size_t j = 0; j < out_speeds.size(); ++j) {
              double sp = out_speeds.x[j];
              inner += out_speeds.w[j] * std::pow(sp, d) * sm.weight(sp) * std::abs(k.d_rho_in(x, sp, r));
            }
            s += q.w[i] * std::pow(r, d + 2) * sm.weight(r) * k.eval_extended(y, r, w) * kappa(d) * inner;
          }
          best = std::max(best, s);
        }
    return finite_or_throw(best, "derivative_product");
  };

  std::vector<IntegrabilityCheck> out;
  {
    double a = edge_decay(R0), b = edge_decay(2.0 * R0);
    out.push_back({"edge_decay", a, b < a || (a == 0 && b == 0),
                   "rho^{d+2} k k varpi at R0; passes when smaller at 2 R0"});
  }
  {
    double v = 0.0;
    for (const Vec& y : ys)
      for (double w : rin) v = std::max(v, k.eval(y, r0, w));
    v = finite_or_throw(v, "sup_at_r0");
    out.push_back({"sup_at_r0", v, std::isfinite(v), "sup of k(y, r0, w): finite"});
  }
  auto growth = [&](const char* name, auto&& f) {
    double i1 = f(r0, R0), d1 = f(R0, 2.0 * R0), d2 = f(2.0 * R0, 4.0 * R0);
    out.push_back({name, i1, d2 <= d1,
                   "integral up to R0; passes when the tail increment shrinks from [R0,2R0] to [2R0,4R0]"});
  };
  growth("mixed_integral", mixed);
  growth("derivative_product", deriv_product);
  return out;
}

} // namespace gapkin
