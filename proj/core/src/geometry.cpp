#include "gapkin/geometry.hpp"

#include "gapkin/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace gapkin {

Domain Domain::disk(double radius)
{
  if (!(radius > 0)) throw DomainError("disk radius must be positive");
  Domain d;
  d.shape_ = Shape::disk;
  d.dim_ = 2;
  d.ax_[0] = d.ax_[1] = radius;
  d.diameter_ = 2.0 * radius;
  d.perimeter_ = 2.0 * pi * radius;
  d.volume_ = pi * radius * radius;
  return d;
}

Domain Domain::ball(double radius)
{
  if (!(radius > 0)) throw DomainError("ball radius must be positive");
  Domain d;
  d.shape_ = Shape::ball;
  d.dim_ = 3;
  d.ax_[0] = d.ax_[1] = d.ax_[2] = radius;
  d.diameter_ = 2.0 * radius;
  d.perimeter_ = 4.0 * pi * radius * radius;
  d.volume_ = 4.0 / 3.0 * pi * radius * radius * radius;
  return d;
}

Domain Domain::ellipse(double a, double b)
{
  if (!(a > 0 && b > 0)) throw DomainError("ellipse semi-axes must be positive");
  Domain d;
  d.shape_ = Shape::ellipse;
  d.dim_ = 2;
  d.ax_[0] = a;
  d.ax_[1] = b;
  d.diameter_ = 2.0 * std::max(a, b);
  // perimeter by periodic trapezoid (spectrally accurate)
  const int n = 4096;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += d.speed_at(2.0 * pi * i / n);
  d.perimeter_ = s * 2.0 * pi / n;
  d.volume_ = pi * a * b;
  return d;
}

double Domain::level(const Vec& x) const
{
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += (x[i] / ax_[i]) * (x[i] / ax_[i]);
  return s - 1.0;
}

bool Domain::on_boundary(const Vec& x, double tol) const { return std::abs(level(x)) <= tol; }

Vec Domain::normal(const Vec& x) const
{
  Vec g = Vec::Zero();
  for (int i = 0; i < dim_; ++i) g[i] = x[i] / (ax_[i] * ax_[i]);
  double nn = g.norm();
  if (nn == 0.0) throw DomainError("normal requested at the origin");
  return g / nn;
}

Vec Domain::snap(const Vec& x) const
{
  double s = std::sqrt(level(x) + 1.0);
  if (s == 0.0) throw DomainError("cannot snap the origin onto the boundary");
  return x / s;
}

double Domain::exit_time(const Vec& x, const Vec& v, Direction dir) const
{
  double vn = v.norm();
  if (!(vn > 0)) throw DomainError("exit_time: zero velocity");
  double c = level(x);
  if (c > 1e-9) throw DomainError("exit_time: point outside the domain");
  Vec u = dir == Direction::forward ? v : Vec(-v);

  double A = 0, B = 0;
  for (int i = 0; i < dim_; ++i) {
    double X = x[i] / ax_[i], U = u[i] / ax_[i];
    A += U * U;
    B += X * U;
  }
  if (c >= -1e-12) {
    // starting on the boundary: outgoing or tangential launches exit at once
    if (u.dot(normal(x)) / vn >= -1e-12) return 0.0;
  }
  double disc = std::max(0.0, B * B - A * c);
  double sq = std::sqrt(disc);
  double t = B <= 0 ? (-B + sq) / A : -c / (B + sq);
  return std::max(0.0, t);
}

Vec Domain::point_at(double t) const { return Vec(ax_[0] * std::cos(t), ax_[1] * std::sin(t), 0.0); }

Vec Domain::tangent_at(double t) const
{
  Vec d(-ax_[0] * std::sin(t), ax_[1] * std::cos(t), 0.0);
  return d / d.norm();
}

double Domain::speed_at(double t) const
{
  return std::hypot(ax_[0] * std::sin(t), ax_[1] * std::cos(t));
}

double Domain::param_of(const Vec& x) const
{
  double t = std::atan2(x[1] / ax_[1], x[0] / ax_[0]);
  return t < 0 ? t + 2.0 * pi : t;
}

Vec Domain::sphere_point(double theta, double phi) const
{
  return Vec(ax_[0] * std::sin(theta) * std::cos(phi), ax_[1] * std::sin(theta) * std::sin(phi),
             ax_[2] * std::cos(theta));
}

BoundaryGrid make_boundary_grid(const Domain& dom, int n)
{
  if (n < 3) throw DomainError("boundary grid needs at least 3 nodes");
  BoundaryGrid g;
  if (dom.dim() == 2) {
    g.h = 2.0 * pi / n;
    for (int i = 0; i < n; ++i) {
      double t = g.h * i;
      Vec x = dom.point_at(t);
      g.x.push_back(x);
      g.n.push_back(dom.normal(x));
      g.w.push_back(g.h * dom.speed_at(t));
      g.param.push_back(t);
    }
    return g;
  }
  double R = dom.radius();
  Rule th = gauss_legendre(n, 0.0, pi);
  g.n_theta = n;
  g.n_phi = 2 * n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < g.n_phi; ++j) {
      double phi = 2.0 * pi * j / g.n_phi;
      Vec x = dom.sphere_point(th.x[i], phi);
      g.x.push_back(x);
      g.n.push_back(dom.normal(x));
      g.w.push_back(th.w[i] * R * R * std::sin(th.x[i]) * 2.0 * pi / g.n_phi);
      g.param.push_back(th.x[i]);
    }
  return g;
}

double jacobian_J(const Domain& dom, const Vec& x, const Vec& y)
{
  Vec d = x - y;
  double r = d.norm();
  if (r < 1e-14 * dom.diameter()) throw DomainError("jacobian_J: coincident points");
  double a = std::max(0.0, d.dot(dom.normal(x)));
  double b = std::max(0.0, -d.dot(dom.normal(y)));
  return a * b / std::pow(r, dom.dim() + 1);
}

double jacobian_diagonal_limit(const Domain& dom)
{
  if (dom.dim() == 3) return 1.0 / (4.0 * dom.radius() * dom.radius());
  return 0.0;
}

namespace {

// Orthonormal frame (e1, e2) completing the unit vector n in R^3.
void complete_frame(const Vec& n, Vec& e1, Vec& e2)
{
  Vec a = std::abs(n[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
  e1 = (a - a.dot(n) * n).normalized();
  e2 = n.cross(e1);
}

void require_finite(double v, const char* what)
{
  if (!std::isfinite(v)) throw NumericError(std::string("non-finite value in ") + what);
}

} // namespace

CovResult change_of_variables_check(const Domain& dom, const Vec& x,
                                    const std::function<double(const Vec&)>& g, int panels)
{
  if (!dom.on_boundary(x)) throw DomainError("change_of_variables_check: x not on boundary");
  Vec n = dom.normal(x);
  CovResult res{0.0, 0.0};
  if (dom.dim() == 2) {
    Vec t(-n[1], n[0], 0.0);
    Rule th = composite_gl(16, std::max(1, panels / 8), -pi / 2, pi / 2);
    for (std::size_t k = 0; k < th.size(); ++k)
      res.lhs += th.w[k] * std::cos(th.x[k]) * g(std::cos(th.x[k]) * n + std::sin(th.x[k]) * t);
    double t0 = dom.param_of(x);
    Rule par = composite_gl(16, panels, t0, t0 + 2.0 * pi);
    for (std::size_t k = 0; k < par.size(); ++k) {
      Vec y = dom.point_at(par.x[k]);
      Vec d = x - y;
      double r = d.norm();
      if (r < 1e-13) continue;
      res.rhs += par.w[k] * dom.speed_at(par.x[k]) * jacobian_J(dom, x, y) * g(d / r);
    }
  } else {
    Vec e1, e2;
    complete_frame(n, e1, e2);
    Rule th = composite_gl(16, std::max(1, panels / 8), 0.0, pi / 2);
    Rule ph = trapezoid_periodic(4 * panels, 0.0, 2.0 * pi);
    for (std::size_t i = 0; i < th.size(); ++i)
      for (std::size_t j = 0; j < ph.size(); ++j) {
        double c = std::cos(th.x[i]), s = std::sin(th.x[i]);
        Vec sig = c * n + s * (std::cos(ph.x[j]) * e1 + std::sin(ph.x[j]) * e2);
        res.lhs += th.w[i] * ph.w[j] * c * s * g(sig);
      }
    // sphere around the pole x: y = R(cos psi xhat + sin psi (cos phi e1 + sin phi e2))
    double R = dom.radius();
    Vec xh = x / x.norm();
    Rule ps = composite_gl(16, std::max(1, panels / 4), 0.0, pi);
    for (std::size_t i = 0; i < ps.size(); ++i)
      for (std::size_t j = 0; j < ph.size(); ++j) {
        double c = std::cos(ps.x[i]), s = std::sin(ps.x[i]);
        Vec y = R * (c * xh + s * (std::cos(ph.x[j]) * e1 + std::sin(ph.x[j]) * e2));
        Vec d = x - y;
        double r = d.norm();
        if (r < 1e-13) continue;
        res.rhs += ps.w[i] * ph.w[j] * R * R * s * jacobian_J(dom, x, y) * g(d / r);
      }
  }
  require_finite(res.lhs, "change_of_variables_check (lhs)");
  require_finite(res.rhs, "change_of_variables_check (rhs)");
  return res;
}

Flatness flatness_constant(const Domain& dom, int samples)
{
  if (samples < 2) throw DomainError("flatness_constant needs at least 2 samples");
  std::vector<Vec> pts;
  if (dom.dim() == 2) {
    for (int i = 0; i < samples; ++i) pts.push_back(dom.point_at(2.0 * pi * (i + 0.5) / samples));
  } else {
    // Fibonacci sphere
    const double ga = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < samples; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / samples;
      pts.push_back(dom.sphere_point(std::acos(z), ga * i));
    }
  }
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Vec n = dom.normal(pts[i]);
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      Vec d = pts[i] - pts[j];
      double r2 = d.squaredNorm();
      if (r2 < 1e-24) continue;
      best = std::max(best, std::abs(d.dot(n)) / r2);
    }
  }
  return {1.0, best};
}

} // namespace gapkin
