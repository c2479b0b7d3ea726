#pragma once

#include "gapkin/common.hpp"

#include <functional>
#include <vector>

namespace gapkin {

enum class Shape { disk, ball, ellipse };
enum class Direction { forward, backward };

// Convex analytic domain: disk or ellipse in d=2, ball in d=3. All shapes are
// linear images of the unit sphere, which keeps exit times closed-form.
class Domain {
public:
  static Domain disk(double radius);
  static Domain ball(double radius);
  static Domain ellipse(double a, double b);

  Shape shape() const { return shape_; }
  int dim() const { return dim_; }
  double diameter() const { return diameter_; }
  double boundary_measure() const { return perimeter_; }
  double volume() const { return volume_; }
  //! Radius for disk/ball; semi-axis a for the ellipse.
  double radius() const { return ax_[0]; }
  double axis(int i) const { return ax_[i]; }
  bool rotation_invariant() const { return shape_ != Shape::ellipse; }

  //! Implicit function |D^{-1}x|^2 - 1 (negative inside).
  double level(const Vec& x) const;
  bool contains(const Vec& x, double tol = 1e-10) const { return level(x) <= tol; }
  bool on_boundary(const Vec& x, double tol = 1e-9) const;

  //! Outward unit normal at a boundary point.
  Vec normal(const Vec& x) const;
  //! Radial projection onto the boundary.
  Vec snap(const Vec& x) const;

  //! t_+(x,v) (forward) or t_-(x,v) (backward).
  double exit_time(const Vec& x, const Vec& v, Direction dir = Direction::forward) const;

  // d=2 parametrization t in [0, 2pi): (a cos t, b sin t).
  Vec point_at(double t) const;
  Vec tangent_at(double t) const; // unit, counter-clockwise
  double speed_at(double t) const; // |gamma'(t)|
  double param_of(const Vec& x) const;

  // d=3 spherical angles (polar theta, azimuth phi).
  Vec sphere_point(double theta, double phi) const;

private:
  Shape shape_ = Shape::disk;
  int dim_ = 2;
  double ax_[3] = {1.0, 1.0, 1.0};
  double diameter_ = 2.0;
  double perimeter_ = 2.0 * pi;
  double volume_ = pi;
};

struct BoundaryGrid {
  std::vector<Vec> x;
  std::vector<Vec> n;
  std::vector<double> w;
  std::vector<double> param; // d=2 parameter t_i; d=3 polar angle
  double h = 0.0;            // d=2 parameter spacing
  int n_theta = 0, n_phi = 0;
  std::size_t size() const { return x.size(); }
};

//! d=2: n nodes uniform in the boundary parameter (trapezoid weights).
//! d=3: n polar Gauss nodes times 2n azimuthal nodes.
BoundaryGrid make_boundary_grid(const Domain& dom, int n);

//! Change-of-variables Jacobian J(x,y) between two boundary points.
double jacobian_J(const Domain& dom, const Vec& x, const Vec& y);

//! lim_{y->x} J(x,y): 0 for curves, 1/(4R^2) on a sphere.
double jacobian_diagonal_limit(const Domain& dom);

struct CovResult {
  double lhs;
  double rhs;
};

//! Both sides of int_{S+(x)} g|sigma.n| dsigma = int g((x-y)/|x-y|) J(x,y) dpi(y).
CovResult change_of_variables_check(const Domain& dom, const Vec& x,
                                    const std::function<double(const Vec&)>& g,
                                    int panels = 64);

struct Flatness {
  double alpha;
  double C;
};

//! max over sampled boundary pairs of |(x-y).n(x)| / |x-y|^{1+alpha}, alpha = 1.
Flatness flatness_constant(const Domain& dom, int samples);

} // namespace gapkin
