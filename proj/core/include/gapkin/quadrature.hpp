#pragma once

#include <functional>
#include <vector>

namespace gapkin {

struct Rule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

//! n-point Gauss-Legendre rule on [a, b].
Rule gauss_legendre(int n, double a = -1.0, double b = 1.0);

//! Composite Gauss-Legendre: `panels` equal panels of `order` points each.
Rule composite_gl(int order, int panels, double a, double b);

//! Periodic trapezoid rule with n points on [a, a + period).
Rule trapezoid_periodic(int n, double a, double period);

double integrate(const Rule& r, const std::function<double(double)>& f);

} // namespace gapkin
