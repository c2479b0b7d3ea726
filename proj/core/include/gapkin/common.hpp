#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace gapkin {

// Points and velocities live in R^3; planar problems keep z = 0.
using Vec = Eigen::Vector3d;
using cplx = std::complex<double>;

constexpr double pi = std::numbers::pi;

class DomainError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Raised when internal geometric bookkeeping is inconsistent (a bug trap,
// never a user error).
class GeometryError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

//! |S^{d-1}|
inline double sphere_area(int d) { return d == 2 ? 2.0 * pi : 4.0 * pi; }

//! Integral of |sigma.n| over a hemisphere: 2 in d=2, pi in d=3.
inline double kappa(int d) { return d == 2 ? 2.0 : pi; }

} // namespace gapkin
