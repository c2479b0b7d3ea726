#pragma once

#include "gapkin/common.hpp"
#include "gapkin/geometry.hpp"
#include "gapkin/quadrature.hpp"
#include "gapkin/transport.hpp"
#include "gapkin/velocity.hpp"
#include "gapkin/wall.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace gapkin {

struct SpectralGrid {
  int boundary_nodes = 256; // d=3: total target, rounded to n x 2n
  int speed_nodes = 48;
  int direction_nodes = 16;
  int panel_order = 8;          // Gauss points per boundary interval
  std::size_t dense_cap = 8192; // largest dense matrix side we are willing to build
  double power_tol = 1e-13;
  int power_max_iter = 20000;
  int threads = 1;
};

// Dense kernel operator: (A u)(t) = sum_s A(t, s) w_s u(s).
struct KernelOperator {
  Eigen::MatrixXcd A;
  Eigen::VectorXd source_w;
  Eigen::VectorXd target_w;

  std::size_t size() const { return static_cast<std::size_t>(A.cols()); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
};

//! max_s sum_t |A(t, s)| w_t.
double operator_norm_L1(const KernelOperator& op);

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct PowerResult {
  cplx value{0.0, 0.0};
  Eigen::VectorXcd vector;
  double residual = 0; // ||A v - value v||_1 / ||v||_1 in the weighted norm
  int iterations = 0;
  bool converged = false;
  bool shifted = false; // fell back to the shifted iteration
};

//! Dominant eigenpair. A shifted iteration (A + I) / 2 takes over when the
//! plain iteration stalls on a subdominant eigenvalue close to the leading one.
PowerResult power_iteration(const LinearMap& A, Eigen::VectorXcd start, const Eigen::VectorXd& w,
                            double tol, int max_iter);

// Boundary x speed discretization of isotropic boundary data. In d=2 the
// transfer integral over the source point is product-integrated against hat
// functions in the boundary parameter; in d=3 (ball) it is a Nystrom sum.
class BoundaryDiscretization {
public:
  BoundaryDiscretization(const DiffuseKernel& k, const SpectralGrid& g);

  const DiffuseKernel& kernel() const { return *k_; }
  const Domain& domain() const { return k_->domain(); }
  const BoundaryGrid& grid() const { return grid_; }
  const Rule& speeds() const { return speeds_; }
  //! c_b = rho_b^d varpi(rho_b) omega_b
  const std::vector<double>& c() const { return c_; }
  std::size_t nx() const { return grid_.size(); }
  std::size_t ns() const { return speeds_.size(); }
  //! Disk with x-independent kernel: transfer matrices are circulant.
  bool circulant() const { return circulant_; }
  const SpectralGrid& settings() const { return settings_; }

  //! k(x_i, rho_a, rho_b) (separable kernels ignore b).
  double k(std::size_t i, std::size_t a, std::size_t b) const;

  //! P_ij(lambda, rho) ~ int J(x_i, y) e^{-lambda |x_i - y| / rho} hat_j(y) pi(dy).
  Eigen::MatrixXcd transfer(cplx lambda, double rho) const;
  //! First row of the circulant transfer matrix.
  Eigen::VectorXcd transfer_row0(cplx lambda, double rho) const;
  //! Hat interpolation weights of a boundary point (d=2): two (node, weight) pairs.
  void hat_weights(const Vec& y, std::size_t& j0, double& f0, std::size_t& j1, double& f1) const;

  double min_chord() const { return min_chord_; }

private:
  struct Entry {
    std::uint32_t j;
    double g;
    double dist;
  };
  void add_row(std::size_t i, std::vector<Entry>& row) const;

  std::shared_ptr<const DiffuseKernel> k_;
  SpectralGrid settings_;
  BoundaryGrid grid_;
  Rule speeds_;
  std::vector<double> c_;
  bool circulant_ = false;
  std::vector<std::vector<Entry>> rows_; // one row when circulant
  std::vector<double> kx_;               // k(x_i, rho_a, rho_b), flattened
  double min_chord_ = 0;
};

// W(lambda) = H M_lambda restricted to isotropic boundary data u(x, s).
// Unknowns are ordered (boundary node i, speed node a) -> i * ns + a.
class ReducedOperator {
public:
  ReducedOperator(const BoundaryDiscretization& disc, cplx lambda);

  cplx lambda() const { return lambda_; }
  std::size_t size() const { return disc_->nx() * disc_->ns(); }
  const BoundaryDiscretization& discretization() const { return *disc_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& u) const;
  //! mu-measure weights kappa_d w_i c_a of the unknowns.
  Eigen::VectorXd weights() const;
  //! L1 operator norm, computed column-wise without forming the matrix.
  double norm_L1() const;
  //! Boundary matrix B_ij = sum_b c_b k(x_j, rho_b) P_ij(rho_b); its nonzero
  //! spectrum equals that of W for separable kernels.
  Eigen::MatrixXcd boundary_matrix() const;
  //! Dense form; throws NumericError above the cap.
  KernelOperator dense() const;
  //! Full eigenvalue set relevant to the "1 is an eigenvalue" test.
  std::vector<cplx> eigenvalues() const;
  //! Leading eigenvalue by power iteration.
  PowerResult leading() const;

  //! The x-independent-kernel transfer matrices P(rho_b).
  const std::vector<Eigen::MatrixXcd>& transfer() const { return P_; }

private:
  const BoundaryDiscretization* disc_;
  cplx lambda_;
  std::vector<Eigen::MatrixXcd> P_; // one per speed node
};

// Brute-force M_lambda H on (boundary node, speed node, direction node) for d=2.
// Directions are Gauss nodes for the angle theta in (-pi/2, pi/2) to the outward
// normal; back-traced points are hat-interpolated in the boundary parameter.
class FullGridOperator {
public:
  FullGridOperator(const Wall& wall, const SpectralGrid& g, cplx lambda);

  std::size_t size() const { return nx_ * ns_ * nd_; }
  std::size_t index(std::size_t i, std::size_t a, std::size_t c) const { return (i * ns_ + a) * nd_ + c; }
  bool circulant() const { return circulant_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& phi) const;
  //! mu_+ weights w_i rho_a^d varpi_a omega_a cos(theta_c) omega_c.
  Eigen::VectorXd weights() const;
  KernelOperator dense() const;
  //! All eigenvalues: block-circulant diagonalization on symmetric disks,
  //! dense otherwise (under the cap).
  std::vector<cplx> eigenvalues() const;
  PowerResult leading() const;
  double norm_L1() const;

private:
  struct Target {
    double decay_len; // chord length of the back-traced flight
    std::size_t j0, j1;
    double f0, f1;
    // reflected direction interpolation
    std::size_t c0, c1;
    double g0, g1;
  };
  template <class Fn>
  void row(std::size_t r, Fn&& emit) const;

  const Wall* wall_;
  cplx lambda_;
  std::size_t nx_, ns_, nd_;
  BoundaryGrid grid_;
  Rule speeds_, dirs_;
  std::vector<double> c_, alpha_, beta_;
  std::vector<double> kx_; // k(x_j, rho_a, rho_b)
  std::vector<Target> targets_; // per (i, c)
  bool circulant_ = false;
  int threads_ = 1;
  std::size_t cap_ = 8192;
  double tol_ = 1e-13;
  int max_iter_ = 20000;
};

//! n2(lambda) = sup_{(y,w)} int |J_lambda(x,v,y,w)| dmu_-(x,v).
double decay_bound_n2(const DiffuseKernel& k, cplx lambda, int y_samples = 16);

//! (1/Re lambda) ||W^N (1 - W)^{-1}||_1: the resolvent-series tail from N on.
double resolvent_tail_norm(const ReducedOperator& W, int N);

//! C_N |lambda|^{-[N/2]} / (Re lambda (1 - e^{-D Re lambda / r0})) with C_N = C^{[N/2]}.
double resolvent_tail_bound(double C, int N, cplx lambda, double D, double r0);

// --- spectrum scans ---------------------------------------------------------

struct ScanSettings {
  double re_min = -1.5, re_max = 0.25;
  double im_max = 3.0;
  double step = 0.05;       // complex grid spacing (real scans: point spacing)
  double flag_tol = 0.25;   // local minima of min|mu - 1| below this are polished
  double root_tol = 1e-10;  // |mu - 1| at an accepted root
  bool complex_plane = true;
  bool refine = true;       // recompute roots on doubled grids
};

struct ScanPoint {
  cplx lambda;
  double value; // r(lambda) (real scans) or min |mu - 1|
};

struct Root {
  cplx lambda;
  double residual = 0;
  double refinement_delta = std::numeric_limits<double>::quiet_NaN();
};

struct SpectralScan {
  std::vector<ScanPoint> field;
  std::vector<Root> roots; // Im >= 0; conjugates implied
  std::size_t flagged = 0;
  double gap = std::numeric_limits<double>::infinity();
  double gap_delta = std::numeric_limits<double>::quiet_NaN();
  double strip_re_min = 0; // after any truncation
  std::string note;
  //! Roots counted with their conjugates.
  std::size_t root_count() const;
  bool has_root_at_zero(double tol = 1e-6) const;
};

// Eigenvalue oracle for a given lambda (reduced W for pure diffuse walls,
// full grid otherwise).
using EigenOracle = std::function<std::vector<cplx>(cplx)>;

EigenOracle make_eigen_oracle(const Wall& wall, const SpectralGrid& g);

//! Scan with the wall's natural oracle; partly diffuse walls are restricted
//! to Re lambda > -lambda_beta and refused when not admissible.
SpectralScan scan_spectrum(const Wall& wall, const SpectralGrid& g, const ScanSettings& s);

//! Scan driven by explicit oracles (coarse and refined).
SpectralScan scan_with(const EigenOracle& coarse, const EigenOracle* fine, const ScanSettings& s);

//! Eigenvalue of the oracle closest to 1.
cplx nearest_to_one(const std::vector<cplx>& ev);

// --- invariant density --------------------------------------------------

class InvariantDensity {
public:
  //! Psi_H(x, v) = u(x - t_-(x,v) v, |v|).
  double operator()(const Vec& x, const Vec& v) const;
  //! Normalized emitted boundary density u(y, s).
  double boundary(const Vec& y, double s) const;
  //! u at the grid nodes: rows boundary nodes, columns speed nodes.
  const Eigen::MatrixXd& table() const { return table_; }
  double residual() const { return residual_; }
  const std::string& warning() const { return warning_; }
  //! Total mass before normalization (per unit Perron vector).
  double raw_mass() const { return raw_mass_; }

private:
  friend InvariantDensity invariant_density(const BoundaryDiscretization& disc);
  const BoundaryDiscretization* disc_ = nullptr;
  Eigen::MatrixXd table_;
  Eigen::MatrixXd q_; // q_b at boundary nodes (nx x ns)
  Eigen::VectorXd Q_; // sum_b c_b q_b (separable fast path)
  double residual_ = 0, raw_mass_ = 0;
  std::string warning_;
};

InvariantDensity invariant_density(const BoundaryDiscretization& disc);

//! L(y) = int J(y, x) |x - y| pi(dx).
double chord_moment(const Domain& dom, const Vec& y, int panels = 64);

// --- resolvent series -----------------------------------------------------

//! <g, Xi_lambda H (M_lambda H)^n G_lambda f> for a pure diffuse wall.
cplx resolvent_term(const BoundaryDiscretization& disc, int n, cplx lambda, const Density& f,
                    const Observable& g, int path_order = 16);

//! sup_y int_{|x - y| < eps} |x - y|^{1 + 2 alpha - d} pi(dx).
double truncated_kernel_norm(const Domain& dom, double eps, double alpha = 1.0, int y_samples = 16);

} // namespace gapkin
