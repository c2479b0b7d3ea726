#include "gapkin/spectral.hpp"

#include "gapkin/parallel.hpp"

#include <Eigen/Eigenvalues>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace gapkin {

namespace {

inline cplx decay(cplx lambda, double len, double rho)
{
  double a = -lambda.real() * len / rho, b = -lambda.imag() * len / rho;
  double m = std::exp(a);
  return {m * std::cos(b), m * std::sin(b)};
}

void frame(const Vec& n, Vec& e1, Vec& e2)
{
  e1 = std::abs(n[0]) < 0.9 ? Vec(1, 0, 0) : Vec(0, 1, 0);
  e1 = (e1 - e1.dot(n) * n).normalized();
  e2 = n.cross(e1);
}

double weighted_l1(const Eigen::VectorXcd& v, const Eigen::VectorXd& w)
{
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += w[i] * std::abs(v[i]);
  return s;
}

// Rotate so the largest component is real and positive.
void fix_phase(Eigen::VectorXcd& v)
{
  Eigen::Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  if (std::abs(v[k]) > 0) v *= std::conj(v[k]) / std::abs(v[k]);
}

std::vector<cplx> dense_eigenvalues(const Eigen::MatrixXcd& M)
{
  // zgeev is several times faster than Eigen's complex Schur at these sizes
  Eigen::MatrixXcd A = M;
  const lapack_int n = static_cast<lapack_int>(A.rows());
  std::vector<cplx> ev(static_cast<std::size_t>(n));
  if (n == 0) return ev;
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, A.data(), n, ev.data(), nullptr, 1, nullptr, 1);
  if (info != 0) throw NumericError("eigen-solver did not converge (zgeev info " + std::to_string(info) + ")");
  return ev;
}

std::vector<Vec> sample_boundary_points(const Domain& dom, int n)
{
  std::vector<Vec> pts;
  if (dom.dim() == 2) {
    for (int i = 0; i < n; ++i) pts.push_back(dom.point_at(2.0 * pi * i / n));
  } else {
    const double ga = pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
      double z = 1.0 - 2.0 * (i + 0.5) / n;
      pts.push_back(dom.sphere_point(std::acos(z), ga * i));
    }
  }
  return pts;
}

} // namespace

// --- dense operators --------------------------------------------------------

Eigen::VectorXcd KernelOperator::apply(const Eigen::VectorXcd& u) const
{
  return A * (source_w.cast<cplx>().asDiagonal() * u);
}

double operator_norm_L1(const KernelOperator& op)
{
  double best = 0.0;
  for (Eigen::Index s = 0; s < op.A.cols(); ++s) {
    double col = 0.0;
    for (Eigen::Index t = 0; t < op.A.rows(); ++t) col += std::abs(op.A(t, s)) * op.target_w[t];
    best = std::max(best, col);
  }
  return best;
}

PowerResult power_iteration(const LinearMap& A, Eigen::VectorXcd v, const Eigen::VectorXd& w,
                            double tol, int max_iter)
{
  PowerResult res;
  auto run = [&](const LinearMap& op, int iters) {
    double nv = weighted_l1(v, w);
    if (!(nv > 0)) throw NumericError("power iteration: zero start vector");
    v /= nv;
    for (int it = 0; it < iters; ++it) {
      Eigen::VectorXcd y = op(v);
      cplx num = 0, den = 0;
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        num += w[i] * std::conj(v[i]) * y[i];
        den += w[i] * std::norm(v[i]);
      }
      cplx val = num / den;
      double r = weighted_l1(y - val * v, w);
      ++res.iterations;
      res.value = val;
      res.residual = r;
      double ny = weighted_l1(y, w);
      if (!(ny > 0)) {
        res.value = 0;
        return true;
      }
      if (r < tol * std::max(1e-300, std::abs(val))) {
        v = y / ny;
        return true;
      }
      v = y / ny;
    }
    return false;
  };
  res.converged = run(A, std::max(1, max_iter / 2));
  if (!res.converged) {
    LinearMap shifted = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd { return 0.5 * (A(x) + x); };
    res.shifted = true;
    res.converged = run(shifted, std::max(1, max_iter - max_iter / 2));
    res.value = 2.0 * res.value - 1.0;
    Eigen::VectorXcd y = A(v);
    res.residual = weighted_l1(y - res.value * v, w);
  }
  fix_phase(v);
  res.vector = v;
  return res;
}

// --- boundary discretization --------------------------------------------

BoundaryDiscretization::BoundaryDiscretization(const DiffuseKernel& k, const SpectralGrid& g)
  : k_(std::make_shared<DiffuseKernel>(k)), settings_(g)
{
  const Domain& dom = k_->domain();
  const SpeedMeasure& sm = k_->speeds();
  const int d = dom.dim();
  if (g.speed_nodes < 1 || g.panel_order < 1) throw DomainError("spectral grid: empty speed or panel rule");
  if (d == 2)
    grid_ = make_boundary_grid(dom, g.boundary_nodes);
  else
    grid_ = make_boundary_grid(dom, std::max(3, static_cast<int>(std::lround(std::sqrt(g.boundary_nodes / 2.0)))));
  speeds_ = gauss_legendre(g.speed_nodes, sm.r0(), sm.R0());
  for (std::size_t b = 0; b < speeds_.size(); ++b)
    c_.push_back(std::pow(speeds_.x[b], d) * sm.weight(speeds_.x[b]) * speeds_.w[b]);
  circulant_ = d == 2 && dom.shape() == Shape::disk && k_->x_independent();

  const std::size_t n = nx(), m = ns();
  const std::size_t nb = k_->separable() ? 1 : m;
  kx_.resize(n * m * nb);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < nb; ++b)
        kx_[(i * m + a) * nb + b] = k_->eval(grid_.x[i], speeds_.x[a], speeds_.x[k_->separable() ? 0 : b]);

  rows_.resize(circulant_ ? 1 : n);
  parallel_for(rows_.size(), g.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) add_row(i, rows_[i]);
  });

  // Column renormalization: the discrete operator at lambda = 0 must carry the
  // source mass exactly (the hat rule is only second order in the target).
  std::vector<double> col(n, 0.0);
  if (circulant_) {
    double s = 0.0;
    for (const Entry& en : rows_[0]) s += en.g;
    for (auto& c : col) c = s * grid_.w[0];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (const Entry& en : rows_[i]) col[en.j] += grid_.w[i] * en.g;
  }
  const double kap = kappa(d);
  for (auto& row : rows_)
    for (Entry& en : row) en.g *= kap * grid_.w[en.j] / col[en.j];

  min_chord_ = std::numeric_limits<double>::infinity();
  for (const auto& row : rows_)
    for (const Entry& en : row)
      if (en.dist > 0) min_chord_ = std::min(min_chord_, en.dist);
}

void BoundaryDiscretization::add_row(std::size_t i, std::vector<Entry>& row) const
{
  const Domain& dom = k_->domain();
  const std::size_t n = nx();
  const Vec& x = grid_.x[i];
  if (dom.dim() == 3) {
    for (std::size_t j = 0; j < n; ++j) {
      double jac = j == i ? jacobian_diagonal_limit(dom) : jacobian_J(dom, x, grid_.x[j]);
      row.push_back({static_cast<std::uint32_t>(j), jac * grid_.w[j], (x - grid_.x[j]).norm()});
    }
    return;
  }
  Rule q = gauss_legendre(settings_.panel_order, 0.0, 1.0);
  const double h = grid_.h;
  row.reserve(2 * n * q.size());
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t p = 0; p < q.size(); ++p) {
      double t = (m + q.x[p]) * h;
      Vec y = dom.point_at(t);
      double jac = jacobian_J(dom, x, y);
      double g = jac * dom.speed_at(t) * h * q.w[p];
      double dist = (x - y).norm();
      row.push_back({static_cast<std::uint32_t>(m), g * (1.0 - q.x[p]), dist});
      row.push_back({static_cast<std::uint32_t>((m + 1) % n), g * q.x[p], dist});
    }
  }
}

double BoundaryDiscretization::k(std::size_t i, std::size_t a, std::size_t b) const
{
  const std::size_t m = ns();
  return k_->separable() ? kx_[i * m + a] : kx_[(i * m + a) * m + b];
}

Eigen::VectorXcd BoundaryDiscretization::transfer_row0(cplx lambda, double rho) const
{
  Eigen::VectorXcd r = Eigen::VectorXcd::Zero(nx());
  for (const Entry& en : rows_[0]) r[en.j] += en.g * decay(lambda, en.dist, rho);
  return r;
}

Eigen::MatrixXcd BoundaryDiscretization::transfer(cplx lambda, double rho) const
{
  const std::size_t n = nx();
  Eigen::MatrixXcd P(n, n);
  if (circulant_) {
    Eigen::VectorXcd r = transfer_row0(lambda, rho);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) P(i, j) = r[(j + n - i) % n];
    return P;
  }
  P.setZero();
  parallel_for(n, settings_.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (const Entry& en : rows_[i]) P(i, en.j) += en.g * decay(lambda, en.dist, rho);
  });
  return P;
}

void BoundaryDiscretization::hat_weights(const Vec& y, std::size_t& j0, double& f0, std::size_t& j1,
                                         double& f1) const
{
  const std::size_t n = nx();
  double u = domain().param_of(y) / grid_.h;
  double fl = std::floor(u);
  j0 = static_cast<std::size_t>(fl) % n;
  j1 = (j0 + 1) % n;
  f1 = u - fl;
  f0 = 1.0 - f1;
}

// --- W(lambda) ----------------------------------------------------------

ReducedOperator::ReducedOperator(const BoundaryDiscretization& disc, cplx lambda)
  : disc_(&disc), lambda_(lambda)
{
  for (std::size_t b = 0; b < disc.ns(); ++b) P_.push_back(disc.transfer(lambda, disc.speeds().x[b]));
}

Eigen::VectorXcd ReducedOperator::apply(const Eigen::VectorXcd& u) const
{
  const std::size_t n = disc_->nx(), m = disc_->ns();
  if (static_cast<std::size_t>(u.size()) != n * m) throw DomainError("W: vector size mismatch");
  Eigen::MatrixXcd Y(n, m);
  for (std::size_t b = 0; b < m; ++b) {
    Eigen::VectorXcd ub(n);
    for (std::size_t j = 0; j < n; ++j) ub[j] = u[j * m + b];
    Y.col(b) = P_[b] * ub;
  }
  const auto& c = disc_->c();
  Eigen::VectorXcd v(n * m);
  const bool sep = disc_->kernel().separable();
  for (std::size_t i = 0; i < n; ++i) {
    cplx ysum = 0;
    if (sep)
      for (std::size_t b = 0; b < m; ++b) ysum += c[b] * Y(i, b);
    for (std::size_t a = 0; a < m; ++a) {
      if (sep) {
        v[i * m + a] = disc_->k(i, a, 0) * ysum;
      } else {
        cplx s = 0;
        for (std::size_t b = 0; b < m; ++b) s += c[b] * disc_->k(i, a, b) * Y(i, b);
        v[i * m + a] = s;
      }
    }
  }
  return v;
}

Eigen::VectorXd ReducedOperator::weights() const
{
  const std::size_t n = disc_->nx(), m = disc_->ns();
  const double kap = kappa(disc_->domain().dim());
  Eigen::VectorXd w(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < m; ++a) w[i * m + a] = kap * disc_->grid().w[i] * disc_->c()[a];
  return w;
}

double ReducedOperator::norm_L1() const
{
  const std::size_t n = disc_->nx(), m = disc_->ns();
  const auto& w = disc_->grid().w;
  const auto& c = disc_->c();
  double best = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    std::vector<double> S(n, 0.0); // sum_a c_a k(i, a, b)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < m; ++a) S[i] += c[a] * disc_->k(i, a, b);
    for (std::size_t j = 0; j < n; ++j) {
      double col = 0.0;
      for (std::size_t i = 0; i < n; ++i) col += w[i] * std::abs(P_[b](i, j)) * S[i];
      best = std::max(best, col / w[j]);
    }
  }
  return best;
}

Eigen::MatrixXcd ReducedOperator::boundary_matrix() const
{
  if (!disc_->kernel().separable()) throw DomainError("boundary matrix needs a separable kernel");
  const std::size_t n = disc_->nx(), m = disc_->ns();
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t b = 0; b < m; ++b)
    for (std::size_t j = 0; j < n; ++j) B.col(j) += disc_->c()[b] * disc_->k(j, b, 0) * P_[b].col(j);
  return B;
}

KernelOperator ReducedOperator::dense() const
{
  const std::size_t N = size();
  if (N > disc_->settings().dense_cap) {
    std::ostringstream os;
    os << "W: dense form with " << N << " unknowns exceeds the cap " << disc_->settings().dense_cap;
    throw NumericError(os.str());
  }
  const std::size_t n = disc_->nx(), m = disc_->ns();
  const double kap = kappa(disc_->domain().dim());
  KernelOperator op;
  op.source_w = weights();
  op.target_w = op.source_w;
  op.A.resize(N, N);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t b = 0; b < m; ++b)
          op.A(i * m + a, j * m + b) = disc_->k(i, a, b) * P_[b](i, j) / (kap * disc_->grid().w[j]);
  return op;
}

std::vector<cplx> ReducedOperator::eigenvalues() const
{
  if (disc_->kernel().separable()) return dense_eigenvalues(boundary_matrix());
  KernelOperator op = dense();
  return dense_eigenvalues(op.A * op.source_w.cast<cplx>().asDiagonal());
}

PowerResult ReducedOperator::leading() const
{
  const auto& s = disc_->settings();
  return power_iteration([this](const Eigen::VectorXcd& u) { return apply(u); },
                         Eigen::VectorXcd::Ones(size()), weights(), s.power_tol, s.power_max_iter);
}

// --- full grid ------------------------------------------------------------

FullGridOperator::FullGridOperator(const Wall& wall, const SpectralGrid& g, cplx lambda)
  : wall_(&wall), lambda_(lambda), threads_(g.threads), cap_(g.dense_cap), tol_(g.power_tol),
    max_iter_(g.power_max_iter)
{
  const DiffuseKernel& k = wall.kernel();
  const Domain& dom = k.domain();
  const SpeedMeasure& sm = k.speeds();
  if (dom.dim() != 2) throw DomainError("full-grid operator is implemented for d=2");
  grid_ = make_boundary_grid(dom, g.boundary_nodes);
  speeds_ = gauss_legendre(g.speed_nodes, sm.r0(), sm.R0());
  dirs_ = gauss_legendre(g.direction_nodes, -pi / 2, pi / 2);
  nx_ = grid_.size();
  ns_ = speeds_.size();
  nd_ = dirs_.size();
  for (std::size_t b = 0; b < ns_; ++b)
    c_.push_back(std::pow(speeds_.x[b], 2) * sm.weight(speeds_.x[b]) * speeds_.w[b]);
  for (std::size_t j = 0; j < nx_; ++j) {
    alpha_.push_back(wall.alpha_at(grid_.x[j]));
    beta_.push_back(1.0 - alpha_.back());
  }
  kx_.resize(nx_ * ns_ * ns_);
  for (std::size_t j = 0; j < nx_; ++j)
    for (std::size_t a = 0; a < ns_; ++a)
      for (std::size_t b = 0; b < ns_; ++b)
        kx_[(j * ns_ + a) * ns_ + b] = k.eval(grid_.x[j], speeds_.x[a], speeds_.x[b]);
  circulant_ = dom.shape() == Shape::disk && k.x_independent() && wall.alpha().constant();

  const double h = grid_.h;
  const std::size_t n_rows = circulant_ ? 1 : nx_;
  targets_.resize(nx_ * nd_);
  for (std::size_t i = 0; i < n_rows; ++i) {
    const Vec& x = grid_.x[i];
    Vec nrm = grid_.n[i];
    Vec tan = dom.tangent_at(grid_.param[i]);
    for (std::size_t c = 0; c < nd_; ++c) {
      Target& T = targets_[i * nd_ + c];
      Vec v = std::cos(dirs_.x[c]) * nrm + std::sin(dirs_.x[c]) * tan;
      T.decay_len = dom.exit_time(x, v, Direction::backward);
      Vec y = dom.snap(x - T.decay_len * v);
      double u = dom.param_of(y) / h, fl = std::floor(u);
      T.j0 = static_cast<std::size_t>(fl) % nx_;
      T.j1 = (T.j0 + 1) % nx_;
      T.f1 = u - fl;
      T.f0 = 1.0 - T.f1;
      // incoming direction at y that the reflection maps onto v
      Vec ny = dom.normal(y);
      Vec vin = wall.reflection() == Reflection::specular ? Vec(v - 2.0 * v.dot(ny) * ny) : Vec(-v);
      Vec ty = dom.tangent_at(dom.param_of(y));
      double th = std::atan2(vin.dot(ty), vin.dot(ny));
      auto it = std::upper_bound(dirs_.x.begin(), dirs_.x.end(), th);
      if (it == dirs_.x.begin()) {
        T.c0 = T.c1 = 0;
        T.g0 = 1.0;
        T.g1 = 0.0;
      } else if (it == dirs_.x.end()) {
        T.c0 = T.c1 = nd_ - 1;
        T.g0 = 1.0;
        T.g1 = 0.0;
      } else {
        T.c1 = static_cast<std::size_t>(it - dirs_.x.begin());
        T.c0 = T.c1 - 1;
        T.g1 = (th - dirs_.x[T.c0]) / (dirs_.x[T.c1] - dirs_.x[T.c0]);
        T.g0 = 1.0 - T.g1;
      }
    }
  }
  if (circulant_) {
    // rotate the node-0 targets to every node
    for (std::size_t i = 1; i < nx_; ++i)
      for (std::size_t c = 0; c < nd_; ++c) {
        Target T = targets_[c];
        T.j0 = (T.j0 + i) % nx_;
        T.j1 = (T.j1 + i) % nx_;
        targets_[i * nd_ + c] = T;
      }
  }
}

template <class Fn>
void FullGridOperator::row(std::size_t r, Fn&& emit) const
{
  const std::size_t c = r % nd_, a = (r / nd_) % ns_, i = r / (nd_ * ns_);
  const Target& T = targets_[i * nd_ + c];
  const cplx e = decay(lambda_, T.decay_len, speeds_.x[a]);
  const std::size_t js[2] = {T.j0, T.j1};
  const double fs[2] = {T.f0, T.f1};
  for (int q = 0; q < 2; ++q) {
    if (fs[q] == 0.0) continue;
    const std::size_t j = js[q];
    if (beta_[j] != 0.0) {
      cplx coef = e * fs[q] * beta_[j];
      for (std::size_t b = 0; b < ns_; ++b) {
        cplx cb = coef * kx_[(j * ns_ + a) * ns_ + b] * c_[b];
        for (std::size_t cc = 0; cc < nd_; ++cc)
          emit(index(j, b, cc), cb * (std::cos(dirs_.x[cc]) * dirs_.w[cc]));
      }
    }
    if (alpha_[j] != 0.0) {
      cplx coef = e * fs[q] * alpha_[j];
      if (T.g0 != 0.0) emit(index(j, a, T.c0), coef * T.g0);
      if (T.g1 != 0.0) emit(index(j, a, T.c1), coef * T.g1);
    }
  }
}

Eigen::VectorXcd FullGridOperator::apply(const Eigen::VectorXcd& phi) const
{
  Eigen::VectorXcd out(size());
  parallel_for(size(), threads_, [&](std::size_t b, std::size_t e) {
    for (std::size_t r = b; r < e; ++r) {
      cplx s = 0;
      row(r, [&](std::size_t col, cplx v) { s += v * phi[col]; });
      out[r] = s;
    }
  });
  return out;
}

Eigen::VectorXd FullGridOperator::weights() const
{
  Eigen::VectorXd w(size());
  for (std::size_t i = 0; i < nx_; ++i)
    for (std::size_t a = 0; a < ns_; ++a)
      for (std::size_t c = 0; c < nd_; ++c)
        w[index(i, a, c)] = grid_.w[i] * c_[a] * std::cos(dirs_.x[c]) * dirs_.w[c];
  return w;
}

KernelOperator FullGridOperator::dense() const
{
  const std::size_t N = size();
  if (N > cap_) {
    std::ostringstream os;
    os << "full grid: " << N << " unknowns exceed the node cap " << cap_;
    throw NumericError(os.str());
  }
  KernelOperator op;
  op.source_w = weights();
  op.target_w = op.source_w;
  op.A = Eigen::MatrixXcd::Zero(N, N);
  for (std::size_t r = 0; r < N; ++r)
    row(r, [&](std::size_t col, cplx v) { op.A(r, col) += v / op.source_w[col]; });
  return op;
}

std::vector<cplx> FullGridOperator::eigenvalues() const
{
  if (!circulant_) {
    KernelOperator op = dense();
    return dense_eigenvalues(op.A * op.source_w.cast<cplx>().asDiagonal());
  }
  const std::size_t bs = ns_ * nd_;
  std::map<std::size_t, Eigen::MatrixXcd> blocks;
  for (std::size_t r = 0; r < bs; ++r)
    row(r, [&](std::size_t col, cplx v) {
      std::size_t j = col / bs;
      auto it = blocks.find(j);
      if (it == blocks.end()) it = blocks.emplace(j, Eigen::MatrixXcd::Zero(bs, bs)).first;
      it->second(r, col % bs) += v;
    });
  std::vector<cplx> all(nx_ * bs);
  parallel_for(nx_, threads_, [&](std::size_t b, std::size_t e) {
    for (std::size_t m = b; m < e; ++m) {
      Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(bs, bs);
      for (const auto& [j, C] : blocks) M += std::polar(1.0, 2.0 * pi * double(m * j % nx_) / nx_) * C;
      auto ev = dense_eigenvalues(M);
      std::copy(ev.begin(), ev.end(), all.begin() + m * bs);
    }
  });
  return all;
}

PowerResult FullGridOperator::leading() const
{
  return power_iteration([this](const Eigen::VectorXcd& u) { return apply(u); },
                         Eigen::VectorXcd::Ones(size()), weights(), tol_, max_iter_);
}

double FullGridOperator::norm_L1() const
{
  Eigen::VectorXd w = weights();
  std::vector<double> col(size(), 0.0);
  for (std::size_t r = 0; r < size(); ++r) row(r, [&](std::size_t c, cplx v) { col[c] += std::abs(v) * w[r]; });
  double best = 0.0;
  for (std::size_t c = 0; c < size(); ++c) best = std::max(best, col[c] / w[c]);
  return best;
}

// --- decay bound --------------------------------------------------------

double decay_bound_n2(const DiffuseKernel& k, cplx lambda, int y_samples)
{
  if (lambda == cplx(0, 0)) throw DomainError("n2: lambda = 0 is excluded");
  if (!k.separable()) throw DomainError("n2: implemented for speed-separable kernels");
  const Domain& dom = k.domain();
  const SpeedMeasure& sm = k.speeds();
  const int d = dom.dim();
  const double eta = std::abs(lambda.imag()), D = dom.diameter();
  const double r0 = sm.r0(), R0 = sm.R0();

  // u = 1/rho; panels resolve the oscillation e^{-i eta |x-y| u}
  const int upan = 10 + static_cast<int>(eta * D * (1.0 / r0 - 1.0 / R0) / pi);
  Rule ur = composite_gl(8, upan, 1.0 / R0, 1.0 / r0);

  const bool symmetric = dom.rotation_invariant() && k.x_independent();
  std::vector<Vec> ys = sample_boundary_points(dom, symmetric ? 1 : y_samples);

  double best = 0.0;
  for (const Vec& y : ys) {
    std::vector<double> amp(ur.size());
    for (std::size_t q = 0; q < ur.size(); ++q) {
      double rho = 1.0 / ur.x[q];
      amp[q] = ur.w[q] * std::pow(rho, d + 2) * sm.weight(rho) * k.eval(y, rho, r0);
    }
    auto Phi = [&](double len) {
      cplx s = 0;
      for (std::size_t q = 0; q < ur.size(); ++q) s += amp[q] * decay(lambda, len, 1.0 / ur.x[q]);
      return std::abs(s);
    };
    double total = 0.0;
    if (d == 2) {
      const double per = dom.boundary_measure();
      const int xpan = 40 + static_cast<int>(2.0 * eta * per / (pi * r0));
      double t0 = dom.param_of(y);
      Rule xr = composite_gl(8, xpan, t0, t0 + 2.0 * pi);
      for (std::size_t p = 0; p < xr.size(); ++p) {
        Vec x = dom.point_at(xr.x[p]);
        double len = (x - y).norm();
        if (len < 1e-14) continue;
        total += xr.w[p] * dom.speed_at(xr.x[p]) * jacobian_J(dom, x, y) * Phi(len);
      }
    } else {
      const double R = dom.radius();
      const int xpan = 20 + static_cast<int>(2.0 * eta * D / (pi * r0));
      Rule pr = composite_gl(8, xpan, 0.0, pi);
      for (std::size_t p = 0; p < pr.size(); ++p) {
        double len = 2.0 * R * std::sin(pr.x[p] / 2.0);
        total += pr.w[p] * 2.0 * pi * R * R * std::sin(pr.x[p]) / (4.0 * R * R) * Phi(len);
      }
    }
    best = std::max(best, total);
  }
  return best;
}

double resolvent_tail_norm(const ReducedOperator& W, int N)
{
  const cplx lambda = W.lambda();
  if (!(lambda.real() > 0)) throw DomainError("resolvent tail: needs Re lambda > 0");
  KernelOperator op = W.dense();
  const Eigen::Index n = op.A.rows();
  Eigen::MatrixXcd M = op.A * op.source_w.cast<cplx>().asDiagonal();
  Eigen::MatrixXcd MN = Eigen::MatrixXcd::Identity(n, n);
  for (int k = 0; k < N; ++k) MN = MN * M;
  Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd T = (I - M).transpose().partialPivLu().solve(MN.transpose()).transpose();
  double best = 0.0;
  for (Eigen::Index s = 0; s < n; ++s) {
    double col = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) col += std::abs(T(t, s)) * op.target_w[t];
    best = std::max(best, col / op.source_w[s]);
  }
  return best / lambda.real();
}

double resolvent_tail_bound(double C, int N, cplx lambda, double D, double r0)
{
  const int h = N / 2;
  const double re = lambda.real();
  return std::pow(C, h) * std::pow(std::abs(lambda), -h) / (re * (1.0 - std::exp(-D * re / r0)));
}

// --- invariant density ----------------------------------------------------

double chord_moment(const Domain& dom, const Vec& y, int panels)
{
  if (dom.dim() == 2) {
    double t0 = dom.param_of(y), s = 0.0;
    Rule r = composite_gl(16, panels, t0, t0 + 2.0 * pi);
    for (std::size_t p = 0; p < r.size(); ++p) {
      Vec x = dom.point_at(r.x[p]);
      double len = (x - y).norm();
      if (len < 1e-14) continue;
      s += r.w[p] * dom.speed_at(r.x[p]) * jacobian_J(dom, y, x) * len;
    }
    return s;
  }
  const double R = dom.radius();
  Rule r = composite_gl(16, panels / 4 + 1, 0.0, pi);
  double s = 0.0;
  for (std::size_t p = 0; p < r.size(); ++p)
    s += r.w[p] * 2.0 * pi * R * R * std::sin(r.x[p]) / (4.0 * R * R) * 2.0 * R * std::sin(r.x[p] / 2.0);
  return s;
}

InvariantDensity invariant_density(const BoundaryDiscretization& disc)
{
  InvariantDensity inv;
  inv.disc_ = &disc;
  const std::size_t n = disc.nx(), m = disc.ns();
  const int d = disc.domain().dim();
  ReducedOperator W0(disc, 0.0);
  PowerResult pr = W0.leading();
  Eigen::VectorXd u = pr.vector.real();
  Eigen::VectorXd w = W0.weights();
  Eigen::VectorXcd Wu = W0.apply(u.cast<cplx>());
  double nu = 0.0, nr = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    nu += w[i] * std::abs(u[i]);
    nr += w[i] * std::abs(Wu[i] - u[i]);
  }
  inv.residual_ = nr / nu;
  if (!pr.converged || inv.residual_ > 1e-10 || std::abs(pr.value - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "power iteration on W(0) stagnated (eigenvalue " << pr.value.real() << ", residual "
       << inv.residual_ << "); the wall may be reducible";
    inv.warning_ = os.str();
  }

  // q_b = P(0) u_b at the nodes
  const Eigen::MatrixXcd& P = W0.transfer()[0];
  inv.q_.resize(n, m);
  for (std::size_t b = 0; b < m; ++b) {
    Eigen::VectorXd ub(n);
    for (std::size_t j = 0; j < n; ++j) ub[j] = u[j * m + b];
    inv.q_.col(b) = (P * ub.cast<cplx>()).real();
  }

  double mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double L = chord_moment(disc.domain(), disc.grid().x[i]);
    double s = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      double rho = disc.speeds().x[a];
      s += std::pow(rho, d - 1) * disc.kernel().speeds().weight(rho) * disc.speeds().w[a] * u[i * m + a];
    }
    mass += disc.grid().w[i] * L * s;
  }
  if (!(mass > 0)) throw NumericError("invariant density: nonpositive mass");
  inv.raw_mass_ = mass;
  inv.table_.resize(n, m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t a = 0; a < m; ++a) inv.table_(i, a) = u[i * m + a] / mass;
  inv.q_ /= mass;
  inv.Q_ = Eigen::VectorXd::Zero(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t b = 0; b < m; ++b) inv.Q_[i] += disc.c()[b] * inv.q_(i, b);
  return inv;
}

double InvariantDensity::boundary(const Vec& y, double s) const
{
  const DiffuseKernel& k = disc_->kernel();
  const SpeedMeasure& sm = k.speeds();
  if (s < sm.r0() || s > sm.R0()) return 0.0;
  std::size_t j0 = 0, j1 = 0;
  double f0 = 1.0, f1 = 0.0;
  if (disc_->domain().dim() == 2) disc_->hat_weights(y, j0, f0, j1, f1);
  if (k.separable()) return k.eval(y, s, sm.r0()) * (f0 * Q_[j0] + f1 * Q_[j1]);
  double v = 0.0;
  for (std::size_t b = 0; b < disc_->ns(); ++b)
    v += disc_->c()[b] * k.eval(y, s, disc_->speeds().x[b]) * (f0 * q_(j0, b) + f1 * q_(j1, b));
  return v;
}

double InvariantDensity::operator()(const Vec& x, const Vec& v) const
{
  const double s = v.norm();
  const SpeedMeasure& sm = disc_->kernel().speeds();
  if (s < sm.r0() || s > sm.R0()) return 0.0;
  const Domain& dom = disc_->domain();
  double t = dom.exit_time(x, v, Direction::backward);
  return boundary(dom.snap(x - t * v), s);
}

// --- resolvent series ------------------------------------------------------

cplx resolvent_term(const BoundaryDiscretization& disc, int n, cplx lambda, const Density& f,
                    const Observable& g, int path_order)
{
  if (!(lambda.real() > 0)) throw DomainError("resolvent_term: needs Re lambda > 0");
  if (n < 0) throw DomainError("resolvent_term: n must be >= 0");
  const Domain& dom = disc.domain();
  const int d = dom.dim();
  const std::size_t nx = disc.nx(), ns = disc.ns();
  const int nd = disc.settings().direction_nodes;
  const Rule& sp = disc.speeds();
  const auto& c = disc.c();

  // hemisphere directions in the local frame (normal component, tangential parts)
  struct Dir {
    double cn, t1, t2, w; // w includes |cos|
  };
  std::vector<Dir> dirs;
  if (d == 2) {
    Rule th = gauss_legendre(nd, -pi / 2, pi / 2);
    for (std::size_t c2 = 0; c2 < th.size(); ++c2)
      dirs.push_back({std::cos(th.x[c2]), std::sin(th.x[c2]), 0.0, std::cos(th.x[c2]) * th.w[c2]});
  } else {
    Rule mu = gauss_legendre(nd, 0.0, 1.0);
    Rule ph = trapezoid_periodic(2 * nd, 0.0, 2.0 * pi);
    for (std::size_t a = 0; a < mu.size(); ++a)
      for (std::size_t b = 0; b < ph.size(); ++b) {
        double st = std::sqrt(1.0 - mu.x[a] * mu.x[a]);
        dirs.push_back({mu.x[a], st * std::cos(ph.x[b]), st * std::sin(ph.x[b]), mu.x[a] * mu.w[a] * ph.w[b]});
      }
  }
  Rule path = composite_gl(path_order, 2, 0.0, 1.0);
  auto tangents = [&](std::size_t i, Vec& e1, Vec& e2) {
    if (d == 2) {
      e1 = dom.tangent_at(disc.grid().param[i]);
      e2 = Vec::Zero();
    } else {
      frame(disc.grid().n[i], e1, e2);
    }
  };

  // (H G_lambda f)(x_i, s_a)
  Eigen::VectorXcd h0(nx * ns);
  parallel_for(nx, disc.settings().threads, [&](std::size_t bgn, std::size_t end) {
    for (std::size_t i = bgn; i < end; ++i) {
      const Vec& x = disc.grid().x[i];
      const Vec& nrm = disc.grid().n[i];
      Vec e1, e2;
      tangents(i, e1, e2);
      std::vector<cplx> F(ns, 0.0);
      for (std::size_t b = 0; b < ns; ++b)
        for (const Dir& dr : dirs) {
          Vec w = sp.x[b] * (dr.cn * nrm + dr.t1 * e1 + dr.t2 * e2);
          double tau = dom.exit_time(x, w, Direction::backward);
          cplx s = 0;
          for (std::size_t q = 0; q < path.size(); ++q) {
            double t = path.x[q] * tau;
            s += path.w[q] * tau * f(x - t * w, w) * std::exp(-lambda * t);
          }
          F[b] += dr.w * s;
        }
      for (std::size_t a = 0; a < ns; ++a) {
        cplx s = 0;
        for (std::size_t b = 0; b < ns; ++b) s += c[b] * disc.k(i, a, b) * F[b];
        h0[i * ns + a] = s;
      }
    }
  });

  Eigen::VectorXcd u = h0;
  if (n > 0) {
    ReducedOperator W(disc, lambda);
    for (int k = 0; k < n; ++k) u = W.apply(u);
  }

  std::vector<cplx> part(nx, 0.0);
  parallel_for(nx, disc.settings().threads, [&](std::size_t bgn, std::size_t end) {
    for (std::size_t i = bgn; i < end; ++i) {
      const Vec& x = disc.grid().x[i];
      const Vec& nrm = disc.grid().n[i];
      Vec e1, e2;
      tangents(i, e1, e2);
      cplx acc = 0;
      for (std::size_t a = 0; a < ns; ++a) {
        cplx inner = 0;
        for (const Dir& dr : dirs) {
          Vec v = sp.x[a] * (-dr.cn * nrm + dr.t1 * e1 + dr.t2 * e2);
          double tau = dom.exit_time(x, v, Direction::forward);
          cplx s = 0;
          for (std::size_t q = 0; q < path.size(); ++q) {
            double t = path.x[q] * tau;
            s += path.w[q] * tau * g(x + t * v, v) * std::exp(-lambda * t);
          }
          inner += dr.w * s;
        }
        acc += c[a] * u[i * ns + a] * inner;
      }
      part[i] = disc.grid().w[i] * acc;
    }
  });
  cplx total = 0;
  for (const cplx& p : part) total += p;
  return total;
}

// --- truncated kernel -----------------------------------------------------

double truncated_kernel_norm(const Domain& dom, double eps, double alpha, int y_samples)
{
  if (!(eps > 0)) throw DomainError("truncated kernel: eps must be positive");
  const int d = dom.dim();
  const double p = 1.0 + 2.0 * alpha - d;
  if (d == 3) {
    const double R = dom.radius();
    double top = eps >= 2.0 * R ? pi : 2.0 * std::asin(eps / (2.0 * R));
    Rule r = composite_gl(16, 16, 0.0, top);
    double s = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k)
      s += r.w[k] * 2.0 * pi * R * R * std::sin(r.x[k]) * std::pow(2.0 * R * std::sin(r.x[k] / 2.0), p);
    return s;
  }
  const int ny = dom.rotation_invariant() ? 1 : y_samples;
  double best = 0.0;
  for (int iy = 0; iy < ny; ++iy) {
    const double ty = 2.0 * pi * iy / ny;
    const Vec y = dom.point_at(ty);
    auto dist = [&](double t) { return (dom.point_at(t) - y).norm(); };
    // first parameter offset (each way) where the chord reaches eps
    auto reach = [&](double sgn) {
      const int scan = 2048;
      double prev = 0.0;
      for (int k = 1; k <= scan / 2; ++k) {
        double s = pi * k / (scan / 2);
        if (dist(ty + sgn * s) >= eps) {
          double lo = prev, hi = s;
          for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (dist(ty + sgn * mid) >= eps ? hi : lo) = mid;
          }
          return 0.5 * (lo + hi);
        }
        prev = s;
      }
      return pi;
    };
    double s = 0.0;
    for (double sgn : {1.0, -1.0}) {
      Rule r = composite_gl(16, 16, 0.0, reach(sgn));
      for (std::size_t k = 0; k < r.size(); ++k) {
        double t = ty + sgn * r.x[k];
        s += r.w[k] * dom.speed_at(t) * std::pow(dist(t), p);
      }
    }
    best = std::max(best, s);
  }
  return best;
}

} // namespace gapkin
