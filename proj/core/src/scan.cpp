#include "gapkin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gapkin {

cplx nearest_to_one(const std::vector<cplx>& ev)
{
  if (ev.empty()) throw NumericError("empty eigenvalue set");
  cplx best = ev.front();
  for (const cplx& m : ev)
    if (std::abs(m - 1.0) < std::abs(best - 1.0)) best = m;
  return best;
}

namespace {

// Nonzero spectrum of W(lambda) on the disk with an x-independent separable
// kernel: the boundary matrix is circulant, so its eigenvalues are the DFT of
// one row (one per angular mode m).
std::vector<cplx> circulant_spectrum(const BoundaryDiscretization& disc, cplx lambda)
{
  const std::size_t n = disc.nx();
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
  for (std::size_t s = 0; s < disc.ns(); ++s)
    b += disc.c()[s] * disc.k(0, s, 0) * disc.transfer_row0(lambda, disc.speeds().x[s]);
  std::vector<cplx> ev(n);
  for (std::size_t m = 0; m < n; ++m) {
    cplx s = 0;
    for (std::size_t k = 0; k < n; ++k) s += b[k] * std::polar(1.0, 2.0 * pi * double(m * k % n) / n);
    ev[m] = s;
  }
  return ev;
}

double spectral_radius_value(const std::vector<cplx>& ev)
{
  cplx best = 0;
  for (const cplx& m : ev)
    if (std::abs(m) > std::abs(best)) best = m;
  return best.real();
}

bool polish(const EigenOracle& oracle, cplx l0, double step, double tol, cplx& root, double& res)
{
  auto f = [&](cplx l) { return nearest_to_one(oracle(l)) - 1.0; };
  cplx l1 = l0 + cplx(0.25 * step, 0.25 * step);
  if (l0.imag() == 0.0) l1 = l0 + 0.25 * step;
  cplx f0 = f(l0), f1 = f(l1);
  for (int it = 0; it < 60; ++it) {
    if (std::abs(f1) < tol) {
      root = l1;
      res = std::abs(f1);
      return true;
    }
    cplx df = f1 - f0;
    if (std::abs(df) < 1e-300) break;
    cplx l2 = l1 - f1 * (l1 - l0) / df;
    if (!std::isfinite(l2.real()) || !std::isfinite(l2.imag())) break;
    // keep the iteration local
    if (std::abs(l2 - l1) > 4.0 * step) l2 = l1 + 4.0 * step * (l2 - l1) / std::abs(l2 - l1);
    l0 = l1;
    f0 = f1;
    l1 = l2;
    f1 = f(l1);
  }
  if (std::abs(f1) < tol) {
    root = l1;
    res = std::abs(f1);
    return true;
  }
  return false;
}

} // namespace

EigenOracle make_eigen_oracle(const Wall& wall, const SpectralGrid& g)
{
  EigenOracle raw;
  if (wall.pure_diffuse()) {
    auto disc = std::make_shared<BoundaryDiscretization>(wall.kernel(), g);
    raw = [disc](cplx lambda) {
      if (disc->circulant() && disc->kernel().separable()) return circulant_spectrum(*disc, lambda);
      return ReducedOperator(*disc, lambda).eigenvalues();
    };
  } else {
    const Wall* w = &wall;
    raw = [w, g](cplx lambda) { return FullGridOperator(*w, g, lambda).eigenvalues(); };
  }
  return [raw](cplx lambda) {
    try {
      return raw(lambda);
    } catch (const NumericError& e) {
      std::ostringstream os;
      os << "eigen solve failed at lambda = " << lambda.real() << (lambda.imag() < 0 ? " - " : " + ")
         << std::abs(lambda.imag()) << "i: " << e.what();
      throw NumericError(os.str());
    }
  };
}

std::size_t SpectralScan::root_count() const
{
  std::size_t n = 0;
  for (const Root& r : roots) n += std::abs(r.lambda.imag()) > 1e-8 ? 2 : 1;
  return n;
}

bool SpectralScan::has_root_at_zero(double tol) const
{
  for (const Root& r : roots)
    if (std::abs(r.lambda) < tol) return true;
  return false;
}

SpectralScan scan_with(const EigenOracle& coarse, const EigenOracle* fine, const ScanSettings& s)
{
  if (!(s.step > 0) || !(s.re_max > s.re_min)) throw DomainError("scan: bad lambda window");
  SpectralScan out;
  out.strip_re_min = s.re_min;
  const int nre = static_cast<int>(std::floor((s.re_max - s.re_min) / s.step + 1e-9)) + 1;
  std::vector<cplx> found;
  std::vector<double> resid;

  auto add_root = [&](cplx l, double r) {
    if (l.imag() < 0) l = std::conj(l);
    if (std::abs(l.imag()) < 1e-9) l = l.real();
    if (std::abs(l) < 1e-9) l = 0.0;
    for (const cplx& f : found)
      if (std::abs(f - l) < 1e-6) return;
    found.push_back(l);
    resid.push_back(r);
  };

  if (!s.complex_plane) {
    std::vector<double> re(nre), val(nre);
    for (int k = 0; k < nre; ++k) {
      re[k] = s.re_min + k * s.step;
      val[k] = spectral_radius_value(coarse(re[k]));
      out.field.push_back({re[k], val[k]});
    }
    auto r1 = [&](double l) { return spectral_radius_value(coarse(l)) - 1.0; };
    for (int k = 0; k < nre; ++k) {
      double fk = val[k] - 1.0;
      if (std::abs(fk) < 1e-9) {
        add_root(re[k], std::abs(fk));
        continue;
      }
      if (k + 1 < nre) {
        double fn = val[k + 1] - 1.0;
        if (std::abs(fn) >= 1e-9 && fk * fn < 0) {
          // Illinois false position
          double a = re[k], b = re[k + 1], fa = fk, fb = fn;
          int side = 0;
          for (int it = 0; it < 100; ++it) {
            double c = (a * fb - b * fa) / (fb - fa), fc = r1(c);
            if (std::abs(fc) < s.root_tol || std::abs(b - a) < 1e-14) {
              a = b = c;
              fa = fc;
              break;
            }
            if (fc * fb > 0) {
              b = c;
              fb = fc;
              if (side == -1) fa /= 2;
              side = -1;
            } else {
              a = c;
              fa = fc;
              if (side == 1) fb /= 2;
              side = 1;
            }
          }
          add_root(a, std::abs(fa));
        }
      }
    }
    out.flagged = found.size();
  } else {
    const int nim = static_cast<int>(std::floor(s.im_max / s.step + 1e-9)) + 1;
    std::vector<double> D(static_cast<std::size_t>(nre) * nim);
    auto at = [&](int a, int b) -> double& { return D[static_cast<std::size_t>(a) * nim + b]; };
    for (int a = 0; a < nre; ++a)
      for (int b = 0; b < nim; ++b) {
        cplx l(s.re_min + a * s.step, b * s.step);
        auto ev = coarse(l);
        double dist = std::abs(nearest_to_one(ev) - 1.0);
        at(a, b) = dist;
        out.field.push_back({l, dist});
      }
    for (int a = 0; a < nre; ++a)
      for (int b = 0; b < nim; ++b) {
        double v = at(a, b);
        if (v >= s.flag_tol) continue;
        bool is_min = true;
        for (int da = -1; da <= 1 && is_min; ++da)
          for (int db = -1; db <= 1; ++db) {
            if (!da && !db) continue;
            int aa = a + da, bb = b + db;
            if (bb < 0) bb = -bb; // mirror across the real axis
            if (aa < 0 || aa >= nre || bb >= nim) continue;
            if (at(aa, bb) < v) {
              is_min = false;
              break;
            }
          }
        if (!is_min) continue;
        // a minimum whose root polishes to outside the rectangle (typically an
        // edge cell next to a neighbouring window's root) is not flagged here;
        // one that fails to polish stays flagged as unresolved
        cplx l0(s.re_min + a * s.step, b * s.step), root;
        double r = 0;
        if (polish(coarse, l0, s.step, s.root_tol, root, r)) {
          constexpr double eps = 1e-9;
          bool inside = root.real() >= s.re_min - eps && root.real() <= s.re_max + eps &&
                        std::abs(root.imag()) <= s.im_max + eps;
          if (!inside) continue;
          add_root(root, r);
        }
        ++out.flagged;
      }
  }

  for (std::size_t k = 0; k < found.size(); ++k) {
    Root rt{found[k], resid[k], std::numeric_limits<double>::quiet_NaN()};
    if (s.refine && fine) {
      cplx rf;
      double r = 0;
      if (polish(*fine, found[k], s.step, s.root_tol, rf, r)) {
        if (rf.imag() < 0) rf = std::conj(rf);
        rt.refinement_delta = std::abs(rf - found[k]);
        rt.lambda = rf;
        rt.residual = r;
      } else {
        rt.refinement_delta = std::numeric_limits<double>::infinity();
      }
    }
    out.roots.push_back(rt);
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](const Root& a, const Root& b) { return a.lambda.real() > b.lambda.real(); });
  for (const Root& r : out.roots) {
    if (std::abs(r.lambda) < 1e-6) continue;
    if (-r.lambda.real() < out.gap) {
      out.gap = -r.lambda.real();
      out.gap_delta = r.refinement_delta;
    }
  }
  return out;
}

SpectralScan scan_spectrum(const Wall& wall, const SpectralGrid& g, const ScanSettings& s)
{
  ScanSettings eff = s;
  std::string note;
  if (!wall.pure_diffuse()) {
    const double r0 = wall.kernel().speeds().r0();
    BetaConstants bc = beta_constants(wall, r0);
    if (!bc.admissible) {
      std::ostringstream os;
      os << "partly diffuse wall is not admissible: c_beta = " << bc.c_beta << " >= 1";
      throw DomainError(os.str());
    }
    if (std::isfinite(bc.lambda_beta) && eff.re_min <= -bc.lambda_beta) {
      eff.re_min = -0.9 * bc.lambda_beta;
      std::ostringstream os;
      os << "strip truncated to Re lambda >= " << eff.re_min << " (lambda_beta = " << bc.lambda_beta << ")";
      note = os.str();
    }
  }
  EigenOracle coarse = make_eigen_oracle(wall, g);
  SpectralGrid g2 = g;
  g2.boundary_nodes *= 2;
  if (!wall.pure_diffuse()) {
    g2.direction_nodes *= 2;
    g2.speed_nodes *= 2;
  }
  EigenOracle fine = eff.refine ? make_eigen_oracle(wall, g2) : EigenOracle{};
  SpectralScan out = scan_with(coarse, eff.refine ? &fine : nullptr, eff);
  out.strip_re_min = eff.re_min;
  out.note = note;
  return out;
}

} // namespace gapkin
