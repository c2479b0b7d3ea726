#include <gapkin/wall.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace gapkin;

namespace {

struct WallFixture {
  Domain dom = Domain::disk(1.0);
  SpeedMeasure sm{2, 0.5, 3.0};
};

double speed_integral(const DiffuseKernel& k, const Vec& x, double rin)
{
  // int k |v.n| m(dv) over outgoing velocities = kappa_d int rho^d varpi k
  boost::math::quadrature::tanh_sinh<double> ts;
  const SpeedMeasure& sm = k.speeds();
  int d = sm.dim();
  return kappa(d) * ts.integrate([&](double r) { return std::pow(r, d) * sm.weight(r) * k.eval(x, r, rin); },
                                 sm.r0(), sm.R0());
}

} // namespace

TEST(Kernel, MaxwellGamma)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  boost::math::quadrature::tanh_sinh<double> ts;
  double oracle = ts.integrate([](double r) { return r * r * std::exp(-r * r / 2); }, 0.5, 3.0) / pi;
  EXPECT_NEAR(k.gamma(s.dom.point_at(0.4)), oracle, 1e-12);
  EXPECT_NEAR(oracle, 0.374946, 5e-3); // rough reference value
  EXPECT_DOUBLE_EQ(k.gamma(s.dom.point_at(0.4)), k.gamma(s.dom.point_at(2.9)));
}

TEST(Kernel, MaxwellNormalized)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  for (double t : {0.0, 1.3, 4.0})
    EXPECT_NEAR(speed_integral(k, s.dom.point_at(t), 0.5), 1.0, 1e-10);
}

TEST(Kernel, VariableTemperatureNormalized)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(std::vector<double>{1.0, 2.0, 1.5, 0.8}));
  for (double t : {0.2, 1.9, 3.5, 5.5})
    EXPECT_NEAR(speed_integral(k, s.dom.point_at(t), 1.0), 1.0, 1e-9);
}

TEST(Kernel, UniformClosedForm)
{
  WallFixture s;
  auto k = DiffuseKernel::uniform(s.dom, s.sm);
  double expect = 3.0 / (2.0 * (27.0 - 0.125));
  EXPECT_NEAR(k.eval(s.dom.point_at(1.0), 1.2, 0.7), expect, 1e-12);
  EXPECT_NEAR(k.gamma(s.dom.point_at(1.0)), 2.0 * (27.0 - 0.125) / 3.0, 1e-10);
}

TEST(Kernel, IncomingSpeedIgnoredByPresets)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  Vec x = s.dom.point_at(0.5);
  EXPECT_EQ(k.eval(x, 1.1, 0.6), k.eval(x, 1.1, 2.9));
}

TEST(Kernel, OutsideAnnulusRejected)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  EXPECT_THROW(k.eval(s.dom.point_at(0.0), 3.5, 1.0), DomainError);
}

TEST(Kernel, CustomNormalizedPerIncomingSpeed)
{
  WallFixture s;
  auto k = DiffuseKernel::custom(s.dom, s.sm, [](const Vec&, double r, double rin) {
    return std::exp(-(r - rin) * (r - rin));
  });
  for (double rin : {0.6, 1.5, 2.8}) EXPECT_NEAR(speed_integral(k, s.dom.point_at(0.3), rin), 1.0, 1e-8);
}

TEST(Integrability, MaxwellPasses)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  auto checks = validate_integrability(k);
  ASSERT_EQ(checks.size(), 4u);
  for (const auto& c : checks) {
    EXPECT_TRUE(c.pass) << c.name;
    EXPECT_TRUE(std::isfinite(c.value)) << c.name;
  }
}

TEST(Integrability, SubcriticalGaussianWeightPasses)
{
  Domain dom = Domain::disk(1.0);
  SpeedMeasure sm(2, 0.5, 5.0, WeightProfile::gaussian(0.3));
  auto k = DiffuseKernel::maxwell(dom, sm, BoundaryField(1.0));
  for (const auto& c : validate_integrability(k)) EXPECT_TRUE(c.pass) << c.name;
}

TEST(Integrability, SupercriticalGaussianWeightFails)
{
  Domain dom = Domain::disk(1.0);
  SpeedMeasure sm(2, 0.5, 5.0, WeightProfile::gaussian(0.6));
  auto k = DiffuseKernel::maxwell(dom, sm, BoundaryField(1.0));
  auto checks = validate_integrability(k);
  bool any_fail = std::any_of(checks.begin(), checks.end(), [](const IntegrabilityCheck& c) { return !c.pass; });
  EXPECT_TRUE(any_fail);
}

TEST(Reflection, SpecularExact)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  Wall w(k, BoundaryField(1.0));
  Vec x = s.dom.point_at(0.8), n = s.dom.normal(x);
  Vec vin = Vec(1.3, 0.4, 0.0);
  ASSERT_GT(vin.dot(n), 0.0);
  Rng r(1, 0, 0);
  bool diffuse = true;
  Vec out = w.resample_outgoing(x, vin, r, &diffuse);
  EXPECT_FALSE(diffuse);
  Vec expect = vin - 2 * vin.dot(n) * n;
  EXPECT_NEAR((out - expect).norm(), 0.0, 1e-14);
  EXPECT_NEAR(out.norm(), vin.norm(), 1e-14);
}

TEST(Reflection, BouncebackReverses)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  Wall w(k, BoundaryField(1.0), Reflection::bounceback);
  Vec x = s.dom.point_at(0.8), vin(1.3, 0.4, 0.0);
  Rng r(1, 0, 0);
  EXPECT_NEAR((w.resample_outgoing(x, vin, r) + vin).norm(), 0.0, 1e-15);
}

TEST(Reflection, DiffuseSpeedLawKS)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  Wall w(k);
  Vec x = s.dom.point_at(2.0), n = s.dom.normal(x);
  Vec vin = 1.5 * n;
  std::vector<double> sp;
  for (int i = 0; i < 100000; ++i) {
    Rng r(9, i, 0);
    Vec out = w.resample_outgoing(x, vin, r);
    ASSERT_LT(out.dot(n), 0.0);
    sp.push_back(out.norm());
  }
  // CDF oracle tabulated by adaptive quadrature on a fine grid
  auto h = [](double r) { return r * r * std::exp(-r * r / 2); };
  boost::math::quadrature::tanh_sinh<double> ts;
  const int M = 5000;
  std::vector<double> F(M + 1, 0.0);
  for (int j = 0; j < M; ++j) F[j + 1] = F[j] + ts.integrate(h, 0.5 + 2.5 * j / M, 0.5 + 2.5 * (j + 1) / M);
  for (double& f : F) f /= F[M];
  auto cdf = [&](double r) {
    double u = std::clamp((r - 0.5) / 2.5 * M, 0.0, double(M));
    int j = std::min(int(u), M - 1);
    return F[j] + (u - j) * (F[j + 1] - F[j]);
  };
  std::sort(sp.begin(), sp.end());
  double worst = 0, N = static_cast<double>(sp.size());
  for (std::size_t i = 0; i < sp.size(); ++i) {
    double c = cdf(sp[i]);
    worst = std::max({worst, std::abs(c - i / N), std::abs(c - (i + 1) / N)});
  }
  EXPECT_LT(worst, 0.01);
}

TEST(Reflection, PartlyDiffuseKeepsSpeedOnReflection)
{
  WallFixture s;
  auto k = DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0));
  Wall w(k, BoundaryField(0.5));
  Vec x = s.dom.point_at(1.0), vin = 2.2 * s.dom.normal(x) + Vec(0, 0.1, 0);
  int refl = 0;
  for (int i = 0; i < 20000; ++i) {
    Rng r(2, i, 0);
    bool diffuse = false;
    Vec out = w.resample_outgoing(x, vin, r, &diffuse);
    if (!diffuse) {
      ++refl;
      ASSERT_NEAR(out.norm(), vin.norm(), 1e-13);
    }
  }
  EXPECT_NEAR(refl / 20000.0, 0.5, 0.02);
}

TEST(BetaConstants, PureDiffuse)
{
  WallFixture s;
  Wall w(DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0)));
  auto b = beta_constants(w, 0.5);
  EXPECT_EQ(b.osc, 0.0);
  EXPECT_EQ(b.beta_inf, 1.0);
  EXPECT_EQ(b.c_beta, 0.0);
  EXPECT_TRUE(std::isinf(b.lambda_beta));
  EXPECT_TRUE(b.admissible);
}

TEST(BetaConstants, HalfDiffuse)
{
  WallFixture s;
  Wall w(DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0)), BoundaryField(0.5));
  auto b = beta_constants(w, 0.5);
  EXPECT_NEAR(b.c_beta, 0.75, 1e-12);
  EXPECT_NEAR(b.lambda_beta, -0.125 * std::log(0.75), 1e-12);
  EXPECT_NEAR(b.lambda_beta, 0.0359603, 1e-7);
}

TEST(BetaConstants, OscillatingNotAdmissible)
{
  WallFixture s;
  Wall w(DiffuseKernel::maxwell(s.dom, s.sm, BoundaryField(1.0)),
         BoundaryField(std::vector<double>{0.6, 0.4, 0.6, 0.4, 0.6, 0.4, 0.6, 0.4}));
  auto b = beta_constants(w, 0.5);
  EXPECT_NEAR(b.osc, 0.2, 1e-12);
  EXPECT_NEAR(b.beta_inf, 0.6, 1e-12);
  EXPECT_NEAR(b.c_beta, 1.08, 1e-12);
  EXPECT_FALSE(b.admissible);
}
