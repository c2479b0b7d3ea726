#include <gapkin/velocity.hpp>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

using namespace gapkin;

namespace {

double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf)
{
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size()), worst = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double F = cdf(xs[i]);
    worst = std::max({worst, std::abs(F - i / n), std::abs(F - (i + 1) / n)});
  }
  return worst;
}

} // namespace

TEST(SpeedMeasure, AnnulusArea)
{
  SpeedMeasure sm(2, 0.5, 1.0);
  double total = sm.polar_integrate([](const Vec&) { return 1.0; });
  EXPECT_NEAR(total, pi * 0.75, 1e-12);
}

TEST(SpeedMeasure, SecondMoment)
{
  SpeedMeasure sm(2, 0.5, 1.0);
  boost::math::quadrature::tanh_sinh<double> ts;
  double oracle = 2 * pi * ts.integrate([](double r) { return r * r * r; }, 0.5, 1.0);
  double v = sm.polar_integrate([](const Vec& u) { return u.squaredNorm(); });
  EXPECT_NEAR(v, oracle, 1e-12);
  EXPECT_NEAR(v, pi / 2 * (1 - 0.0625), 1e-12);
}

TEST(SpeedMeasure, OddIntegrandVanishes)
{
  SpeedMeasure sm(2, 0.5, 1.0);
  EXPECT_NEAR(sm.polar_integrate([](const Vec& u) { return u[0]; }), 0.0, 1e-14);
  SpeedMeasure s3(3, 0.5, 1.0, WeightProfile::power(0), 32, 64);
  EXPECT_NEAR(s3.polar_integrate([](const Vec& u) { return u[1] * u.squaredNorm(); }), 0.0, 1e-13);
}

TEST(SpeedMeasure, WeightedBall)
{
  SpeedMeasure sm(3, 0.5, 3.0, WeightProfile::power(1.5));
  boost::math::quadrature::tanh_sinh<double> ts;
  double oracle = 4 * pi * ts.integrate([](double r) { return r * r * std::pow(r, 1.5) * std::exp(-r); }, 0.5, 3.0);
  double v = sm.polar_integrate([](const Vec& u) { return std::exp(-u.norm()); });
  EXPECT_NEAR(v, oracle, 1e-10);
}

TEST(SpeedSampler, IndicatorMean)
{
  SpeedSampler s(0.5, 1.0, [](double) { return 1.0; });
  double m = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    Rng r(3, i, 0);
    m += s.sample(r);
  }
  EXPECT_NEAR(m / n, 0.75, 3e-3);
}

TEST(SpeedSampler, LinearMean)
{
  SpeedSampler s(0.5, 1.0, [](double r) { return r; });
  double m = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    Rng r(4, i, 0);
    m += s.sample(r);
  }
  EXPECT_NEAR(m / n, (7.0 / 24.0) / (3.0 / 8.0), 3e-3);
}

TEST(SpeedSampler, WallMaxwellianKS)
{
  auto h = [](double r) { return r * r * std::exp(-r * r / 2); };
  SpeedSampler s(0.5, 3.0, h);
  boost::math::quadrature::tanh_sinh<double> ts;
  double Z = ts.integrate(h, 0.5, 3.0);
  auto cdf = [&](double x) { return x <= 0.5 ? 0.0 : ts.integrate(h, 0.5, x) / Z; };
  std::vector<double> xs;
  for (int i = 0; i < 100000; ++i) {
    Rng r(5, i, 1);
    xs.push_back(s.sample(r));
  }
  EXPECT_LT(ks_statistic(xs, cdf), 0.01);
}

TEST(CosineDirection, Disk)
{
  Vec n(0.6, 0.8, 0.0);
  double m = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    Rng r(6, i, 0);
    Vec s = sample_cosine_direction(n, 2, r);
    ASSERT_GT(s.dot(n), 0.0);
    ASSERT_NEAR(s.norm(), 1.0, 1e-12);
    ASSERT_EQ(s[2], 0.0);
    m += s.dot(n);
  }
  EXPECT_NEAR(m / N, pi / 4, 3e-3);
}

TEST(CosineDirection, Ball)
{
  Vec n = Vec(1, -2, 2).normalized();
  double m = 0;
  const int N = 200000;
  for (int i = 0; i < N; ++i) {
    Rng r(7, i, 0);
    Vec s = sample_cosine_direction(n, 3, r);
    ASSERT_GT(s.dot(n), 0.0);
    ASSERT_NEAR(s.norm(), 1.0, 1e-12);
    m += s.dot(n);
  }
  EXPECT_NEAR(m / N, 2.0 / 3.0, 3e-3);
}

TEST(WeightProfile, StretchedDerivative)
{
  WeightProfile w = WeightProfile::stretched(0.3, 1.5);
  double r = 1.7, h = 1e-6;
  EXPECT_NEAR(w.derivative(r), (w(r + h) - w(r - h)) / (2 * h), 1e-7);
}
