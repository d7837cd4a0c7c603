#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracgs/errors.hpp"
#include "fracgs/kernels.hpp"

namespace fracgs {
namespace {

constexpr double kPi = std::numbers::pi;

double poisson(double t, double x) { return t / (kPi * (t * t + x * x)); }
double gaussian(double t, double x) { return std::exp(-x * x / (4 * t)) / std::sqrt(4 * kPi * t); }

TEST(HeatKernelTest, HalfOrderMatchesPoissonKernel) {
  for (double t : {0.1, 1.0, 10.0}) {
    auto xs = log_spaced(1e-3, 50.0, 40);
    auto table = heat_kernel(0.5, t, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      EXPECT_NEAR(table.values[i], poisson(t, xs[i]), 1e-8) << "t=" << t << " x=" << xs[i];
    }
  }
}

TEST(HeatKernelTest, OrderOneMatchesGaussian) {
  for (double t : {0.1, 1.0, 10.0}) {
    for (double x : {0.0, 0.3, 2.0, 9.0, 30.0}) {
      EXPECT_NEAR(heat_kernel_value(1.0, t, x), gaussian(t, x), 1e-8) << t << " " << x;
    }
  }
}

TEST(HeatKernelTest, OriginValueMatchesGammaFormula) {
  for (double s : {0.3, 0.55, 0.8}) {
    for (double t : {0.5, 2.0}) {
      const double q = heat_kernel_value(s, t, 0.0);
      EXPECT_NEAR(q / heat_kernel_at_origin(s, t), 1.0, 1e-11) << s << " " << t;
    }
  }
  // Gamma(1)/(pi) at s = 1/2, t = 1
  EXPECT_NEAR(heat_kernel_at_origin(0.5, 1.0), 1.0 / kPi, 1e-15);
}

TEST(HeatKernelTest, ScalingLaw) {
  for (double s : {0.35, 0.75}) {
    const double t = 2.5;
    const double c = std::pow(t, -0.5 / s);
    for (double x : {0.2, 1.7, 12.0}) {
      EXPECT_NEAR(heat_kernel_value(s, t, x), c * heat_kernel_value(s, 1.0, c * x), 1e-12);
    }
  }
}

TEST(HeatKernelTest, RejectsInvalidArguments) {
  EXPECT_THROW(heat_kernel_value(0.0, 1.0, 1.0), ConfigError);
  EXPECT_THROW(heat_kernel_value(1.2, 1.0, 1.0), ConfigError);
  EXPECT_THROW(heat_kernel_value(0.5, -1.0, 1.0), ConfigError);
}

TEST(HeatKernelBoundsTest, PoissonMaximumOfXKIsOneOverTwoPi) {
  auto xs = log_spaced(1e-2, 100.0, 201);
  auto table = heat_kernel(0.5, 1.0, xs);
  double worst = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) worst = std::max(worst, xs[i] * table.values[i]);
  EXPECT_NEAR(worst, 1.0 / (2 * kPi), 1e-4);
  EXPECT_TRUE(check_heat_kernel_bounds(table).all_passed());
}

TEST(HeatKernelBoundsTest, AllAssertionsPassAcrossOrders) {
  for (double s : {0.3, 0.5, 0.75, 0.9}) {
    auto table = heat_kernel(s, 1.0, log_spaced(1e-2, 50.0, 64));
    auto ledger = check_heat_kernel_bounds(table);
    EXPECT_TRUE(ledger.all_passed()) << "s=" << s;
    EXPECT_EQ(ledger.checks().size(), 4u);
  }
}

TEST(HeatKernelBoundsTest, InjectedSignFlipIsReported) {
  auto table = heat_kernel(0.75, 1.0, log_spaced(1e-2, 50.0, 32));
  table.values[10] = -table.values[10];
  auto ledger = check_heat_kernel_bounds(table);
  EXPECT_FALSE(ledger.all_passed());
  const PropertyCheck* pos = ledger.find("positivity");
  ASSERT_NE(pos, nullptr);
  EXPECT_FALSE(pos->passed);
  EXPECT_NE(pos->detail.find(std::to_string(table.x[10])), std::string::npos);
}

TEST(HeatKernelMassTest, MassBelowOneAndDefectShrinksWithRange) {
  for (double s : {0.3, 0.6, 0.9}) {
    const double m1 = heat_kernel_mass(s, 1.0, 25.0);
    const double m2 = heat_kernel_mass(s, 1.0, 50.0);
    EXPECT_LT(m1, m2);
    EXPECT_LT(m2, 1.0);
    EXPECT_LT(1.0 - m2, 1.0 - m1);
  }
  // Poisson: (2/pi) atan(X / t)
  EXPECT_NEAR(heat_kernel_mass(0.5, 1.0, 10.0), 2.0 / kPi * std::atan(10.0), 1e-12);
}

TEST(SemigroupTest, PoissonKernelsConvolveToPoisson) {
  EXPECT_LE(semigroup_check(0.5, 1.0, 1.0, Grid(400.0, 4096)), 1e-6);
}

TEST(SemigroupTest, GaussianSemigroup) {
  EXPECT_LE(semigroup_check(1.0, 0.5, 1.5, Grid(400.0, 4096)), 1e-6);
}

TEST(SemigroupTest, GeneralOrderFromQuadrature) {
  EXPECT_LE(semigroup_check(0.6, 0.7, 0.7, Grid(400.0, 4096)), 1e-5);
}

TEST(SemigroupTest, PeriodizedKernelHasUnitGridMass) {
  Grid g(400.0, 4096);
  auto p = periodized_heat_kernel(0.6, 1.0, g);
  double m = 0;
  for (double v : p) m += v * g.spacing();
  EXPECT_NEAR(m, 1.0, 1e-9);
}

TEST(ResolventTest, OrderOneMatchesExponential) {
  for (double x : {0.1, 1.0, 5.0, 15.0}) {
    EXPECT_NEAR(resolvent_laplace(1.0, 1.0, x), 0.5 * std::exp(-x), 1e-8) << x;
    EXPECT_NEAR(resolvent_fourier(1.0, 1.0, x), 0.5 * std::exp(-x), 1e-8) << x;
  }
}

TEST(ResolventTest, RoutesAgreeAndMassIsInverseShift) {
  for (double s : {0.3, 0.5, 0.7, 0.9}) {
    auto table = resolvent_kernel(s, 1.0, log_spaced(0.1, 20.0, 24));
    auto ledger = check_resolvent(table);
    EXPECT_TRUE(ledger.all_passed()) << "s=" << s;
    EXPECT_NEAR(resolvent_mass(s, 1.0), 1.0, 1e-6) << "s=" << s;
  }
  EXPECT_NEAR(resolvent_mass(0.4, 2.5) * 2.5, 1.0, 1e-6);
}

TEST(ResolventTest, SmallDistanceSingularityForLowOrder) {
  // lambda = 1, s < 1/2: G(x) = A x^{2s-1} + B + C x^{4s-1} + O(x^{6s-1}) from
  // expanding 1/(u^{2s}+1) at large u and the finite part at u = 0.
  const double s = 0.3, x = 1e-4;
  const double a = std::tgamma(1 - 2 * s) * std::sin(kPi * s) / kPi;
  const double b = -1.0 / (2 * s * std::sin(kPi * (1 / (2 * s) - 1)));
  const double c = -std::tgamma(1 - 4 * s) * std::cos(0.5 * kPi * (1 - 4 * s)) / kPi;
  const double expansion = a * std::pow(x, 2 * s - 1) + b + c * std::pow(x, 4 * s - 1);
  EXPECT_NEAR(resolvent_fourier(s, 1.0, x) / expansion, 1.0, 1e-3);
  EXPECT_TRUE(std::isinf(resolvent_laplace(s, 1.0, 0.0)));
}

TEST(ResolventTest, WeightedBoundIsUniformOverOrders) {
  double worst = 0;
  for (double s : {0.3, 0.5, 0.7, 0.9}) {
    auto xs = log_spaced(0.1, 40.0, 20);
    for (double x : xs) worst = std::max(worst, x * resolvent_fourier(s, 1.0, x));
  }
  EXPECT_LE(worst, 1.0 / kPi);
}

}  // namespace
}  // namespace fracgs
