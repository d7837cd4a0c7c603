#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "fracgs/errors.hpp"
#include "fracgs/groundstate.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {
namespace {

constexpr double kPi = std::numbers::pi;

double lorentz(double x) { return 2.0 / (1.0 + x * x); }
double sech_profile(double x) { return std::sqrt(2.0) / std::cosh(x); }

Field sample_even(const Grid& g, double (*f)(double)) { return Field::sample(g, f, Parity::even); }

double max_dev_on(const Field& q, double (*f)(double), double radius) {
  double m = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double x = q.grid().node(j);
    if (std::abs(x) <= radius) m = std::max(m, std::abs(q[j] - f(x)));
  }
  return m;
}

const GroundStateSolution& half_order_solution() {
  static const GroundStateSolution sol =
      solve_ground_state(ModelParams{0.5, 1.0, 1.0}, Grid(400.0, 1 << 14));
  return sol;
}

TEST(AlphaMaxTest, FormulaAndUnboundedBranch) {
  EXPECT_DOUBLE_EQ(alpha_max(0.25), 2.0);
  EXPECT_NEAR(alpha_max(0.3), 3.0, 1e-14);
  EXPECT_TRUE(std::isinf(alpha_max(0.5)));
  EXPECT_TRUE(std::isinf(alpha_max(1.0)));
  EXPECT_THROW(alpha_max(0.0), ConfigError);
  EXPECT_THROW(alpha_max(1.5), ConfigError);
}

TEST(ModelParamsTest, RejectsSupercriticalExponent) {
  EXPECT_THROW((ModelParams{0.3, 3.0, 1.0}.validate()), ConfigError);
  EXPECT_THROW((ModelParams{0.5, 1.0, 0.0}.validate()), ConfigError);
  EXPECT_NO_THROW((ModelParams{0.3, 2.9, 1.0}.validate()));
}

TEST(WeinsteinTest, HalfOrderClosedForm) {
  // int Q^2 = 2 pi, int Q^3 = 3 pi, |Q|_{H^{1/2}}^2 = pi  =>  J = 2 sqrt(pi) / 3
  const Field q = sample_even(Grid(400.0, 1 << 14), lorentz);
  EXPECT_NEAR(weinstein(q, 0.5, 1.0), 2.0 * std::sqrt(kPi) / 3.0, 1e-3);
}

TEST(WeinsteinTest, SechClosedForm) {
  // int u'^2 = 4/3, int u^2 = 4, int u^4 = 16/3 for u = sqrt2 sech  =>  J = sqrt 3
  const Field u = sample_even(Grid(80.0, 4096), sech_profile);
  EXPECT_NEAR(weinstein(u, 1.0, 2.0), std::sqrt(3.0), 1e-9);
}

TEST(WeinsteinTest, ScaleInvariance) {
  const Grid g(80.0, 4096);
  const Field u = Field::sample(g, [](double x) { return std::exp(-x * x) + 0.3 / (1 + x * x); });
  const double j = weinstein(u, 0.7, 1.5);
  EXPECT_NEAR(weinstein(5.0 * u, 0.7, 1.5) / j, 1.0, 1e-12);
  // u(2x) on the same box: exact up to the tail beyond L/4 and resolution.
  const Field v = Field::sample(g, [](double x) { return std::exp(-4 * x * x) + 0.3 / (1 + 4 * x * x); });
  EXPECT_NEAR(weinstein(v, 0.7, 1.5) / j, 1.0, 1e-3);
  EXPECT_THROW(weinstein(0.0 * u, 0.7, 1.5), ConfigError);
}

TEST(SolverTest, HalfOrderMatchesLorentzian) {
  const auto& sol = half_order_solution();
  EXPECT_TRUE(sol.converged);
  EXPECT_LE(sol.residual, 1e-10);
  EXPECT_LE(max_dev_on(sol.q, lorentz, 10.0) / 2.0, 1e-3);
}

TEST(SolverTest, OrderOneMatchesSech) {
  for (double alpha : {1.0, 2.0, 3.0}) {
    const auto sol = solve_ground_state(ModelParams{1.0, alpha, 1.0}, Grid(80.0, 4096));
    const double sigma = alpha / 2.0;
    double dev = 0.0;
    for (std::size_t j = 0; j < sol.q.size(); ++j) {
      const double x = sol.q.grid().node(j);
      if (std::abs(x) > 10.0) continue;
      const double p = std::pow(sigma + 1.0, 0.5 / sigma) / std::pow(std::cosh(sigma * x), 1.0 / sigma);
      dev = std::max(dev, std::abs(sol.q[j] - p));
    }
    EXPECT_LE(dev, 1e-8) << "alpha=" << alpha;
  }
}

TEST(SolverTest, IndependentOfStartAndResolution) {
  const ModelParams p{0.6, 2.0, 1.0};
  const auto a = solve_ground_state(p, Grid(256.0, 4096));
  const Grid g2(256.0, 8192);
  const Field start = Field::sample(g2, [](double x) { return 3.0 / (1.0 + x * x * x * x); }, Parity::even);
  const auto b = solve_ground_state(p, g2, start);
  // Compare on the coarse nodes (every other fine node).
  double dev = 0.0;
  for (std::size_t j = 0; j < a.q.size(); ++j) dev = std::max(dev, std::abs(a.q[j] - b.q[2 * j]));
  EXPECT_LE(dev / a.q.max_abs(), 1e-6);
}

TEST(SolverTest, RefinementChangesNormBelowTolerance) {
  const ModelParams p{0.7, 1.0, 1.0};
  const auto a = solve_ground_state(p, Grid(256.0, 4096));
  const auto b = solve_ground_state(p, Grid(256.0, 8192));
  const double na = std::sqrt(power_integral(a.q, 2.0)), nb = std::sqrt(power_integral(b.q, 2.0));
  EXPECT_LE(std::abs(na - nb) / na, 1e-8);
}

TEST(SolverTest, IterationCapRaisesWithHistory) {
  SolverOptions opt;
  opt.max_iterations = 3;
  opt.stagnation_window = 1000;
  try {
    solve_ground_state(ModelParams{0.6, 1.0, 1.0}, Grid(128.0, 2048), std::nullopt, opt);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_FALSE(e.history().empty());
  }
}

TEST(SolverTest, ResidualAndEulerLagrangeVanishAtSolution) {
  const auto& sol = half_order_solution();
  EXPECT_LE(fixed_point_residual(sol.q, sol.params), 1e-10);
  // The box breaks the dilation invariance of J, so its gradient at the box
  // solution is of the size of the Pohozaev residuals; it shrinks with L.
  const double box = weinstein_gradient_residual(sol.q, 0.5, 1.0);
  EXPECT_LE(box, 1e-3);
  const auto cert = solve_certified(ModelParams{0.5, 1.0, 1.0});
  const double certified = weinstein_gradient_residual(cert.solution.q, 0.5, 1.0);
  EXPECT_LE(certified, 1e-6);
  EXPECT_LT(certified, box);
}

TEST(PohozaevTest, ExactHalfOrderProfile) {
  // The periodic seminorm of the truncated profile carries an O(L^-2) error.
  const Field q = sample_even(Grid(6400.0, 1 << 18), lorentz);
  const auto r = pohozaev_residuals(q, ModelParams{0.5, 1.0, 1.0});
  EXPECT_LE(r.mass, 1e-6);
  EXPECT_LE(r.seminorm, 1e-6);
}

TEST(PohozaevTest, PerturbationIsDetected) {
  const Grid g(400.0, 1 << 14);
  Field q = sample_even(g, lorentz);
  q += 0.01 * Field::sample(g, [](double x) { return std::exp(-x * x); }, Parity::even);
  const auto r = pohozaev_residuals(q, ModelParams{0.5, 1.0, 1.0});
  EXPECT_GT(r.mass, 1e-3);
  EXPECT_GT(r.seminorm, 1e-3);
}

TEST(PohozaevTest, SechProfile) {
  const Field q = sample_even(Grid(80.0, 4096), sech_profile);
  const auto r = pohozaev_residuals(q, ModelParams{1.0, 2.0, 1.0});
  EXPECT_LE(r.mass, 1e-10);
  EXPECT_LE(r.seminorm, 1e-10);
}

TEST(PohozaevTest, CertifiedSolveReachesTarget) {
  const auto cert = solve_certified(ModelParams{0.5, 1.0, 1.0});
  const auto& r = cert.solution.pohozaev;
  EXPECT_LE(std::max(r.mass, r.seminorm), 5e-6);
  ASSERT_FALSE(cert.trail.empty());
  EXPECT_DOUBLE_EQ(cert.trail.back()[0], cert.solution.q.grid().length());
}

TEST(GnConstantTest, HalfOrderValue) {
  const auto c = gn_constant(0.5, 1.0, Grid(400.0, 1 << 14));
  EXPECT_NEAR(c.value / (1.5 / std::sqrt(kPi)), 1.0, 1e-3);
  EXPECT_LT(c.error_estimate, 1e-3);
}

TEST(GnConstantTest, SechValue) {
  const auto c = gn_constant(1.0, 2.0, Grid(80.0, 4096));
  EXPECT_NEAR(c.value, 1.0 / std::sqrt(3.0), 1e-6);
}

TEST(GnConstantTest, BoundedAcrossOrders) {
  double worst = 0.0;
  std::vector<double> values;
  for (int i = 5; i <= 10; ++i) {
    const double s = i / 10.0;
    const double v = gn_constant(s, 1.0, Grid(256.0, 4096)).value;
    EXPECT_TRUE(std::isfinite(v));
    values.push_back(v);
    worst = std::max(worst, v);
  }
  for (double v : values) EXPECT_LE(v, 1.05 * worst);
}

TEST(DecayTest, LorentzianTail) {
  const auto fit = decay_fit(half_order_solution().q, 0.5);
  EXPECT_TRUE(fit.algebraic);
  EXPECT_NEAR(fit.exponent, 2.0, 0.02);
  EXPECT_NEAR(fit.constant, 2.0, 0.1);
}

TEST(DecayTest, ExponentialBranchAtOrderOne) {
  const auto sol = solve_ground_state(ModelParams{1.0, 2.0, 1.0}, Grid(80.0, 4096));
  EXPECT_FALSE(sol.decay.algebraic);
  EXPECT_TRUE(std::isnan(sol.decay.exponent));
  EXPECT_NEAR(sol.decay.rate, 1.0, 1e-3);
}

TEST(DecayTest, IntermediateOrderExponent) {
  const auto sol = solve_ground_state(ModelParams{0.7, 1.0, 1.0}, Grid(512.0, 8192));
  EXPECT_GE(sol.decay.exponent, 2.2);
  EXPECT_LE(sol.decay.exponent, 2.6);
}

TEST(DecayTest, WrongLawRaises) {
  // A Gaussian tail is far steeper than |x|^{-2}.
  const Field g = Field::sample(Grid(400.0, 1 << 14),
                                [](double x) { return 1.0 / std::pow(1.0 + x * x, 2.5); }, Parity::even);
  EXPECT_THROW(decay_fit(g, 0.5), PropertyError);
}

TEST(ShapeTest, ClosedFormPasses) {
  EXPECT_TRUE(check_symmetry_monotonicity(sample_even(Grid(400.0, 4096), lorentz)).all_passed());
}

TEST(ShapeTest, SwappedNodesFailMonotonicity) {
  const Grid g(400.0, 4096);
  Field q = sample_even(g, lorentz);
  const std::size_t j = g.center() + 5, k = g.size() - j;
  std::swap(q[j], q[j + 1]);
  std::swap(q[k], q[k - 1]);
  const auto ledger = check_symmetry_monotonicity(q);
  const PropertyCheck* mono = ledger.find("monotone_decrease");
  ASSERT_NE(mono, nullptr);
  EXPECT_FALSE(mono->passed);
  EXPECT_TRUE(ledger.find("evenness")->passed);
}

TEST(ShapeTest, SolverOutputPasses) {
  const auto sol = solve_ground_state(ModelParams{0.55, 3.0, 1.0}, Grid(256.0, 8192));
  EXPECT_TRUE(check_symmetry_monotonicity(sol.q).all_passed());
}

TEST(RescaleTest, IdentityAtSameFrequency) {
  const auto& sol = half_order_solution();
  const auto [q, p] = rescale_solution(sol.q, sol.params, 1.0);
  EXPECT_DOUBLE_EQ(p.lambda, 1.0);
  double dev = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) dev = std::max(dev, std::abs(q[j] - sol.q[j]));
  EXPECT_LE(dev, 1e-12);
}

TEST(RescaleTest, MatchesDirectSolve) {
  const auto& sol = half_order_solution();
  const auto [q, p] = rescale_solution(sol.q, sol.params, 4.0);
  const auto direct = solve_ground_state(p, sol.q.grid());
  double dev = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) dev = std::max(dev, std::abs(q[j] - direct.q[j]));
  EXPECT_LE(dev / direct.q.max_abs(), 1e-6);
  EXPECT_LE(fixed_point_residual(q, p), 2.0 * std::max(sol.residual, 1e-10));
}

TEST(RescaleTest, RejectsUnresolvedCompression) {
  const auto sol = solve_ground_state(ModelParams{1.0, 2.0, 1.0}, Grid(40.0, 256));
  EXPECT_THROW(rescale_solution(sol.q, sol.params, 1e4), NumericError);
}

TEST(MinimalityTest, RandomTrialsDoNotBeatGroundState) {
  const auto& sol = half_order_solution();
  const auto check = minimality_spot_check(sol.q, 0.5, 1.0, 100, 42);
  EXPECT_TRUE(check.passed) << check.value;
  const auto cert = solve_certified(ModelParams{0.5, 1.0, 1.0});
  const auto tight = minimality_spot_check(cert.solution.q, 0.5, 1.0, 100, 42, 1e-5);
  EXPECT_TRUE(tight.passed) << tight.value;
}

}  // namespace
}  // namespace fracgs
