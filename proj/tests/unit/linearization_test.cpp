#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fracgs/errors.hpp"
#include "fracgs/linearization.hpp"
#include "fracgs/sector.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {
namespace {

const ModelParams kSech{1.0, 2.0, 1.0};
const ModelParams kHalf{0.5, 1.0, 1.0};

// L = 80 keeps the periodic seam of sech below 1e-17.
Field sech_q() {
  return Field::sample(Grid(80.0, 1024), [](double x) { return std::sqrt(2.0) / std::cosh(x); },
                       Parity::even);
}

Field lorentz_q(double length, std::size_t n) {
  return Field::sample(Grid(length, n), [](double x) { return 2.0 / (1.0 + x * x); }, Parity::even);
}

double correlation(const Field& a, const Field& b) {
  return std::abs(inner(a, b)) / std::sqrt(inner(a, a) * inner(b, b));
}

struct Spectra {
  SectorMatrix even, odd;
  SpectrumReport se, so;
};

Spectra spectra_of(const Field& q, const ModelParams& p, double eps = 1e-6) {
  SectorMatrix me = build_lplus(q, p, Parity::even);
  SectorMatrix mo = build_lplus(q, p, Parity::odd);
  SpectrumReport se = spectrum(me, 3, eps);
  SpectrumReport so = spectrum(mo, 2, eps);
  return {std::move(me), std::move(mo), std::move(se), std::move(so)};
}

TEST(BuildLplusTest, FreeOperatorIsDiagonalSymbol) {
  const Grid g(20.0, 64);
  const Field zero(g, Parity::even);
  const auto m = build_lplus(zero, ModelParams{0.6, 1.0, 2.0}, Parity::even);
  const auto ev = eigenvalues(m.entries);
  std::vector<double> expect;
  for (std::size_t k = 0; k <= 32; ++k) expect.push_back(std::pow(g.abs_frequency(k), 1.2) + 2.0);
  std::sort(expect.begin(), expect.end());
  ASSERT_EQ(ev.size(), expect.size());
  for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], expect[i], 1e-12);
}

TEST(BuildLplusTest, SymmetricAndRejectsOversizedOrOddProfiles) {
  const auto m = build_lplus(sech_q(), kSech, Parity::odd);
  EXPECT_LE(m.entries.symmetry_defect(), 1e-12);
  EXPECT_EQ(m.dimension, 511u);
  EXPECT_THROW(build_lplus(sech_q(), kSech, Parity::even, 100), ConfigError);
  const Field odd = Field::sample(Grid(40.0, 256), [](double x) { return x * std::exp(-x * x); });
  EXPECT_THROW(build_lplus(odd, kSech, Parity::even), ConfigError);
}

TEST(BuildLplusTest, ActionOnSechSquared) {
  // (-d^2 + 1 - 6 sech^2) sech^2 = -3 sech^2
  const Field q = sech_q();
  const auto m = build_lplus(q, kSech, Parity::even);
  const Field phi = Field::sample(q.grid(), [](double x) { return 1.0 / std::pow(std::cosh(x), 2); },
                                  Parity::even);
  const auto c = to_sector(phi, Parity::even);
  const auto mc = m.entries.multiply(c);
  double worst = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(mc[i] + 3.0 * c[i]));
  EXPECT_LE(worst, 1e-8);
  const auto mf = m.apply(c);
  for (std::size_t i = 0; i < c.size(); ++i) EXPECT_NEAR(mf[i], mc[i], 1e-11);
}

TEST(SpectrumTest, PoschlTellerLevels) {
  const Field q = sech_q();
  const auto sp = spectra_of(q, kSech);
  EXPECT_NEAR(sp.se.eigenvalues[0], -3.0, 1e-6);
  EXPECT_NEAR(sp.so.eigenvalues[0], 0.0, 1e-6);
  EXPECT_EQ(sp.se.morse_index, 1u);
  EXPECT_EQ(sp.se.morse_method, "inertia");
  EXPECT_EQ(sp.so.zero_modes.size(), 1u);
  EXPECT_TRUE(sp.se.below_continuum[0]);
  // next even level is the threshold resonance at 1
  EXPECT_NEAR(sp.se.eigenvalues[1], 1.0, 1e-2);
  const Field sech2 = Field::sample(q.grid(), [](double x) { return 1 / std::pow(std::cosh(x), 2); });
  const Field st = Field::sample(q.grid(), [](double x) { return std::tanh(x) / std::cosh(x); });
  EXPECT_GT(correlation(sp.se.eigenfields[0], sech2), 1 - 1e-10);
  EXPECT_GT(correlation(sp.so.eigenfields[0], st), 1 - 1e-10);
  // unit L^2 norm with the grid rule
  EXPECT_NEAR(inner(sp.se.eigenfields[0], sp.se.eigenfields[0]), 1.0, 1e-12);
}

TEST(SpectrumTest, HalfOrderTranslationMode) {
  const Field q = lorentz_q(256.0, 2048);
  const auto so = spectrum(build_lplus(q, kHalf, Parity::odd), 2, 1e-6);
  EXPECT_LE(std::abs(so.eigenvalues[0]), 1e-4);
  EXPECT_GT(correlation(so.eigenfields[0], derivative(q)), 0.999);
  const auto se = spectrum(build_lplus(q, kHalf, Parity::even), 2, 1e-6);
  EXPECT_EQ(se.morse_index, 1u);
}

TEST(SpectrumTest, MatrixFreeAgreesWithDense) {
  const ModelParams p{0.7, 1.0, 1.0};
  const auto sol = solve_ground_state(p, Grid(128.0, 2048));
  for (Parity par : {Parity::even, Parity::odd}) {
    const auto dense = spectrum(build_lplus(sol.q, p, par), 3, 1e-6);
    const auto free = spectrum(build_lplus_matrix_free(sol.q, p, par), 3, 1e-6);
    EXPECT_EQ(free.morse_method, "lobpcg");
    EXPECT_EQ(free.morse_index, dense.morse_index);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(free.eigenvalues[i], dense.eigenvalues[i], 1e-9);
      EXPECT_GT(correlation(free.eigenfields[i], dense.eigenfields[i]), 1 - 1e-8);
    }
  }
}

TEST(SpectrumTest, DeeperPotentialLowersEigenvalues) {
  const Field q = sech_q();
  const auto base = spectrum(build_lplus(q, kSech, Parity::even), 3, 1e-6);
  const auto deep = spectrum(build_lplus(1.1 * q, kSech, Parity::even), 3, 1e-6);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LT(deep.eigenvalues[i], base.eigenvalues[i]);
}

TEST(SpectrumTest, ZeroThresholdFollowsResidual) {
  EXPECT_DOUBLE_EQ(zero_threshold(1e-11), 1e-6);
  EXPECT_DOUBLE_EQ(zero_threshold(1e-8), 1e-5);
}

TEST(KernelTest, SechResidualAndGaps) {
  const Field q = sech_q();
  const auto sp = spectra_of(q, kSech);
  const auto k = kernel_residual(q, kSech, sp.se, sp.so);
  EXPECT_LE(k.residual, 1e-8);
  EXPECT_GT(k.even_gap, 0.1);
  EXPECT_GT(k.odd_gap, 0.1);
  EXPECT_GT(k.odd_correlation, 0.999);
}

TEST(KernelTest, HalfOrderClosedForm) {
  EXPECT_LE(kernel_residual(lorentz_q(1024.0, 1 << 14), kHalf), 1e-4);
}

TEST(KernelTest, PerturbedProfileIsDetected) {
  Field q = sech_q();
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double x = q.grid().node(j);
    q[j] *= 1.0 + 0.05 * std::exp(-x * x);
  }
  EXPECT_GT(kernel_residual(q, kSech), 1e-2);
}

TEST(IdentityTest, SechClosedForms) {
  const auto r = identity_residuals(sech_q(), kSech);
  EXPECT_LE(r.q, 1e-7);
  EXPECT_LE(r.r, 1e-7);
}

TEST(IdentityTest, HalfOrderWindowLimited) {
  const auto r = identity_residuals(lorentz_q(4096.0, 1 << 16), kHalf);
  EXPECT_LE(r.q, 1e-5);
  EXPECT_LE(r.r, 1e-3);
}

TEST(IdentityTest, RefusesZeroProfile) {
  EXPECT_THROW(identity_residuals(Field(Grid(40.0, 256), Parity::even), kSech), ConfigError);
}

TEST(SignChangeTest, ElementaryProfiles) {
  const Grid g(20.0, 1024);
  const auto a = sign_changes(Field::sample(g, [](double x) { return x * std::exp(-x * x); }));
  EXPECT_EQ(a.line, 1u);
  EXPECT_EQ(a.positive, 0u);
  const auto b = sign_changes(Field::sample(g, [](double x) { return (1 - x * x) * std::exp(-x * x); }));
  EXPECT_EQ(b.line, 2u);
  EXPECT_EQ(b.positive, 1u);
}

TEST(SignChangeTest, GrazingNoiseBelowThresholdIgnored) {
  const Grid g(20.0, 1024);
  Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
  for (std::size_t j = 0; j < f.size(); j += 2) f[j] += 1e-9 * ((j / 2) % 2 ? 1 : -1);
  EXPECT_EQ(sign_changes(f).line, 0u);
}

TEST(OscillationTest, SecondEvenEigenfieldOfSech) {
  // The second even sech eigenfield lies in the discretized continuum, but
  // the oscillation count still holds.
  const auto sp = spectra_of(sech_q(), kSech);
  EXPECT_EQ(sp.se.sign_changes[1].positive, 1u);
  EXPECT_EQ(sp.se.sign_changes[1].line, 2u);
}

TEST(PerronTest, SechEigenfieldsHaveFixedSign) {
  const auto sp = spectra_of(sech_q(), kSech);
  const auto ledger = perron_checks(sp.se, sp.so);
  EXPECT_TRUE(ledger.all_passed());
  EXPECT_EQ(ledger.checks().size(), 4u);
}

TEST(CoercivityTest, PositiveOffTranslationAndZeroWithIt) {
  for (const auto& [q, p] : {std::pair{sech_q(), kSech}, std::pair{lorentz_q(256.0, 2048), kHalf}}) {
    const auto sp = spectra_of(q, p);
    const auto c = coercivity_check(sp.even, sp.odd, sp.se, q);
    EXPECT_GT(c.with_translation, 0.05) << p.s;
    EXPECT_LE(std::abs(c.without_translation), 1e-5) << p.s;
  }
}

TEST(SecondOrderTest, SechTrialsNonnegative) {
  const Field q = sech_q();
  const auto m = build_lplus(q, kSech, Parity::even);
  const auto r = second_order_condition(q, kSech, m, 100, 3);
  EXPECT_EQ(r.trials, 100u);
  EXPECT_GE(r.worst_ratio, -1e-6);
  EXPECT_GE(r.constrained_minimum, -1e-6);
  // <Q, L+ Q> = -alpha int Q^{alpha+2}
  const double qq = inner(q, q);
  EXPECT_NEAR(r.unconstrained_q * qq, -2.0 * inner(positive_power(q, 3.0), q), 1e-9 * qq);
}

TEST(SecondOrderTest, IntermediateOrderTrialsNonnegative) {
  const ModelParams p{0.65, 1.5, 1.0};
  const auto sol = solve_ground_state(p, Grid(128.0, 2048));
  const auto m = build_lplus(sol.q, p, Parity::even);
  const auto r = second_order_condition(sol.q, p, m, 100, 11);
  EXPECT_GE(r.worst_ratio, -zero_threshold(sol.residual));
  EXPECT_GE(r.constrained_minimum, -zero_threshold(sol.residual));
  EXPECT_LT(r.unconstrained_q, 0.0);
}

TEST(SpectralGridTest, RefinesWhereAliasingBites) {
  const ModelParams p{0.3, 2.0, 1.0};
  const double h = spectral_spacing(p);
  EXPECT_LT(h, resolved_spacing(p));
  const Grid g = spectral_grid(p);
  EXPECT_GE(g.length(), 16.0);
  EXPECT_GT(sector_dimension(g.size(), Parity::even), kDenseCap);
}

TEST(AnalysisTest, SechLedgerAllPasses) {
  const auto a = analyze_linearization(kSech, Grid(80.0, 1024));
  for (const auto& c : a.ledger.checks()) EXPECT_TRUE(c.passed) << c.name << " " << c.value;
  EXPECT_EQ(a.even.morse_index, 1u);
  EXPECT_NEAR(a.even.eigenvalues[0], -3.0, 1e-6);
}

}  // namespace
}  // namespace fracgs
