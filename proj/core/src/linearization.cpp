#include "fracgs/linearization.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fracgs/errors.hpp"
#include "fracgs/groundstate.hpp"
#include "fracgs/sector.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {

namespace {

double l2(const Field& f) { return std::sqrt(inner(f, f)); }

Field potential(const Field& q, const ModelParams& p) {
  Field v = positive_power(q, p.alpha);
  v *= -(p.alpha + 1.0);
  return v;
}

// Lowest eigenvalue of a on the orthogonal complement of the unit vectors in
// `out`, by shifting their span far above the spectrum.
double constrained_lowest(DenseMatrix a, const std::vector<std::vector<double>>& out) {
  const std::size_t n = a.n;
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
  // Orthonormalize the excluded directions (modified Gram-Schmidt).
  std::vector<std::vector<double>> basis;
  for (auto v : out) {
    for (const auto& b : basis) {
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += b[i] * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= d * b[i];
    }
    double nv = 0.0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
    if (nv == 0.0) continue;
    for (double& x : v) x /= nv;
    basis.push_back(std::move(v));
  }
  // a <- P a P + sigma sum b b^T with P the complementary projector.
  for (const auto& b : basis) {
    std::vector<double> ab = a.multiply(b);
    double bab = 0.0;
    for (std::size_t i = 0; i < n; ++i) bab += b[i] * ab[i];
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t r = 0; r < n; ++r) {
        a(r, c) += -b[r] * ab[c] - ab[r] * b[c] + bab * b[r] * b[c];
      }
    }
  }
  const double sigma = 10.0 * scale + 1.0;
  for (const auto& b : basis) {
    for (std::size_t c = 0; c < n; ++c) {
      for (std::size_t r = 0; r < n; ++r) a(r, c) += sigma * b[r] * b[c];
    }
  }
  return lowest_eigenpairs(a, 1).values.front();
}

std::vector<double> hs_weights(const Grid& g, Parity p, double s) {
  const std::size_t dim = sector_dimension(g.size(), p);
  std::vector<double> w(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double xi = g.abs_frequency(sector_wavenumber(i, p));
    w[i] = 1.0 + (xi == 0.0 ? 0.0 : std::pow(xi, 2.0 * s));
  }
  return w;
}

// B^{-1/2} A B^{-1/2} for diagonal B.
DenseMatrix congruence(const DenseMatrix& a, const std::vector<double>& b) {
  DenseMatrix out = a;
  for (std::size_t c = 0; c < a.n; ++c) {
    for (std::size_t r = 0; r < a.n; ++r) out(r, c) /= std::sqrt(b[r] * b[c]);
  }
  return out;
}

std::vector<double> scaled(std::vector<double> v, const std::vector<double>& b, double power) {
  for (std::size_t i = 0; i < v.size(); ++i) v[i] *= std::pow(b[i], power);
  return v;
}

LobpcgResult run_lobpcg(const LinearMap& op, std::size_t n, const std::vector<double>& precond,
                        const std::vector<std::vector<double>>& constraints,
                        std::span<const double> start, std::size_t count,
                        std::size_t guard = 2, double tol = 1e-9) {
  LobpcgOptions opt;
  opt.count = count;
  opt.guard = guard;
  opt.tol = tol;
  opt.max_iterations = 3000;
  LobpcgResult r = lobpcg(op, n, precond, constraints, start, opt);
  if (!r.converged) {
    throw ConvergenceError("LOBPCG did not converge on the L+ sector", r.residuals);
  }
  return r;
}

// Lowest eigenvalue of W A W (W = diag(b)^{-1/2}, or the identity when b is
// empty) on the complement of `out`.
double sector_constrained_lowest(const SectorMatrix& m, const std::vector<double>& b,
                                 const std::vector<std::vector<double>>& out) {
  if (m.dense()) return constrained_lowest(b.empty() ? m.entries : congruence(m.entries, b), out);
  const std::size_t n = m.dimension;
  std::vector<double> precond(n);
  for (std::size_t i = 0; i < n; ++i) {
    precond[i] = (m.diagonal[i] + m.shift()) / (b.empty() ? 1.0 : b[i]);
  }
  LinearMap op = [&](std::span<const double> x, std::span<double> y) {
    std::vector<double> z(x.begin(), x.end());
    if (!b.empty()) {
      for (std::size_t i = 0; i < n; ++i) z[i] /= std::sqrt(b[i]);
    }
    const std::vector<double> az = m.apply(z);
    for (std::size_t i = 0; i < n; ++i) y[i] = b.empty() ? az[i] : az[i] / std::sqrt(b[i]);
  };
  // The constrained minimum typically sits at the continuum edge; a wider
  // block and a looser residual (the Ritz value error is quadratic in it)
  // keep the iteration short.
  return run_lobpcg(op, n, precond, out, {}, 1, 8, 1e-6).pairs.values.front();
}

}  // namespace

std::vector<double> SectorMatrix::apply(std::span<const double> c) const {
  Field f = from_sector(grid, c, sector);
  for (std::size_t j = 0; j < f.size(); ++j) f[j] *= potential[j];
  std::vector<double> out = to_sector(f, sector);
  for (std::size_t i = 0; i < dimension; ++i) out[i] += diagonal[i] * c[i];
  return out;
}

double SectorMatrix::shift() const {
  double m = 0.0;
  for (double v : potential) m = std::max(m, std::abs(v));
  return m;
}

SectorMatrix build_lplus_matrix_free(const Field& q, const ModelParams& params, Parity sector) {
  params.validate();
  if (sector == Parity::none) throw ConfigError("L+ is assembled per parity sector");
  if (q.parity_defect(Parity::even) > kParityTolerance) {
    throw ConfigError("L+ needs an even profile Q");
  }
  const Grid& g = q.grid();
  const std::size_t dim = sector_dimension(g.size(), sector);
  const Field v = potential(q, params);
  const SymbolSpec diag{params.s, params.lambda, 1.0, false};
  SectorMatrix m{sector, g, params, dim, {}, std::vector<double>(dim),
                 std::vector<double>(v.values().begin(), v.values().end()), {}};
  for (std::size_t i = 0; i < dim; ++i) {
    m.diagonal[i] = symbol_value(diag, g.abs_frequency(sector_wavenumber(i, sector)));
  }
  m.start = to_sector(sector == Parity::even ? q : derivative(q), sector);
  return m;
}

SectorMatrix build_lplus(const Field& q, const ModelParams& params, Parity sector,
                         std::size_t cap) {
  if (sector == Parity::none) throw ConfigError("L+ is assembled per parity sector");
  const std::size_t dim = sector_dimension(q.size(), sector);
  if (dim > cap) {
    std::ostringstream os;
    os << "sector dimension " << dim << " exceeds the dense cap " << cap
       << "; use a grid with at most " << 2 * (cap - 1) << " points";
    throw ConfigError(os.str());
  }
  SectorMatrix m = build_lplus_matrix_free(q, params, sector);
  m.entries = DenseMatrix(dim, multiplication_matrix(Field(m.grid, m.potential), sector));
  for (std::size_t i = 0; i < dim; ++i) m.entries(i, i) += m.diagonal[i];
  return m;
}

SectorMatrix build_lplus_auto(const Field& q, const ModelParams& params, Parity sector) {
  if (sector != Parity::none && sector_dimension(q.size(), sector) > kDenseCap) {
    return build_lplus_matrix_free(q, params, sector);
  }
  return build_lplus(q, params, sector);
}

double zero_threshold(double fixed_point_residual) {
  return std::max(1e-6, 1e3 * fixed_point_residual);
}

SpectrumReport spectrum(const SectorMatrix& m, std::size_t k, double epsilon_zero) {
  if (k == 0) throw ConfigError("spectrum needs k >= 1");
  k = std::min(k, m.dimension);
  SpectrumReport rep;
  rep.sector = m.sector;
  rep.epsilon_zero = epsilon_zero;
  EigenPairs pairs;
  if (m.dense()) {
    pairs = lowest_eigenpairs(m.entries, k);
    rep.morse_index = count_below(m.entries, -epsilon_zero);
    rep.morse_method = "inertia";
  } else {
    // Widen the block until a computed eigenvalue clears -epsilon_zero, so
    // every negative one has been found.
    const std::vector<double> precond = [&] {
      std::vector<double> d = m.diagonal;
      for (double& x : d) x += m.shift();
      return d;
    }();
    LinearMap op = [&](std::span<const double> x, std::span<double> y) {
      const auto ax = m.apply(x);
      std::copy(ax.begin(), ax.end(), y.begin());
    };
    std::size_t want = k;
    while (true) {
      pairs = run_lobpcg(op, m.dimension, precond, {}, m.start, want).pairs;
      if (pairs.values.back() > -epsilon_zero) break;
      if (want >= 64) throw NumericError("more than 64 negative eigenvalues in one sector");
      want *= 2;
    }
    rep.morse_index = static_cast<std::size_t>(
        std::count_if(pairs.values.begin(), pairs.values.end(),
                      [&](double e) { return e < -epsilon_zero; }));
    rep.morse_method = "lobpcg";
    pairs.values.resize(k);
    pairs.vectors.resize(k * m.dimension);
  }
  rep.eigenvalues = pairs.values;
  const double scale = 1.0 / std::sqrt(m.grid.spacing());
  const std::size_t n = m.dimension;
  const std::size_t c = m.grid.center();
  for (std::size_t i = 0; i < k; ++i) {
    std::span<const double> col(pairs.vectors.data() + i * n, n);
    Field f = from_sector(m.grid, col, m.sector);
    f *= scale;
    double orient = 0.0;
    for (std::size_t j = (m.sector == Parity::odd ? c + 1 : 0); j < f.size(); ++j) orient += f[j];
    if (orient < 0.0) f *= -1.0;
    rep.sign_changes.push_back(sign_changes(f));
    rep.eigenfields.push_back(std::move(f));
    const double e = rep.eigenvalues[i];
    if (std::abs(e) <= epsilon_zero) rep.zero_modes.push_back(e);
    rep.below_continuum.push_back(e < m.params.lambda);
  }
  return rep;
}

Field apply_lplus(const Field& q, const ModelParams& params, const Field& f) {
  Field out = apply_symbol(f, SymbolSpec{params.s, params.lambda, 1.0, false});
  const Field v = potential(q, params);
  for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[j] * f[j];
  return out;
}

double kernel_residual(const Field& q, const ModelParams& params) {
  const Field dq = derivative(q);
  return l2(apply_lplus(q, params, dq)) / l2(dq);
}

KernelReport kernel_residual(const Field& q, const ModelParams& params,
                             const SpectrumReport& even, const SpectrumReport& odd) {
  KernelReport rep;
  rep.residual = kernel_residual(q, params);
  rep.even_gap = std::numeric_limits<double>::infinity();
  for (double e : even.eigenvalues) rep.even_gap = std::min(rep.even_gap, std::abs(e));
  std::vector<double> mags;
  for (double e : odd.eigenvalues) mags.push_back(std::abs(e));
  std::sort(mags.begin(), mags.end());
  rep.odd_gap = mags.size() > 1 ? mags[1] : std::numeric_limits<double>::infinity();
  if (!odd.eigenvalues.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < odd.eigenvalues.size(); ++i) {
      if (std::abs(odd.eigenvalues[i]) < std::abs(odd.eigenvalues[best])) best = i;
    }
    rep.odd_nearest = odd.eigenvalues[best];
    const Field dq = derivative(q);
    const Field& psi = odd.eigenfields[best];
    rep.odd_correlation = std::abs(inner(psi, dq)) / (l2(psi) * l2(dq));
  }
  return rep;
}

IdentityResiduals identity_residuals(const Field& q, const ModelParams& params) {
  if (q.max_abs() == 0.0) throw ConfigError("identity residuals are undefined for Q = 0");
  const Grid& g = q.grid();
  const double a = params.alpha, s = params.s, L = g.length();
  IdentityResiduals out;

  Field target = signed_power(q, a + 1.0);
  target *= a;
  Field lq = apply_lplus(q, params, q);
  out.q = l2(lq + target) / l2(target);

  const Field dq = derivative(q);
  Field r = (2.0 * s / a) * q;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = g.node(j);
    const double ax = std::abs(x);
    double chi = 1.0;
    if (ax >= 0.4 * L) {
      chi = 0.0;
    } else if (ax > 0.3 * L) {
      // C^inf step from 1 at 0.3 L to 0 at 0.4 L.
      const double t = (ax - 0.3 * L) / (0.1 * L);
      auto bump = [](double u) { return u <= 0.0 ? 0.0 : std::exp(-1.0 / u); };
      chi = bump(1.0 - t) / (bump(1.0 - t) + bump(t));
    }
    r[j] += chi * x * dq[j];
  }
  Field rhs = (2.0 * s * params.lambda) * q;
  out.r = l2(apply_lplus(q, params, r) + rhs) / l2(rhs);
  return out;
}

SignChanges sign_changes(const Field& psi, double threshold_fraction) {
  const double thr = threshold_fraction * psi.max_abs();
  const std::size_t c = psi.grid().center();
  SignChanges out;
  int last = 0;
  int last_positive = 0;
  for (std::size_t j = 0; j < psi.size(); ++j) {
    if (std::abs(psi[j]) <= thr) continue;
    const int sg = psi[j] > 0.0 ? 1 : -1;
    if (last != 0 && sg != last) ++out.line;
    last = sg;
    if (j > c) {
      if (last_positive != 0 && sg != last_positive) ++out.positive;
      last_positive = sg;
    }
  }
  return out;
}

PropertyLedger perron_checks(const SpectrumReport& even, const SpectrumReport& odd) {
  PropertyLedger ledger;
  if (even.eigenvalues.empty() || odd.eigenvalues.empty()) {
    throw ConfigError("perron checks need both sector spectra");
  }
  const double eps = even.epsilon_zero;
  const double e0 = even.eigenvalues.front();
  const double o0 = odd.eigenvalues.front();
  ledger.holds("ground_state_is_even", e0 < o0 - eps, o0 - e0,
               "lowest eigenvalue of L+ belongs to the even sector");
  const double next_even =
      even.eigenvalues.size() > 1 ? even.eigenvalues[1] : std::numeric_limits<double>::infinity();
  const double gap = std::min(next_even, o0) - e0;
  ledger.holds("ground_state_is_simple", gap > eps, gap, "lowest eigenvalue of L+ is simple");
  const SignChanges g = sign_changes(even.eigenfields.front());
  ledger.holds("ground_eigenfield_fixed_sign", g.line == 0, static_cast<double>(g.line),
               "ground eigenfunction of L+ is positive");
  const SignChanges od = sign_changes(odd.eigenfields.front());
  ledger.holds("odd_eigenfield_fixed_sign_on_half_line", od.positive == 0,
               static_cast<double>(od.positive),
               "lowest odd eigenfunction is positive for x > 0");
  return ledger;
}

CoercivityReport coercivity_check(const SectorMatrix& even, const SectorMatrix& odd,
                                  const SpectrumReport& even_spectrum, const Field& q) {
  const double s = even.params.s;
  const auto be = hs_weights(even.grid, Parity::even, s);
  const auto bo = hs_weights(odd.grid, Parity::odd, s);
  // eta = B^{-1/2} z with eta orthogonal to v  <=>  z orthogonal to B^{-1/2} v.
  const auto phi = to_sector(even_spectrum.eigenfields.front(), Parity::even);
  const auto dq = to_sector(derivative(q), Parity::odd);
  const double even_min = sector_constrained_lowest(even, be, {scaled(phi, be, -0.5)});
  const double odd_with = sector_constrained_lowest(odd, bo, {scaled(dq, bo, -0.5)});
  const double odd_without = sector_constrained_lowest(odd, bo, {});
  return {std::min(even_min, odd_with), std::min(even_min, odd_without)};
}

SecondOrderReport second_order_condition(const Field& q, const ModelParams& params,
                                         const SectorMatrix& even, std::size_t trials,
                                         std::uint64_t seed) {
  SecondOrderReport rep;
  rep.trials = trials;
  const Field v = positive_power(q, params.alpha + 1.0);
  const double vv = inner(v, v);

  double hwhm = 0.0;
  const Grid& g = q.grid();
  const double half = 0.5 * q.max_abs();
  for (std::size_t j = g.center(); j < g.size(); ++j) {
    if (q[j] < half) {
      hwhm = g.node(j);
      break;
    }
  }
  if (hwhm == 0.0) hwhm = g.spacing();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> amp(0.0, 1.0);
  std::uniform_real_distribution<double> centre(0.0, 4.0), width(0.2, 3.0);
  rep.worst_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    std::array<std::array<double, 3>, 4> bumps;
    for (auto& b : bumps) b = {amp(rng), centre(rng) * hwhm, width(rng) * hwhm};
    Field eta = Field::sample(
        g,
        [&](double x) {
          double acc = 0.0;
          for (const auto& b : bumps) {
            const double zp = (x - b[1]) / b[2], zm = (x + b[1]) / b[2];
            acc += b[0] * (std::exp(-zp * zp) + std::exp(-zm * zm));
          }
          return acc;
        },
        Parity::even);
    eta -= (inner(eta, v) / vv) * v;
    const double ratio = inner(eta, apply_lplus(q, params, eta)) / inner(eta, eta);
    rep.worst_ratio = std::min(rep.worst_ratio, ratio);
  }
  rep.constrained_minimum = sector_constrained_lowest(even, {}, {to_sector(v, Parity::even)});
  rep.unconstrained_q = inner(q, apply_lplus(q, params, q)) / inner(q, q);
  return rep;
}

LinearizationAnalysis analyze_linearization(const ModelParams& params, const Grid& grid,
                                            const AnalysisOptions& options) {
  SolverOptions solver;
  solver.certify = false;
  return analyze_linearization(solve_ground_state(params, grid, std::nullopt, solver), options);
}

LinearizationAnalysis analyze_linearization(GroundStateSolution sol, const AnalysisOptions& options) {
  const ModelParams params = sol.params;
  const Field& q = sol.q;
  const double eps = zero_threshold(sol.residual);
  const double lam = params.lambda;
  const SectorMatrix me = build_lplus_auto(q, params, Parity::even);
  const SectorMatrix mo = build_lplus_auto(q, params, Parity::odd);
  SpectrumReport even = spectrum(me, std::max<std::size_t>(options.even_count, 2), eps);
  SpectrumReport odd = spectrum(mo, std::max<std::size_t>(options.odd_count, 1), eps);
  const KernelReport kernel = kernel_residual(q, params, even, odd);

  PropertyLedger ledger;
  ledger.merge(check_symmetry_monotonicity(q), "shape");
  ledger.holds("morse_even", even.morse_index == 1, static_cast<double>(even.morse_index),
               "exactly one negative even eigenvalue");
  const SignChanges first = even.sign_changes.front();
  ledger.holds("first_eigenfield_sign_definite", first.line == 0, static_cast<double>(first.line),
               "ground eigenfunction has no sign change");
  ledger.at_most("odd_zero_mode", std::abs(kernel.odd_nearest), 1e-4 * lam,
                 "odd eigenvalue nearest 0 vanishes (translation mode)");
  ledger.at_least("odd_zero_mode_is_translation", kernel.odd_correlation, 0.999,
                  "odd zero-mode eigenfield is parallel to Q'");
  ledger.at_least("even_gap", kernel.even_gap, 1e-3 * lam,
                  "no even eigenvalue in [-1e-3 lambda, 1e-3 lambda]");
  ledger.at_most("kernel_residual", kernel.residual, 1e-3, "|L+ Q'| / |Q'|");
  const SignChanges second = even.sign_changes[1];
  ledger.holds("second_eigenfield_one_change_on_half_line", second.positive == 1,
               static_cast<double>(second.positive), "second even eigenfunction changes sign once on x > 0");
  ledger.holds("second_eigenfield_two_changes_on_line", second.line == 2,
               static_cast<double>(second.line), "second even eigenfunction changes sign twice");
  ledger.merge(perron_checks(even, odd), "perron");

  CoercivityReport coercivity;
  if (options.coercivity) {
    coercivity = coercivity_check(me, mo, even, q);
    ledger.at_least("coercivity", coercivity.with_translation, std::numeric_limits<double>::min(),
                    "L+ is coercive off span{phi, Q'}");
  }
  SecondOrderReport second_order;
  if (options.trials > 0) {
    second_order = second_order_condition(q, params, me, options.trials, options.seed);
    ledger.at_least("second_order", std::min(second_order.worst_ratio, second_order.constrained_minimum),
                    -eps, "<eta, L+ eta> >= 0 for eta orthogonal to Q^{alpha+1}");
  }
  IdentityResiduals identities = identity_residuals(q, params);
  return {std::move(sol), std::move(even), std::move(odd), kernel, identities, coercivity,
          second_order, std::move(ledger)};
}

double spectral_spacing(const ModelParams& params) {
  const double unit = std::pow(params.lambda, -0.5 / params.s);
  double h = resolved_spacing(params);
  SolverOptions opt;
  opt.certify = false;
  for (int halvings = 0; halvings <= 4; ++halvings, h *= 0.5) {
    const double length = 32.0 * unit;
    const auto n = static_cast<std::size_t>(std::llround(length / h));
    const auto sol = solve_ground_state(params, Grid(length, std::bit_ceil(n)), std::nullopt, opt);
    if (kernel_residual(sol.q, params) <= 1e-5) return h;
  }
  throw NumericError("kernel residual still above 1e-5 at spacing " + std::to_string(2.0 * h));
}

Grid spectral_grid(const ModelParams& params, std::size_t points, double min_length) {
  const double h = spectral_spacing(params);
  const double unit = std::pow(params.lambda, -0.5 / params.s);
  const auto need = static_cast<std::size_t>(std::ceil(min_length * unit / h));
  const std::size_t n = std::bit_ceil(std::max(points, need));
  return Grid(static_cast<double>(n) * h, n);
}

}  // namespace fracgs
