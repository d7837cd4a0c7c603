#include "fracgs/groundstate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <random>
#include <sstream>

#include "fft.hpp"
#include "fracgs/dense.hpp"
#include "fracgs/errors.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {

namespace {

constexpr double kPositivityFloor = 1e-13;
constexpr double kMonotoneTolerance = 1e-12;

Field resolvent(const Field& f, const ModelParams& p) {
  return apply_symbol(f, SymbolSpec{p.s, p.lambda, -1.0, false});
}

double l2(const Field& f) { return std::sqrt(inner(f, f)); }

Field default_start(const Grid& grid) {
  return Field::sample(grid, [](double x) { return std::exp(-x * x); }, Parity::even);
}

std::string describe(const ModelParams& p) {
  std::ostringstream os;
  os << "(s=" << p.s << ", alpha=" << p.alpha << ", lambda=" << p.lambda << ")";
  return os.str();
}

// Steepest descent on log J with backtracking; restores Petviashvili progress
// when the fixed-point map stalls.
std::size_t descend_weinstein(Field& u, const ModelParams& p, std::size_t steps) {
  std::size_t taken = 0;
  double step = 0.1;
  for (std::size_t it = 0; it < steps; ++it) {
    const double j0 = weinstein(u, p.s, p.alpha);
    const double h2 = hs_seminorm_sq(u, p.s);
    const double m2 = inner(u, u);
    const double pw = power_integral(u, p.alpha + 2.0);
    const double e1 = p.alpha / (4.0 * p.s);
    const double e2 = p.alpha * (2.0 * p.s - 1.0) / (4.0 * p.s) + 1.0;
    Field grad = (2.0 * e1 / h2) * apply_symbol(u, SymbolSpec{p.s, 0.0, 1.0, false});
    grad += (2.0 * e2 / m2) * u;
    grad -= ((p.alpha + 2.0) / pw) * signed_power(u, p.alpha + 1.0);
    const double gn = l2(grad);
    if (!(gn > 0.0)) break;
    const double scale = l2(u) / gn;
    bool accepted = false;
    for (int k = 0; k < 30; ++k) {
      Field trial = u - (step * scale) * grad;
      for (double& v : trial.values()) v = std::max(v, 0.0);
      trial.symmetrize(Parity::even);
      if (trial.max_abs() > 0.0 && weinstein(trial, p.s, p.alpha) < j0) {
        u = std::move(trial);
        accepted = true;
        step = std::min(1.0, step * 1.5);
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    ++taken;
  }
  return taken;
}

// Anderson acceleration of x -> g(x) over the last `depth` differences.
class AndersonMixer {
 public:
  explicit AndersonMixer(std::size_t depth) : depth_(depth) {}

  void clear() {
    df_.clear();
    dg_.clear();
    has_prev_ = false;
  }

  Field mix(const Field& x, Field g) {
    if (depth_ == 0) return g;
    Field f = g - x;
    if (has_prev_) {
      df_.push_back(f - *prev_f_);
      dg_.push_back(g - *prev_g_);
      if (df_.size() > depth_) {
        df_.erase(df_.begin());
        dg_.erase(dg_.begin());
      }
    }
    prev_f_ = f;
    prev_g_ = g;
    has_prev_ = true;
    const std::size_t m = df_.size();
    if (m == 0) return g;
    DenseMatrix gram(m);
    std::vector<double> rhs(m);
    double diag = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        gram(i, j) = gram(j, i) = inner(df_[i], df_[j]);
      }
      rhs[i] = inner(df_[i], f);
      diag = std::max(diag, gram(i, i));
    }
    for (std::size_t i = 0; i < m; ++i) gram(i, i) += 1e-12 * diag;
    std::vector<double> coef;
    try {
      coef = LuFactor(gram).solve(rhs);
    } catch (const NumericError&) {
      clear();
      return g;
    }
    Field out = std::move(g);
    for (std::size_t i = 0; i < m; ++i) out -= coef[i] * dg_[i];
    out.symmetrize(Parity::even);
    return out;
  }

 private:
  std::size_t depth_;
  std::vector<Field> df_, dg_;
  std::optional<Field> prev_f_, prev_g_;
  bool has_prev_ = false;
};

}  // namespace

void ModelParams::validate() const {
  const double amax = alpha_max(s);
  std::ostringstream os;
  if (!(alpha > 0.0 && alpha < amax)) {
    os << "alpha must lie in (0, alpha_max(s)) = (0, " << amax << "), got " << alpha;
    throw ConfigError(os.str());
  }
  if (!(lambda > 0.0)) {
    os << "lambda must be positive, got " << lambda;
    throw ConfigError(os.str());
  }
}

double alpha_max(double s) {
  if (!(s > 0.0 && s <= 1.0)) {
    std::ostringstream os;
    os << "order s must lie in (0, 1], got " << s;
    throw ConfigError(os.str());
  }
  if (s < 0.5) return 4.0 * s / (1.0 - 2.0 * s);
  return std::numeric_limits<double>::infinity();
}

double power_integral(const Field& u, double p) {
  double acc = 0.0;
  for (double v : u.values()) acc += std::pow(std::abs(v), p);
  return acc * u.grid().spacing();
}

double weinstein(const Field& u, double s, double alpha) {
  if (u.max_abs() == 0.0) throw ConfigError("weinstein functional of the zero field");
  const double h2 = hs_seminorm_sq(u, s);
  const double m2 = inner(u, u);
  const double pw = power_integral(u, alpha + 2.0);
  const double e1 = alpha / (4.0 * s);
  const double e2 = alpha * (2.0 * s - 1.0) / (4.0 * s) + 1.0;
  return std::exp(e1 * std::log(h2) + e2 * std::log(m2) - std::log(pw));
}

double weinstein_gradient_residual(const Field& q, double s, double alpha) {
  const double h2 = hs_seminorm_sq(q, s);
  const double m2 = inner(q, q);
  const double pw = power_integral(q, alpha + 2.0);
  const double e1 = alpha / (4.0 * s);
  const double e2 = alpha * (2.0 * s - 1.0) / (4.0 * s) + 1.0;
  Field nonlinear = ((alpha + 2.0) / pw) * signed_power(q, alpha + 1.0);
  Field grad = (2.0 * e1 / h2) * apply_symbol(q, SymbolSpec{s, 0.0, 1.0, false});
  grad += (2.0 * e2 / m2) * q;
  grad -= nonlinear;
  return l2(grad) / l2(nonlinear);
}

double fixed_point_residual(const Field& q, const ModelParams& params) {
  Field r = q - resolvent(positive_power(q, params.alpha + 1.0), params);
  return l2(r) / l2(q);
}

Field recentre(const Field& f) {
  const std::size_t n = f.size();
  std::size_t arg = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (f[j] > f[arg]) arg = j;
  }
  const std::size_t c = f.grid().center();
  if (arg == c) return f;
  Field out(f.grid(), f.parity());
  for (std::size_t j = 0; j < n; ++j) out[(j + c + n - arg) % n] = f[j];
  return out;
}

GroundStateSolution solve_ground_state(const ModelParams& params, const Grid& grid,
                                       std::optional<Field> init, const SolverOptions& options) {
  params.validate();
  Field q = init ? std::move(*init) : default_start(grid);
  if (!(q.grid() == grid)) throw ConfigError("initial field lives on a different grid");
  for (double& v : q.values()) v = std::max(v, 0.0);
  q = recentre(q);
  q.symmetrize(Parity::even);
  if (q.max_abs() == 0.0) throw ConfigError("initial field must be nonzero");

  const double gamma = (params.alpha + 1.0) / params.alpha;
  GroundStateSolution sol{params, q, 0.0, {}, {}, 0.0, 0, 0, false, {}};
  std::vector<double>& history = sol.history;
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_at = 0;
  AndersonMixer mixer(options.anderson_depth);

  // |xi_k|^{2s} + lambda, reused by every iteration.
  std::vector<double> shifted(grid.size() / 2 + 1);
  for (std::size_t k = 0; k < shifted.size(); ++k) {
    shifted[k] = symbol_value(SymbolSpec{params.s, params.lambda, 1.0, false}, grid.abs_frequency(k));
  }
  const double h = grid.spacing();
  const double spectral_weight = h * h / grid.length();

  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const Field nl = positive_power(q, params.alpha + 1.0);
    const auto qhat = detail::rfft(q.values());
    auto nhat = detail::rfft(nl.values());
    double num = 0.0;
    for (std::size_t k = 0; k < shifted.size(); ++k) {
      const double mult = (k == 0 || k + 1 == shifted.size()) ? 1.0 : 2.0;
      num += mult * shifted[k] * std::norm(qhat[k]);
      nhat[k] /= shifted[k];
    }
    num *= spectral_weight;
    Field next(grid, detail::irfft(nhat, grid.size()), Parity::even);
    const double res = l2(q - next) / l2(q);
    history.push_back(res);
    if (!std::isfinite(res)) {
      throw ConvergenceError("fixed-point iteration diverged for " + describe(params), history);
    }
    if (res <= options.tol) {
      sol.converged = true;
      sol.iterations = it;
      break;
    }
    if (res < 0.9 * best) {
      best = res;
      best_at = it;
    } else if (it - best_at > options.stagnation_window) {
      sol.fallback_steps += descend_weinstein(q, params, 50);
      best = std::numeric_limits<double>::infinity();
      best_at = it;
      mixer.clear();
      continue;
    }
    if (res > 100.0 * best) mixer.clear();
    const double den = inner(q, nl);
    if (!(den > 0.0) || !(num > 0.0)) {
      throw ConvergenceError("iterate collapsed to zero for " + describe(params), history);
    }
    next *= std::pow(num / den, gamma);
    next.symmetrize(Parity::even);
    if (next.max_abs() < 1e-200 || !std::isfinite(next.max_abs())) {
      throw ConvergenceError("iterate left the representable range for " + describe(params),
                             history);
    }
    q = mixer.mix(q, std::move(next));
  }
  if (!sol.converged) {
    throw ConvergenceError("fixed-point iteration hit the iteration cap for " + describe(params),
                           history);
  }

  q = recentre(q);
  q.symmetrize(Parity::even);
  q.set_parity(Parity::even);
  sol.q = q;
  sol.residual = history.back();
  sol.weinstein_value = weinstein(q, params.s, params.alpha);
  sol.pohozaev = pohozaev_residuals(q, params);
  if (options.certify) {
    const PropertyLedger shape = check_symmetry_monotonicity(q);
    if (!shape.all_passed()) {
      std::string msg = "converged field fails shape checks for " + describe(params) + ":";
      for (const auto& c : shape.checks()) {
        if (!c.passed) msg += " " + c.name + " (" + c.detail + ")";
      }
      throw PropertyError(msg);
    }
    sol.decay = decay_fit(q, params.s);
  }
  return sol;
}

PohozaevResiduals pohozaev_residuals(const Field& q, const ModelParams& params) {
  const double s = params.s, a = params.alpha;
  const double as = a * (2.0 * s - 1.0) / (4.0 * s) + 1.0;
  const double bs = a / (4.0 * s);
  const double pw = power_integral(q, a + 2.0) / (a + 2.0);
  const double mass = 0.5 * params.lambda * inner(q, q);
  const double semi = 0.5 * hs_seminorm_sq(q, s);
  return {std::abs(mass - as * pw) / mass, std::abs(semi - bs * pw) / semi};
}

GnConstant gn_constant(double s, double alpha, const Grid& grid, double tol) {
  const ModelParams p{s, alpha, 1.0};
  SolverOptions opt;
  opt.tol = tol;
  opt.certify = false;
  const auto coarse = solve_ground_state(p, grid, std::nullopt, opt);
  const Grid fine(grid.length(), 2 * grid.size());
  const auto refined = solve_ground_state(p, fine, std::nullopt, opt);
  const double c0 = 1.0 / coarse.weinstein_value;
  const double c1 = 1.0 / refined.weinstein_value;
  return {c0, std::abs(c1 - c0)};
}

DecayFit decay_fit(const Field& q, double s) {
  const Grid& g = q.grid();
  const double L = g.length();
  const double qmax = q.max_abs();
  std::vector<double> xs, ys;
  DecayFit fit;

  if (s >= 1.0) {
    fit.algebraic = false;
    fit.exponent = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t j = g.center() + 1; j < g.size(); ++j) {
      const double v = q[j];
      if (v > 1e-12 * qmax && v < 1e-3 * qmax) {
        xs.push_back(g.node(j));
        ys.push_back(std::log(v));
      }
    }
    if (xs.size() < 3) throw PropertyError("exponential tail window holds fewer than 3 nodes");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sx += xs[i];
      sy += ys[i];
      sxx += xs[i] * xs[i];
      sxy += xs[i] * ys[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.rate = -slope;
    fit.constant = std::exp((sy - slope * sx) / n);
    fit.window_lo = xs.front();
    fit.window_hi = xs.back();
    return fit;
  }

  fit.window_lo = L / 8.0;
  fit.window_hi = L / 4.0;
  const std::size_t stride = std::max<std::size_t>(1, g.size() / 8 / 256);
  for (std::size_t j = g.center() + 1; j < g.size(); j += stride) {
    const double x = g.node(j);
    if (x >= fit.window_lo && x <= fit.window_hi && q[j] > 0.0) {
      xs.push_back(x);
      ys.push_back(std::log(q[j]));
    }
  }
  if (xs.size() < 3) throw PropertyError("algebraic tail window holds fewer than 3 positive nodes");

  // Least squares in log C for fixed p; golden search in p.
  // Images beyond the 20th on each side by the midpoint-rule integral.
  auto images = [L](double x, double p) {
    constexpr int kNear = 20;
    double acc = std::pow(x, -p);
    for (int n = 1; n <= kNear; ++n) {
      acc += std::pow(n * L + x, -p) + std::pow(n * L - x, -p);
    }
    const double edge = (kNear + 0.5) * L;
    acc += (std::pow(edge + x, 1.0 - p) + std::pow(edge - x, 1.0 - p)) / ((p - 1.0) * L);
    return acc;
  };
  auto misfit = [&](double p, double* logc) {
    double mean = 0.0;
    std::vector<double> r(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      r[i] = ys[i] - std::log(images(xs[i], p));
      mean += r[i];
    }
    mean /= static_cast<double>(r.size());
    double acc = 0.0;
    for (double v : r) acc += (v - mean) * (v - mean);
    if (logc) *logc = mean;
    return acc;
  };
  double lo = 1.02, hi = 6.0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - phi * (hi - lo), d = lo + phi * (hi - lo);
  double fc = misfit(c, nullptr), fd = misfit(d, nullptr);
  for (int it = 0; it < 80; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - phi * (hi - lo);
      fc = misfit(c, nullptr);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + phi * (hi - lo);
      fd = misfit(d, nullptr);
    }
  }
  double logc = 0.0;
  fit.exponent = 0.5 * (lo + hi);
  misfit(fit.exponent, &logc);
  fit.constant = std::exp(logc);
  const double target = 1.0 + 2.0 * s;
  if (std::abs(fit.exponent - target) > 0.2) {
    std::ostringstream os;
    os << "tail exponent " << fit.exponent << " differs from " << target << " by more than 0.2";
    throw PropertyError(os.str());
  }
  return fit;
}

PropertyLedger check_symmetry_monotonicity(const Field& q) {
  PropertyLedger ledger;
  const Grid& g = q.grid();
  const double qmax = q.max_abs();
  const double defect = q.parity_defect(Parity::even);
  ledger.at_most("evenness", defect, 1e-10, "Q is even", "max mirror-pair deviation / max Q");

  double worst = std::numeric_limits<double>::infinity();
  std::size_t worst_at = 0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (q[j] < worst) {
      worst = q[j];
      worst_at = j;
    }
  }
  const bool positive = worst > -kPositivityFloor * qmax && qmax > 0.0;
  ledger.holds("positivity", positive, worst / qmax, "Q is positive",
               positive ? "" : "min at x = " + std::to_string(g.node(worst_at)));

  double rise = -std::numeric_limits<double>::infinity();
  std::size_t rise_at = g.center();
  for (std::size_t j = g.center(); j + 1 < g.size(); ++j) {
    const double d = q[j + 1] - q[j];
    if (d > rise) {
      rise = d;
      rise_at = j;
    }
  }
  const bool monotone = rise <= kMonotoneTolerance * qmax;
  ledger.holds("monotone_decrease", monotone, rise / qmax, "Q is strictly decreasing for x > 0",
               monotone ? "" : "increase after x = " + std::to_string(g.node(rise_at)));
  return ledger;
}

std::pair<Field, ModelParams> rescale_solution(const Field& q, const ModelParams& params,
                                               double lambda_new, double tol) {
  if (!(lambda_new > 0.0)) throw ConfigError("rescale target lambda must be positive");
  ModelParams np = params;
  np.lambda = lambda_new;
  if (lambda_new == params.lambda) return {q, np};

  const Grid& g = q.grid();
  const double omega = lambda_new / params.lambda;
  const double amp = std::pow(omega, 1.0 / params.alpha);
  const double c = std::pow(omega, 0.5 / params.s);

  if (c > 1.0) {
    const auto F = detail::rfft(q.values());
    const double cutoff = g.abs_frequency(g.size() / 2) / c;
    double total = 0.0, above = 0.0;
    for (std::size_t k = 0; k < F.size(); ++k) {
      const double e = std::norm(F[k]);
      total += e;
      if (g.abs_frequency(k) > cutoff) above += e;
    }
    if (above > 1e-10 * total) {
      std::ostringstream os;
      os << "rescaling by " << c << " aliases " << above / total << " of the field energy";
      throw NumericError(os.str(), above / total);
    }
  }

  std::optional<DecayFit> tail;
  try {
    tail = decay_fit(q, params.s);
  } catch (const PropertyError&) {
  }

  Field out(g, Parity::even);
  std::vector<double> inside;
  std::vector<std::size_t> where;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double y = c * g.node(j);
    if (std::abs(y) < 0.5 * g.length()) {
      inside.push_back(y);
      where.push_back(j);
    } else if (tail) {
      const double ay = std::abs(y);
      out[j] = tail->algebraic ? tail->constant * std::pow(ay, -tail->exponent)
                               : tail->constant * std::exp(-tail->rate * ay);
    }
  }
  const auto vals = interpolate(q, inside);
  for (std::size_t i = 0; i < where.size(); ++i) out[where[i]] = vals[i];
  out *= amp;
  out.symmetrize(Parity::even);

  SolverOptions opt;
  opt.tol = tol;
  opt.certify = false;
  auto polished = solve_ground_state(np, g, out, opt);
  return {polished.q, np};
}

PropertyCheck minimality_spot_check(const Field& q, double s, double alpha, std::size_t trials,
                                    std::uint64_t seed, double tolerance) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.2, 1.0), width(0.3, 3.0), shift(0.0, 2.0);
  std::uniform_int_distribution<int> bumps(1, 3), kind(0, 2);
  const double jq = weinstein(q, s, alpha);
  const Grid& g = q.grid();
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    const int m = bumps(rng);
    std::vector<std::array<double, 4>> spec(m);
    for (auto& b : spec) b = {amp(rng), width(rng), shift(rng), static_cast<double>(kind(rng))};
    Field u = Field::sample(
        g,
        [&](double x) {
          double acc = 0.0;
          for (const auto& b : spec) {
            for (double sign : {-1.0, 1.0}) {
              const double z = (x - sign * b[2]) / b[1];
              if (b[3] == 0.0) acc += b[0] * std::exp(-z * z);
              else if (b[3] == 1.0) acc += b[0] / (1.0 + z * z);
              else acc += b[0] / std::cosh(z);
            }
          }
          return acc;
        },
        Parity::even);
    margin = std::min(margin, weinstein(u, s, alpha) - jq);
  }
  const bool ok = margin >= -tolerance * jq;
  return {"minimality_spot_check", ok, margin / jq, -tolerance,
          "J(Q) does not exceed J(u) for random even positive u",
          std::to_string(trials) + " trials, seed " + std::to_string(seed)};
}

Field embed(const Field& q, double s, const Grid& target) {
  const Grid& g = q.grid();
  if (std::abs(target.spacing() - g.spacing()) > 1e-12 * g.spacing() || target.size() < g.size()) {
    throw ConfigError("embed needs a longer box with the same spacing");
  }
  std::optional<DecayFit> tail;
  try {
    tail = decay_fit(q, s);
  } catch (const PropertyError&) {
  }
  Field out(target, Parity::even);
  const std::size_t offset = (target.size() - g.size()) / 2;
  for (std::size_t j = 0; j < target.size(); ++j) {
    if (j >= offset && j < offset + g.size()) {
      out[j] = q[j - offset];
    } else if (tail) {
      const double ax = std::abs(target.node(j));
      out[j] = tail->algebraic ? tail->constant * std::pow(ax, -tail->exponent)
                               : tail->constant * std::exp(-tail->rate * ax);
    }
  }
  out.symmetrize(Parity::even);
  return out;
}

double resolved_spacing(const ModelParams& params) {
  params.validate();
  const double scale = std::pow(params.lambda, -0.5 / params.s);
  const double length = 32.0 * scale;
  SolverOptions opt;
  opt.certify = false;
  for (int k = 4; k <= 12; ++k) {
    const std::size_t n = std::size_t{32} << k;
    const Grid g(length, n);
    Field init = Field::sample(
        g, [scale](double x) { return std::exp(-x * x / (scale * scale)); }, Parity::even);
    const auto sol = solve_ground_state(params, g, init, opt);
    const auto F = detail::rfft(sol.q.values());
    double top = 0.0;
    for (std::size_t m = n / 4; m < F.size(); ++m) top = std::max(top, std::abs(F[m]));
    if (top <= 1e-4 * std::abs(F[0])) return g.spacing();
  }
  throw NumericError("ground state is not resolved at spacing 2^-12 of the pilot box", 0.0);
}

CertifiedSolve solve_certified(const ModelParams& params, double target,
                               std::size_t max_points, double tol) {
  const double h = resolved_spacing(params);
  SolverOptions opt;
  opt.tol = tol;
  opt.certify = false;
  std::vector<std::array<double, 3>> trail;
  auto worst = [](const PohozaevResiduals& r) { return std::max(r.mass, r.seminorm); };
  auto points_for = [h](double length) {
    std::size_t n = 8;
    while (static_cast<double>(n) * h < length - 0.5 * h) n *= 2;
    return n;
  };

  double length = 256.0 * std::pow(params.lambda, -0.5 / params.s);
  std::size_t n = points_for(length);
  while (n > max_points && length > 32.0) {
    length /= 2.0;
    n = points_for(length);
  }
  std::optional<Field> start;
  std::optional<GroundStateSolution> last;
  for (;;) {
    const Grid g(static_cast<double>(n) * h, n);
    std::optional<Field> init;
    if (start) init = embed(*start, params.s, g);
    last = solve_ground_state(params, g, std::move(init), opt);
    const double r = worst(last->pohozaev);
    trail.push_back({g.length(), static_cast<double>(n), r});
    if (r <= target || 2 * n > max_points) break;
    start = last->q;

    std::size_t factor = 2;
    const std::size_t t = trail.size();
    if (t >= 2) {
      const double rate = std::log2(trail[t - 2][2] / r);
      if (rate > 0.2) {
        const double doublings = std::ceil(std::log2(r / target) / rate);
        factor = std::size_t{1} << static_cast<int>(std::clamp(doublings, 1.0, 10.0));
      }
    }
    while (factor > 2 && n * factor > max_points) factor /= 2;
    n *= factor;
  }
  CertifiedSolve out{std::move(*last), std::move(trail)};
  const PropertyLedger shape = check_symmetry_monotonicity(out.solution.q);
  if (!shape.all_passed()) {
    throw PropertyError("certified solve ended with a field that fails shape checks");
  }
  out.solution.decay = decay_fit(out.solution.q, params.s);
  return out;
}

}  // namespace fracgs
