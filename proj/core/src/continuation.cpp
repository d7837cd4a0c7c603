#include "fracgs/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fracgs/errors.hpp"
#include "fracgs/linearization.hpp"
#include "fracgs/quadrature.hpp"
#include "fracgs/sector.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {

namespace {

double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double l2(const Field& f) { return std::sqrt(inner(f, f)); }

// |xi|^{2s} + lambda on the even sector basis.
std::vector<double> even_symbol(const Grid& g, double lambda, double s) {
  const std::size_t dim = sector_dimension(g.size(), Parity::even);
  const SymbolSpec spec{s, lambda, 1.0, false};
  std::vector<double> d(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    d[i] = symbol_value(spec, g.abs_frequency(sector_wavenumber(i, Parity::even)));
  }
  return d;
}

SymmetricFactor factor_lplus(const Field& q, double lambda, double s, double alpha) {
  const SectorMatrix m = build_lplus(q, ModelParams{s, alpha, lambda}, Parity::even);
  return SymmetricFactor(m.entries);
}

Field even_field(const Grid& g, std::span<const double> coeffs) {
  Field f = from_sector(g, coeffs, Parity::even);
  f.set_parity(Parity::even);
  return f;
}

}  // namespace

BranchResidual residual_F(const Field& q, double lambda, double s, double alpha, double c0) {
  const Field n = signed_power(q, alpha + 1.0);
  Field f1 = q - apply_symbol(n, SymbolSpec{s, lambda, -1.0, false});
  return {std::move(f1), power_integral(q, alpha + 2.0) - c0};
}

double residual_norm(const BranchResidual& r, const Field& q, double c0) {
  return std::max(l2(r.field) / l2(q), std::abs(r.scalar) / c0);
}

EvenJacobian::EvenJacobian(const Field& q, double lambda, double s, double alpha,
                           double gap_threshold)
    : grid_(q.grid()), q_(q), lambda_(lambda), s_(s), alpha_(alpha),
      factor_(factor_lplus(q, lambda, s, alpha)) {
  if (gap() < gap_threshold) {
    std::ostringstream os;
    os << "even-sector L+ is near singular at s = " << s << " (gap estimate " << gap()
       << " < " << gap_threshold << "); the branch cannot be continued";
    throw BranchAssumptionError(os.str(), gap());
  }
}

std::vector<double> EvenJacobian::refine(const Field& q, double lambda, double s,
                                         std::span<const double> rhs) const {
  const SectorMatrix op = build_lplus_matrix_free(q, ModelParams{s, alpha_, lambda}, Parity::even);
  std::vector<double> x = factor_.solve(rhs);
  const double bn = norm2(rhs);
  if (bn == 0.0) return x;
  double prev = std::numeric_limits<double>::infinity();
  for (int sweep = 0; sweep < 60; ++sweep) {
    std::vector<double> r = op.apply(x);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rhs[i] - r[i];
    const double rn = norm2(r);
    if (rn <= 1e-13 * bn) return x;
    if (rn > 0.5 * prev) {
      // Stagnation at roundoff is fine; anything else means the factor is
      // too far from this operator.
      if (rn <= 1e-10 * bn) return x;
      throw NumericError("refinement with a stale Jacobian factor does not contract", rn / bn);
    }
    prev = rn;
    const std::vector<double> d = factor_.solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += d[i];
  }
  throw NumericError("refinement with a stale Jacobian factor did not finish", prev / bn);
}

Field EvenJacobian::solve_field_at(const Field& q, double lambda, double s, const Field& f) const {
  std::vector<double> b = to_sector(f, Parity::even);
  const std::vector<double> d = even_symbol(grid_, lambda, s);
  for (std::size_t i = 0; i < b.size(); ++i) b[i] *= d[i];
  return even_field(grid_, refine(q, lambda, s, b));
}

BorderedSolution EvenJacobian::solve(const Field& f, double beta) const {
  return solve_at(q_, lambda_, s_, f, beta);
}

BorderedSolution EvenJacobian::solve_at(const Field& q, double lambda, double s, const Field& f,
                                        double beta) const {
  if (!(q.grid() == grid_) || !(f.grid() == grid_)) {
    throw ConfigError("bordered solve: fields live on a different grid than the factor");
  }
  const double h = grid_.spacing();
  const std::vector<double> d = even_symbol(grid_, lambda, s);
  const Field n = signed_power(q, alpha_ + 1.0);
  const std::vector<double> nc = to_sector(n, Parity::even);

  // L+ u_f = D f and L+ u_g = D g = n / D, with (1 + K) = D^{-1} L+.
  std::vector<double> bf = to_sector(f, Parity::even);
  for (std::size_t i = 0; i < bf.size(); ++i) bf[i] *= d[i];
  std::vector<double> bg(nc.size());
  for (std::size_t i = 0; i < bg.size(); ++i) bg[i] = nc[i] / d[i];
  const std::vector<double> uf = refine(q, lambda, s, bf);
  const std::vector<double> ug = refine(q, lambda, s, bg);

  BorderedSolution out{Field(grid_, Parity::even), 0.0, 0.0, 0.0};
  // <a, b> = h sum_j a_j b_j = h (coefficient dot product).
  out.gamma_coefficient = h * dot(nc, ug);
  if (!(std::abs(out.gamma_coefficient) > 1e-12 * h * norm2(nc) * norm2(ug))) {
    throw PropertyError(
        "structural failure: <|Q|^alpha Q, (1+K)^{-1} g> vanishes, contradicting its "
        "closed form -(1/alpha) int Q^2");
  }
  out.gamma = (h * dot(nc, uf) - beta / (alpha_ + 2.0)) / out.gamma_coefficient;
  std::vector<double> eta(uf.size());
  for (std::size_t i = 0; i < eta.size(); ++i) eta[i] = uf[i] - out.gamma * ug[i];
  out.eta = even_field(grid_, eta);

  // Backward residual of the full bordered system on the grid.
  Field w(grid_);
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = (alpha_ + 1.0) * std::pow(std::abs(q[j]), alpha_) * out.eta[j];
  }
  const Field g = apply_symbol(n, SymbolSpec{s, lambda, -2.0, false});
  Field r = out.eta - apply_symbol(w, SymbolSpec{s, lambda, -1.0, false});
  r += out.gamma * g;
  r -= f;
  const double scalar = (alpha_ + 2.0) * inner(n, out.eta) - beta;
  const double field_scale = l2(f) + l2(out.eta) + std::abs(out.gamma) * l2(g);
  const double scalar_scale = std::abs(beta) + (alpha_ + 2.0) * l2(n) * l2(out.eta);
  out.backward_residual =
      std::max(field_scale > 0.0 ? l2(r) / field_scale : 0.0,
               scalar_scale > 0.0 ? std::abs(scalar) / scalar_scale : 0.0);
  return out;
}

BorderedSolution solve_bordered(const Field& q, double lambda, double s, double alpha,
                                const Field& f, double beta) {
  const EvenJacobian j(q, lambda, s, alpha);
  return j.solve_at(q, lambda, s, f, beta);
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::reached_target:
      return "reached-target";
    case Termination::monitor_failure:
      return "monitor-failure";
    case Termination::newton_failure:
      return "newton-failure";
  }
  return "unknown";
}

void ContinuationConfig::validate() const {
  if (!(ds_min > 0.0 && ds_min <= ds_init && ds_init <= ds_max)) {
    throw ConfigError("continuation steps need 0 < ds_min <= ds_init <= ds_max");
  }
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive");
  if (newton_max_iter == 0) throw ConfigError("newton_max_iter must be positive");
  if (!(window_factor >= 1.0)) throw ConfigError("window_factor must be at least 1");
  if (calibration_points == 0) throw ConfigError("calibration_points must be positive");
  if (!(gap_threshold > 0.0)) throw ConfigError("gap_threshold must be positive");
  if (!(decay_radius_factor > 0.0)) throw ConfigError("decay_radius_factor must be positive");
}

Prediction predictor(const BranchPoint& point, const EvenJacobian& jacobian, double c0,
                     double ds) {
  (void)c0;  // dF_2/ds = 0: the constraint does not depend on s
  const double alpha = jacobian.alpha();
  const Field n = signed_power(point.q, alpha + 1.0);
  Field dfds = apply_symbol(n, SymbolSpec{point.s, point.lambda, -2.0, true});
  dfds *= -1.0;
  const BorderedSolution t = jacobian.solve_at(point.q, point.lambda, point.s, dfds, 0.0);
  Prediction p{point.q, point.lambda, t.eta, t.gamma};
  if (ds != 0.0) {
    p.q += ds * t.eta;
    p.lambda += ds * t.gamma;
  }
  return p;
}

Prediction predictor(const BranchPoint& point, double alpha, double c0, double ds) {
  const EvenJacobian j(point.q, point.lambda, point.s, alpha);
  return predictor(point, j, c0, ds);
}

namespace {

struct NewtonResult {
  Field q;
  double lambda;
  double residual;
  std::size_t iterations;
};

NewtonResult newton(Field q, double lambda, double s, double alpha, double c0,
                    const ContinuationConfig& cfg, const EvenJacobian* stale) {
  std::optional<EvenJacobian> local;
  const EvenJacobian* jac = stale;
  std::vector<double> history;
  for (std::size_t it = 0;; ++it) {
    const BranchResidual f = residual_F(q, lambda, s, alpha, c0);
    const double r = residual_norm(f, q, c0);
    history.push_back(r);
    if (!std::isfinite(r)) throw ConvergenceError("Newton residual is not finite", history);
    if (r <= cfg.newton_tol) return {std::move(q), lambda, r, it};
    if (it > 0 && r >= history[it - 1]) {
      throw ConvergenceError("Newton residual stopped decreasing", history);
    }
    if (it == cfg.newton_max_iter) throw ConvergenceError("Newton iteration cap", history);
    Field rhs = f.field;
    rhs *= -1.0;
    BorderedSolution step{Field(q.grid()), 0.0, 0.0, 0.0};
    bool solved = false;
    if (jac != nullptr) {
      try {
        step = jac->solve_at(q, lambda, s, rhs, -f.scalar);
        solved = true;
      } catch (const NumericError&) {
        // stale factor too far away; refactor below
      }
    }
    if (!solved) {
      try {
        local.emplace(q, lambda, s, alpha, cfg.gap_threshold);
      } catch (const BranchAssumptionError& e) {
        throw ConvergenceError(std::string("Newton iterate left the invertible region: ") +
                                   e.what(),
                               history);
      }
      jac = &*local;
      step = jac->solve_at(q, lambda, s, rhs, -f.scalar);
    }
    q += step.eta;
    lambda += step.gamma;
    if (!(lambda > 0.0)) throw ConvergenceError("Newton step left lambda > 0", history);
  }
}

double half_width(const Field& q) {
  const Grid& g = q.grid();
  const std::size_t c = g.center();
  const double top = q[c];
  for (std::size_t j = c + 1; j < g.size(); ++j) {
    if (q[j] <= 0.5 * top) {
      const double x0 = g.node(j - 1);
      const double t = (q[j - 1] - 0.5 * top) / (q[j - 1] - q[j]);
      return x0 + t * g.spacing();
    }
  }
  return g.length() / 2.0;
}

BranchMonitors assemble(const Field& q, double lambda, double s, double alpha,
                        const EvenJacobian& jac, double decay_radius, double residual,
                        std::size_t iterations) {
  const ModelParams params{s, alpha, lambda};
  BranchMonitors m;
  m.l2_norm_sq = inner(q, q);
  m.hs_seminorm_sq = hs_seminorm_sq(q, s);
  m.power_norm = power_integral(q, alpha + 2.0);
  m.lambda_l2 = lambda * m.l2_norm_sq;
  m.log_moment = inner(q, apply_symbol(q, SymbolSpec{s, 0.0, 0.0, true}));
  const PropertyLedger shape = check_symmetry_monotonicity(q);
  m.positive = shape.find("positivity") != nullptr && shape.find("positivity")->passed;
  m.monotone = shape.find("monotone_decrease") != nullptr &&
               shape.find("monotone_decrease")->passed &&
               shape.find("evenness") != nullptr && shape.find("evenness")->passed;
  const Grid& g = q.grid();
  m.decay_radius = std::min(decay_radius, g.length() / 4.0);
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double x = std::abs(g.node(j));
    if (x >= m.decay_radius) m.decay_constant = std::max(m.decay_constant, x * std::abs(q[j]));
  }
  m.morse_even = jac.morse_even();
  m.even_gap = jac.gap();
  m.kernel_residual = kernel_residual(q, params);
  m.newton_residual = residual;
  m.newton_iterations = iterations;
  m.pohozaev = pohozaev_residuals(q, params);
  return m;
}

// Pointwise monitor failures, or empty.
std::string pointwise_violation(const BranchMonitors& m, double s) {
  std::ostringstream os;
  if (!m.positive) {
    os << "positivity of Q_s fails at s = " << s;
  } else if (!m.monotone) {
    os << "Q_s is not symmetric decreasing at s = " << s;
  } else if (m.morse_even != 1) {
    os << "even Morse index of L+ is " << m.morse_even << " (expected 1) at s = " << s;
  }
  return os.str();
}

struct Accepted {
  BranchPoint point;
  EvenJacobian jacobian;
};

Accepted finish_point(NewtonResult nr, double s, double alpha, const ContinuationConfig& cfg,
                      double decay_radius) {
  nr.q.symmetrize(Parity::even);
  nr.q.set_parity(Parity::even);
  EvenJacobian jac(nr.q, nr.lambda, s, alpha, cfg.gap_threshold);
  if (decay_radius <= 0.0) decay_radius = cfg.decay_radius_factor * half_width(nr.q);
  BranchMonitors m =
      assemble(nr.q, nr.lambda, s, alpha, jac, decay_radius, nr.residual, nr.iterations);
  const std::string bad = pointwise_violation(m, s);
  if (!bad.empty()) throw PropertyError(bad);
  return {BranchPoint{s, nr.lambda, std::move(nr.q), m}, std::move(jac)};
}

void calibrate(MonitorWindows& w, const std::vector<BranchPoint>& pts, double f) {
  auto span_of = [&](auto get, double& lo, double& hi) {
    double a = std::numeric_limits<double>::infinity();
    double b = 0.0;
    for (const auto& p : pts) {
      a = std::min(a, get(p));
      b = std::max(b, get(p));
    }
    lo = a / f;
    hi = b * f;
  };
  span_of([](const BranchPoint& p) { return p.lambda; }, w.lambda_lo, w.lambda_hi);
  span_of([](const BranchPoint& p) { return p.monitors.l2_norm_sq; }, w.l2_lo, w.l2_hi);
  span_of([](const BranchPoint& p) { return p.monitors.lambda_l2; }, w.lambda_l2_lo,
          w.lambda_l2_hi);
  double lm = 0.0;
  double dec = 0.0;
  for (const auto& p : pts) {
    lm = std::max(lm, std::abs(p.monitors.log_moment));
    dec = std::max(dec, p.monitors.decay_constant);
  }
  // Derivative bounds get a floor of 1 so that a flat start does not make
  // the window arbitrarily tight.
  double dl2 = 1.0;
  double dlam = 1.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double ds = pts[i].s - pts[i - 1].s;
    dl2 = std::max(dl2, std::abs(std::log(pts[i].monitors.l2_norm_sq /
                                          pts[i - 1].monitors.l2_norm_sq) / ds));
    dlam = std::max(dlam, std::abs((pts[i].lambda - pts[i - 1].lambda) / ds));
  }
  w.log_moment_max = f * std::max(lm, 1e-12);
  w.decay_max = f * dec;
  w.log_derivative_max = f * dl2;
  w.lambda_derivative_max = f * dlam;
  w.calibrated = true;
}

std::string window_violation(const MonitorWindows& w, const BranchPoint& p,
                             const BranchPoint& prev) {
  if (!w.calibrated) return {};
  std::ostringstream os;
  const auto& m = p.monitors;
  const double ds = p.s - prev.s;
  if (p.lambda < w.lambda_lo || p.lambda > w.lambda_hi) {
    os << "lambda_s = " << p.lambda << " left its window [" << w.lambda_lo << ", " << w.lambda_hi
       << "] (two-sided bound on lambda_s)";
  } else if (m.l2_norm_sq < w.l2_lo || m.l2_norm_sq > w.l2_hi) {
    os << "int Q_s^2 = " << m.l2_norm_sq << " left its window (mass bound)";
  } else if (m.lambda_l2 < w.lambda_l2_lo || m.lambda_l2 > w.lambda_l2_hi) {
    os << "lambda_s int Q_s^2 = " << m.lambda_l2 << " left its window (Pohozaev mass bound)";
  } else if (std::abs(m.log_moment) > w.log_moment_max) {
    os << "<Q, (-Delta)^s log(-Delta) Q> = " << m.log_moment << " exceeds " << w.log_moment_max
       << " (log-moment bound)";
  } else if (std::abs(std::log(m.l2_norm_sq / prev.monitors.l2_norm_sq) / ds) >
             w.log_derivative_max) {
    os << "d log int Q_s^2 / ds exceeds " << w.log_derivative_max << " (Gronwall bound)";
  } else if (std::abs((p.lambda - prev.lambda) / ds) > w.lambda_derivative_max) {
    os << "d lambda / ds exceeds " << w.lambda_derivative_max << " (C^1 branch)";
  } else if (m.decay_constant > w.decay_max) {
    os << "sup |x| Q_s(x) beyond R0 = " << m.decay_constant << " exceeds " << w.decay_max
       << " (uniform decay bound)";
  } else {
    return {};
  }
  os << " at s = " << p.s;
  return os.str();
}

}  // namespace

BranchPoint corrector(const Field& q_pred, double lambda_pred, double s, double alpha, double c0,
                      const ContinuationConfig& config, double decay_radius) {
  config.validate();
  NewtonResult nr = newton(q_pred, lambda_pred, s, alpha, c0, config, nullptr);
  return finish_point(std::move(nr), s, alpha, config, decay_radius).point;
}

Branch continue_branch(const GroundStateSolution& start, double s_target,
                       const ContinuationConfig& config, const std::vector<double>& schedule) {
  config.validate();
  const ModelParams p0 = start.params;
  p0.validate();
  if (!(s_target > 0.0 && s_target <= 1.0)) throw ConfigError("s_target must lie in (0, 1]");
  const double dir = s_target >= p0.s ? 1.0 : -1.0;
  if (dir < 0.0) {
    if (!config.experimental_backward) {
      throw ConfigError("continuation toward smaller s needs experimental_backward");
    }
    if (!(p0.alpha < alpha_max(s_target))) {
      throw ConfigError("alpha >= alpha_max(s) on the requested path");
    }
  }
  if (!schedule.empty()) {
    double prev = p0.s;
    for (double x : schedule) {
      if (!((x - prev) * dir > 0.0)) throw ConfigError("schedule must move monotonically to s_target");
      prev = x;
    }
    if (schedule.back() != s_target) throw ConfigError("schedule must end at s_target");
  }

  Branch br;
  br.alpha = p0.alpha;
  br.s0 = p0.s;
  br.s_target = s_target;
  br.newton_tol = config.newton_tol;

  // Polish at fixed lambda; c0 is the power of the polished state.
  Field q = start.q;
  q.symmetrize(Parity::even);
  q.set_parity(Parity::even);
  {
    const EvenJacobian j0(q, p0.lambda, p0.s, p0.alpha, config.gap_threshold);
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < 2 * config.newton_max_iter; ++it) {
      Field f = residual_F(q, p0.lambda, p0.s, p0.alpha, 0.0).field;
      const double r = l2(f) / l2(q);
      if (r <= 1e-2 * config.newton_tol || r >= 0.5 * prev) break;
      prev = r;
      f *= -1.0;
      q += j0.solve_field_at(q, p0.lambda, p0.s, f);
    }
  }
  br.c0 = power_integral(q, p0.alpha + 2.0);
  const BranchResidual r0 = residual_F(q, p0.lambda, p0.s, p0.alpha, br.c0);
  const double decay_radius = config.decay_radius_factor * half_width(q);

  std::optional<EvenJacobian> jac;
  try {
    Accepted first = finish_point(NewtonResult{q, p0.lambda, residual_norm(r0, q, br.c0), 0}, p0.s,
                                  p0.alpha, config, decay_radius);
    br.points.push_back(std::move(first.point));
    jac.emplace(std::move(first.jacobian));
  } catch (const PropertyError& e) {
    br.termination = Termination::monitor_failure;
    br.diagnostic = e.what();
    return br;
  } catch (const BranchAssumptionError& e) {
    br.termination = Termination::monitor_failure;
    br.diagnostic = e.what();
    return br;
  }
  if (br.points.size() >= config.calibration_points) {
    calibrate(br.windows, br.points, config.window_factor);
  }

  double ds = config.ds_init;
  std::size_t next = 0;
  while (br.points.back().s != s_target) {
    const BranchPoint& last = br.points.back();
    double s_new;
    if (!schedule.empty()) {
      s_new = schedule[next];
    } else {
      s_new = last.s + dir * std::min(ds, std::abs(s_target - last.s));
      if (std::abs(s_target - s_new) < 1e-12) s_new = s_target;
    }
    const double step = s_new - last.s;

    Field qp = last.q;
    double lp = last.lambda;
    try {
      Prediction pr = predictor(last, *jac, br.c0, step);
      qp = std::move(pr.q);
      lp = pr.lambda;
    } catch (const NumericError&) {
      // zeroth-order predictor
    }

    try {
      NewtonResult nr = newton(std::move(qp), lp, s_new, br.alpha, br.c0, config, &*jac);
      const std::size_t iters = nr.iterations;
      Accepted acc = finish_point(std::move(nr), s_new, br.alpha, config, decay_radius);
      const std::string bad = window_violation(br.windows, acc.point, last);
      if (!bad.empty()) {
        br.termination = Termination::monitor_failure;
        br.diagnostic = bad;
        return br;
      }
      br.points.push_back(std::move(acc.point));
      jac.emplace(std::move(acc.jacobian));
      ++next;
      if (iters <= 3) ds = std::min(1.3 * ds, config.ds_max);
      if (!br.windows.calibrated && br.points.size() >= config.calibration_points) {
        calibrate(br.windows, br.points, config.window_factor);
      }
    } catch (const ConvergenceError& e) {
      ++br.rejected_steps;
      ds *= 0.5;
      if (!schedule.empty() || ds < config.ds_min) {
        br.termination = Termination::newton_failure;
        std::ostringstream os;
        os << e.what() << " at s = " << s_new << " (step " << step << ")";
        br.diagnostic = os.str();
        return br;
      }
    } catch (const PropertyError& e) {
      br.termination = Termination::monitor_failure;
      br.diagnostic = e.what();
      return br;
    } catch (const BranchAssumptionError& e) {
      br.termination = Termination::monitor_failure;
      br.diagnostic = e.what();
      return br;
    }
  }
  br.termination = Termination::reached_target;
  return br;
}

PropertyLedger branch_ledger(const Branch& br, double pohozaev_tol) {
  PropertyLedger led;
  double cons = 0.0;
  double poho = 0.0;
  double kern = 0.0;
  bool pos = true;
  bool mono = true;
  bool morse = true;
  bool increasing = true;
  double dlam = 0.0;
  for (std::size_t i = 0; i < br.points.size(); ++i) {
    const auto& p = br.points[i];
    cons = std::max(cons, std::abs(p.monitors.power_norm - br.c0) / br.c0);
    poho = std::max({poho, p.monitors.pohozaev.mass, p.monitors.pohozaev.seminorm});
    kern = std::max(kern, p.monitors.kernel_residual);
    pos = pos && p.monitors.positive;
    mono = mono && p.monitors.monotone;
    morse = morse && p.monitors.morse_even == 1;
    if (i > 0) {
      const double ds = p.s - br.points[i - 1].s;
      const double dir = br.s_target >= br.s0 ? 1.0 : -1.0;
      increasing = increasing && ds * dir > 0.0;
      if (ds != 0.0) dlam = std::max(dlam, std::abs((p.lambda - br.points[i - 1].lambda) / ds));
    }
  }
  led.at_most("conservation", cons, 10.0 * br.newton_tol,
              "int |Q_s|^{alpha+2} is constant along the branch");
  led.holds("s_monotone", increasing, static_cast<double>(br.points.size()),
            "s moves strictly toward the target");
  if (br.windows.calibrated) {
    led.at_most("lambda_lipschitz", dlam, br.windows.lambda_derivative_max,
                "lambda_s is C^1 in s");
  }
  led.holds("positivity", pos, 0.0, "Q_s > 0 at every point");
  led.holds("monotone_decrease", mono, 0.0, "Q_s is even and decreasing in |x|");
  led.holds("morse_even", morse, 0.0, "L+ has exactly one negative even eigenvalue");
  led.at_most("kernel_residual", kern, 1e-3, "L+ Q_s' = 0 persists along the branch");
  led.at_most("pohozaev", poho, pohozaev_tol, "Pohozaev identities at each point's own s");
  led.holds("reached_target", br.termination == Termination::reached_target,
            br.points.empty() ? 0.0 : br.points.back().s, "branch reaches s_target",
            br.diagnostic);
  return led;
}

double lambda_star(double alpha, double c0) {
  if (!(alpha > 0.0) || !(c0 > 0.0)) throw ConfigError("lambda_star needs alpha > 0 and c0 > 0");
  const double sigma = alpha / 2.0;
  const double amp2 = std::pow(sigma + 1.0, 1.0 / sigma);
  // |P'|^2 = (sigma+1)^{1/sigma} tanh^2(sigma x) cosh^{-2/sigma}(sigma x)
  const auto grad_sq = [&](double x) {
    const double t = std::tanh(sigma * x);
    return amp2 * t * t * std::exp(-(2.0 / sigma) * std::log(std::cosh(sigma * x)));
  };
  const double grad = 2.0 * quad::exp_sinh(grad_sq, 1e-14);
  const double base = alpha / (2.0 * (alpha + 2.0)) * c0 / grad;
  return std::pow(base, 2.0 * alpha / (alpha + 4.0));
}

Field limit_profile(double alpha, double lambda, const Grid& grid) {
  const double sigma = alpha / 2.0;
  const double amp = std::pow(lambda, 1.0 / alpha) * std::pow(sigma + 1.0, 0.5 / sigma);
  const double k = std::sqrt(lambda);
  return Field::sample(
      grid,
      [&](double x) { return amp * std::exp(-std::log(std::cosh(sigma * k * x)) / sigma); },
      Parity::even);
}

LimitReport verify_limit(const Branch& branch) {
  if (branch.points.empty() || branch.points.back().s < 0.99) {
    throw ConfigError("verify_limit needs a branch that reached s >= 0.99");
  }
  const BranchPoint& end = branch.points.back();
  const double a = branch.alpha;
  LimitReport rep;
  rep.s_end = end.s;
  rep.lambda_end = end.lambda;
  rep.lambda_star = lambda_star(a, branch.c0);
  rep.lambda_deviation = std::abs(rep.lambda_end - rep.lambda_star) / rep.lambda_star;
  const Field lim = limit_profile(a, rep.lambda_star, end.q.grid());
  rep.field_deviation = l2(end.q - lim) / l2(lim);
  const double rhs = a / (2.0 * (a + 2.0)) * power_integral(end.q, a + 2.0);
  rep.classical_pohozaev = std::abs(hs_seminorm_sq(end.q, 1.0) - rhs) / rhs;
  rep.tolerance = 10.0 * (1.0 - rep.s_end) + 1e-8;
  rep.ledger.at_most("limit_lambda", rep.lambda_deviation, rep.tolerance,
                     "lambda_s tends to lambda_* as s -> 1");
  rep.ledger.at_most("limit_profile", rep.field_deviation, rep.tolerance,
                     "Q_s tends to lambda_*^{1/alpha} P(lambda_*^{1/2} x) as s -> 1");
  rep.ledger.at_most("classical_pohozaev", rep.classical_pohozaev, rep.tolerance,
                     "int |Q'|^2 = alpha/(2(alpha+2)) int Q^{alpha+2} in the limit");
  return rep;
}

UniquenessReport uniqueness_experiment(const ModelParams& params, const Grid& grid,
                                       const std::vector<Field>& seeds, double s_target,
                                       const ContinuationConfig& config,
                                       double ground_state_tol) {
  if (seeds.size() < 2) throw ConfigError("the uniqueness experiment needs at least two seeds");
  config.validate();
  UniquenessReport rep;
  SolverOptions opts;
  opts.certify = false;
  for (const Field& seed : seeds) {
    GroundStateSolution gs = solve_ground_state(params, grid, seed, opts);
    gs.q = recentre(gs.q);
    gs.q.symmetrize(Parity::even);
    rep.ground_states.push_back(std::move(gs));
  }
  const Field& q0 = rep.ground_states.front().q;
  for (std::size_t i = 1; i < rep.ground_states.size(); ++i) {
    rep.ground_state_deviation =
        std::max(rep.ground_state_deviation, l2(rep.ground_states[i].q - q0) / l2(q0));
  }

  rep.branches.reserve(seeds.size());  // `lead` must stay valid
  rep.branches.push_back(continue_branch(rep.ground_states.front(), s_target, config));
  const Branch& lead = rep.branches.front();
  std::vector<double> schedule;
  for (std::size_t i = 1; i < lead.points.size(); ++i) schedule.push_back(lead.points[i].s);
  const double end = schedule.empty() ? params.s : schedule.back();
  for (std::size_t i = 1; i < rep.ground_states.size(); ++i) {
    rep.branches.push_back(continue_branch(rep.ground_states[i], end, config, schedule));
  }

  rep.shared_points = lead.points.size();
  for (const Branch& b : rep.branches) rep.shared_points = std::min(rep.shared_points, b.points.size());
  for (std::size_t i = 1; i < rep.branches.size(); ++i) {
    for (std::size_t k = 0; k < rep.shared_points; ++k) {
      const BranchPoint& a = lead.points[k];
      const BranchPoint& b = rep.branches[i].points[k];
      rep.branch_deviation = std::max(
          {rep.branch_deviation, l2(b.q - a.q) / l2(a.q), std::abs(b.lambda - a.lambda) / a.lambda});
    }
  }
  bool all_reached = true;
  for (const Branch& b : rep.branches) {
    all_reached = all_reached && b.termination == Termination::reached_target;
  }
  rep.ledger.at_most("ground_states_coincide", rep.ground_state_deviation, ground_state_tol,
                     "the positive even ground state is unique");
  rep.ledger.at_most("branches_coincide", rep.branch_deviation, 10.0 * config.newton_tol,
                     "branches from distinct seeds are the same branch");
  rep.ledger.holds("branches_complete", all_reached && rep.shared_points == lead.points.size(),
                   static_cast<double>(rep.shared_points), "every branch reaches the common target",
                   lead.diagnostic);
  return rep;
}

}  // namespace fracgs
