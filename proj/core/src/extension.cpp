#include "fracgs/extension.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "fft.hpp"
#include "fracgs/errors.hpp"
#include "fracgs/quadrature.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs {
namespace {

// exp(-r) K_nu(r) underflows past this; the table stops short of it so that
// log m stays finite.
constexpr double kTableMax = 700.0;

void check_weight(double a) {
  if (!(a > -1.0 && a < 1.0)) {
    throw ConfigError("weight exponent must lie in (-1, 1), got " + std::to_string(a));
  }
}

void check_order(double s) {
  if (!(s > 0.0 && s < 1.0)) {
    throw ConfigError("extension needs 0 < s < 1, got " + std::to_string(s));
  }
}

// (m_a(r), m_a'(r)) for r >= 0.
std::pair<double, double> profile_exact(double a, double r) {
  const double nu = 0.5 * (1.0 - a);
  if (r == 0.0) {
    const double d = a < 0.0 ? 0.0 : (a == 0.0 ? -1.0 : -std::numeric_limits<double>::infinity());
    return {1.0, d};
  }
  const double pref = 2.0 / std::tgamma(nu);
  const double e = std::exp(nu * std::log(0.5 * r) - r);
  if (e == 0.0) return {0.0, 0.0};
  return {pref * e * quad::bessel_k_scaled(nu, r), -pref * e * quad::bessel_k_scaled(1.0 - nu, r)};
}

void check_levels(const std::vector<double>& y) {
  if (y.empty()) throw ConfigError("extension needs at least one y level");
  if (!(y.front() > 0.0)) throw ConfigError("y levels must be positive");
  for (std::size_t m = 1; m < y.size(); ++m) {
    if (!(y[m] > y[m - 1])) throw ConfigError("y levels must be strictly increasing");
  }
}

// Common step of log-uniform levels; ConfigError otherwise.
double log_step(const std::vector<double>& y, std::size_t min_levels) {
  if (y.size() < min_levels) {
    throw ConfigError("need at least " + std::to_string(min_levels) + " y levels");
  }
  const double dt = std::log(y.back() / y.front()) / static_cast<double>(y.size() - 1);
  for (std::size_t m = 1; m < y.size(); ++m) {
    if (std::abs(std::log(y[m] / y[m - 1]) - dt) > 1e-9 * dt) {
      throw ConfigError("y levels must be log-uniform");
    }
  }
  return dt;
}

double mode_weight(std::size_t k, std::size_t n) { return (k == 0 || 2 * k == n) ? 1.0 : 2.0; }

Field second_derivative(const Field& f) {
  Field d = apply_symbol(f, SymbolSpec{1.0, 0.0, 1.0, false});
  d *= -1.0;
  return d;
}

}  // namespace

double c_constant(double a) {
  check_weight(a);
  return std::pow(2.0, a) * std::tgamma(0.5 * (1.0 + a)) / std::tgamma(0.5 * (1.0 - a));
}

double weight_exponent(double s) {
  check_order(s);
  return 1.0 - 2.0 * s;
}

ProfileTable profile_m(double a, std::span<const double> rs) {
  check_weight(a);
  ProfileTable t;
  t.a = a;
  t.r.assign(rs.begin(), rs.end());
  t.m.reserve(rs.size());
  t.dm.reserve(rs.size());
  for (double r : rs) {
    if (!(r >= 0.0)) throw ConfigError("profile abscissae must be nonnegative");
    const auto [m, d] = profile_exact(a, r);
    t.m.push_back(m);
    t.dm.push_back(d);
  }
  return t;
}

double profile_energy(double a) {
  check_weight(a);
  auto g = [a](double r) {
    const auto [m, d] = profile_exact(a, r);
    return std::pow(r, a) * (d * d + m * m);
  };
  // r^a m'^2 ~ r^{-a} is integrable at 0; tanh-sinh absorbs it
  return quad::tanh_sinh(g, 0.0, 1.0, 1e-12) +
         quad::exp_sinh([&g](double r) { return g(r + 1.0); }, 1e-12);
}

Profile::Profile(double a, double r_lo, double r_hi, std::size_t per_decade) : a_(a) {
  check_weight(a);
  if (!(r_lo > 0.0) || !(r_hi > r_lo) || per_decade < 2) {
    throw ConfigError("profile table needs 0 < r_lo < r_hi and per_decade >= 2");
  }
  r_hi = std::min(r_hi, kTableMax);
  if (r_lo >= r_hi) return;  // everything is evaluated directly
  t0_ = std::log(r_lo);
  const double span = std::log(r_hi) - t0_;
  const auto steps = static_cast<std::size_t>(std::ceil(span / std::numbers::ln10 * per_decade));
  const std::size_t n = std::max<std::size_t>(steps, 1) + 1;
  dt_ = span / static_cast<double>(n - 1);
  lm_.resize(n);
  lm_t_.resize(n);
  ld_.resize(n);
  ld_t_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::exp(t0_ + dt_ * static_cast<double>(i));
    const auto [m, d] = profile_exact(a, r);
    const double dd = m - a / r * d;
    lm_[i] = std::log(m) + r;
    lm_t_[i] = r * d / m + r;
    ld_[i] = std::log(-d) + r;
    ld_t_[i] = r * dd / d + r;
  }
}

namespace {

double hermite(const std::vector<double>& p, const std::vector<double>& dp, std::size_t i,
               double tau, double dt) {
  const double t2 = tau * tau, t3 = t2 * tau;
  return (2 * t3 - 3 * t2 + 1) * p[i] + (t3 - 2 * t2 + tau) * dt * dp[i] +
         (-2 * t3 + 3 * t2) * p[i + 1] + (t3 - t2) * dt * dp[i + 1];
}

}  // namespace

double Profile::value(double r) const {
  if (r <= 0.0) return 1.0;
  const double t = std::log(r);
  const double u = lm_.empty() ? -1.0 : (t - t0_) / dt_;
  if (u < 0.0 || u > static_cast<double>(lm_.size() - 1)) return profile_exact(a_, r).first;
  const auto i = std::min(static_cast<std::size_t>(u), lm_.size() - 2);
  return std::exp(hermite(lm_, lm_t_, i, u - static_cast<double>(i), dt_) - r);
}

double Profile::derivative(double r) const {
  if (r <= 0.0) return profile_exact(a_, 0.0).second;
  const double t = std::log(r);
  const double u = ld_.empty() ? -1.0 : (t - t0_) / dt_;
  if (u < 0.0 || u > static_cast<double>(ld_.size() - 1)) return profile_exact(a_, r).second;
  const auto i = std::min(static_cast<std::size_t>(u), ld_.size() - 2);
  return -std::exp(hermite(ld_, ld_t_, i, u - static_cast<double>(i), dt_) - r);
}

Field ExtensionField::slice(std::size_t m) const {
  const std::size_t n = grid.size();
  std::vector<double> v(u.begin() + static_cast<std::ptrdiff_t>(m * n),
                        u.begin() + static_cast<std::ptrdiff_t>((m + 1) * n));
  return Field(grid, std::move(v));
}

std::vector<double> log_y_grid(double y_min, double y_max, std::size_t levels) {
  if (!(y_min > 0.0) || !(y_max > y_min) || levels < 2) {
    throw ConfigError("log y grid needs 0 < y_min < y_max and at least two levels");
  }
  std::vector<double> y(levels);
  const double dt = std::log(y_max / y_min) / static_cast<double>(levels - 1);
  for (std::size_t m = 0; m < levels; ++m) y[m] = y_min * std::exp(dt * static_cast<double>(m));
  y.back() = y_max;
  return y;
}

std::vector<double> default_y_grid(const Grid& grid, std::size_t levels) {
  return log_y_grid(1e-4 * grid.spacing(), 2.0 * grid.length(), levels);
}

ExtensionField extend(const Field& f, double s, std::vector<double> y,
                      const ExtendOptions& options) {
  check_order(s);
  check_levels(y);
  const Grid& g = f.grid();
  const std::size_t n = g.size(), half = n / 2;
  ExtensionField out{g, std::move(y), 1.0 - 2.0 * s, {}, f};
  out.u.resize(out.y.size() * n);

  const Profile prof(out.a, g.abs_frequency(1) * out.y.front(), g.abs_frequency(half) * out.y.back());
  const detail::cvec spec = detail::rfft(f.values());
  detail::cvec work(spec.size());
  for (std::size_t m = 0; m < out.y.size(); ++m) {
    work[0] = spec[0];
    for (std::size_t k = 1; k <= half; ++k) work[k] = spec[k] * prof.value(g.abs_frequency(k) * out.y[m]);
    const auto slice = detail::irfft(work, n);
    std::copy(slice.begin(), slice.end(), out.u.begin() + static_cast<std::ptrdiff_t>(m * n));
  }

  if (options.cross_check) {
    const double dev = convolution_deviation(out, 3, options.seed);
    if (dev > 1e-5) {
      throw NumericError("extension disagrees with P_a convolution: " + std::to_string(dev), dev);
    }
  }
  return out;
}

double poisson_kernel(double a, double x, double y) {
  check_weight(a);
  const double c = std::tgamma(0.5 * (2.0 - a)) / (std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (1.0 - a)));
  return c * std::pow(y, 1.0 - a) * std::pow(x * x + y * y, -0.5 * (2.0 - a));
}

double kernel_mass(double a) {
  check_weight(a);
  return 2.0 * quad::exp_sinh([a](double x) { return poisson_kernel(a, x, 1.0); }, 1e-12);
}

double convolution_deviation(const ExtensionField& u, std::size_t slices, std::uint64_t seed) {
  const Grid& g = u.grid;
  const double h = g.spacing(), length = g.length();
  std::vector<std::size_t> eligible;
  for (std::size_t m = 0; m < u.y.size(); ++m) {
    if (u.y[m] >= 4.0 * h && u.y[m] <= 0.25 * length) eligible.push_back(m);
  }
  if (eligible.empty() || slices == 0) return 0.0;

  const double a = u.a;
  const double c = poisson_kernel(a, 0.0, 1.0);  // C_a
  constexpr int kImages = 50;
  const double far = (kImages + 0.5) * length;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick_level(0, eligible.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_node(0, g.size() - 1);
  double worst = 0.0;
  for (std::size_t t = 0; t < slices; ++t) {
    const std::size_t m = eligible[pick_level(rng)];
    const double y = u.y[m];
    double scale = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) scale = std::max(scale, std::abs(u.at(j, m)));
    if (scale == 0.0) continue;
    const double yw = std::pow(y, 1.0 - a);
    for (int p = 0; p < 8; ++p) {
      const std::size_t i = pick_node(rng);
      const double x = g.node(i);
      double sum = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double fj = u.trace[j];
        if (fj == 0.0) continue;
        const double d = x - g.node(j);
        double k = 0.0;
        for (int q = -kImages; q <= kImages; ++q) {
          const double e = d + q * length;
          k += std::pow(e * e + y * y, -0.5 * (2.0 - a));
        }
        sum += fj * k;
      }
      sum *= c * yw * h;
      // remaining images by the midpoint integral; y << |x - z + q L| there
      double tail = 0.0;
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double d = x - g.node(j);
        tail += u.trace[j] * (std::pow(far + d, a - 1.0) + std::pow(far - d, a - 1.0));
      }
      sum += c * yw * h * tail / ((1.0 - a) * length);
      worst = std::max(worst, std::abs(u.at(i, m) - sum) / scale);
    }
  }
  return worst;
}

double dirichlet_energy(const ExtensionField& u) {
  const double dt = log_step(u.y, 5);
  const std::size_t n = u.grid.size(), levels = u.y.size();
  const double h = u.grid.spacing(), a = u.a;

  // d/dt along each column, fourth order; one-sided near the ends
  auto ddt = [&](std::size_t j, std::size_t m) {
    auto v = [&](std::ptrdiff_t mm) { return u.at(j, static_cast<std::size_t>(mm)); };
    const auto k = static_cast<std::ptrdiff_t>(m);
    const auto last = static_cast<std::ptrdiff_t>(levels - 1);
    double d;
    if (k >= 2 && k <= last - 2) {
      d = v(k - 2) - 8 * v(k - 1) + 8 * v(k + 1) - v(k + 2);
    } else if (k == 0) {
      d = -25 * v(0) + 48 * v(1) - 36 * v(2) + 16 * v(3) - 3 * v(4);
    } else if (k == 1) {
      d = -3 * v(0) - 10 * v(1) + 18 * v(2) - 6 * v(3) + v(4);
    } else if (k == last - 1) {
      d = 3 * v(last) + 10 * v(last - 1) - 18 * v(last - 2) + 6 * v(last - 3) - v(last - 4);
    } else {
      d = 25 * v(last) - 48 * v(last - 1) + 36 * v(last - 2) - 16 * v(last - 3) + 3 * v(last - 4);
    }
    return d / (12.0 * dt);
  };

  double total = 0.0, ex0 = 0.0, ey0 = 0.0;
  for (std::size_t m = 0; m < levels; ++m) {
    const double ex = hs_seminorm_sq(u.slice(m), 1.0);
    double ey = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double dy = ddt(j, m) / u.y[m];
      ey += dy * dy;
    }
    ey *= h;
    if (m == 0) {
      ex0 = ex;
      ey0 = ey;
    }
    const double w = (m == 0 || m == levels - 1) ? 0.5 : 1.0;
    total += w * std::pow(u.y[m], 1.0 + a) * (ex + ey);
  }
  total *= dt;
  // (0, y_min): |d_x u|^2 ~ const, |d_y u|^2 ~ y^{-2a}
  total += std::pow(u.y.front(), 1.0 + a) * (ex0 / (1.0 + a) + ey0 / (1.0 - a));
  return total;
}

double harmonicity_residual(const ExtensionField& u) {
  const double dt = log_step(u.y, 3);
  const std::size_t n = u.grid.size();
  double num = 0.0, den = 0.0;
  for (std::size_t m = 1; m + 1 < u.y.size(); ++m) {
    const Field uxx = second_derivative(u.slice(m));
    const double y2 = u.y[m] * u.y[m];
    for (std::size_t j = 0; j < n; ++j) {
      const double lo = u.at(j, m - 1), mid = u.at(j, m), hi = u.at(j, m + 1);
      const double ut = (hi - lo) / (2 * dt);
      const double utt = (hi - 2 * mid + lo) / (dt * dt);
      const double xx = y2 * uxx[j];
      const double r = xx + utt + (u.a - 1.0) * ut;
      num += r * r;
      den += xx * xx;
    }
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

NeumannReport neumann_trace(const ExtensionField& u, const std::vector<double>& eps) {
  NeumannReport rep;
  rep.eps = eps;
  if (eps.empty()) return rep;
  for (double e : eps) {
    if (!(e > 0.0)) throw ConfigError("Neumann offsets must be positive");
  }
  const Grid& g = u.grid;
  const std::size_t n = g.size(), half = n / 2;
  const double a = u.a, s = 0.5 * (1.0 - a), ca = c_constant(a);
  const auto [emin, emax] = std::minmax_element(eps.begin(), eps.end());
  const Profile prof(a, g.abs_frequency(1) * *emin, g.abs_frequency(half) * *emax * 1.001);
  const detail::cvec spec = detail::rfft(u.trace.values());

  double target = 0.0;
  for (std::size_t k = 1; k <= half; ++k) {
    target += mode_weight(k, n) * std::norm(spec[k]) * std::pow(g.abs_frequency(k), 4.0 * s);
  }
  for (double e : eps) {
    double diff = 0.0;
    for (std::size_t k = 1; k <= half; ++k) {
      const double xi = g.abs_frequency(k);
      const double got = -std::pow(e, a) * xi * prof.derivative(xi * e) / ca;
      const double want = std::pow(xi, 2.0 * s);
      diff += mode_weight(k, n) * std::norm(spec[k]) * (got - want) * (got - want);
    }
    rep.deviation.push_back(target > 0.0 ? std::sqrt(diff / target) : 0.0);
  }
  rep.decreasing = true;
  for (std::size_t i = 1; i < rep.deviation.size(); ++i) {
    if (!(rep.deviation[i] < rep.deviation[i - 1])) rep.decreasing = false;
  }
  return rep;
}

RayleighReport rayleigh_eigen_check(const Field& psi, const Field& v, double claimed, double s,
                                    std::size_t levels) {
  check_order(s);
  if (!(psi.grid() == v.grid())) throw ConfigError("eigenfield and potential grids differ");
  const double norm = inner(psi, psi);
  if (std::abs(norm - 1.0) > 1e-8) {
    throw ConfigError("eigenfield must have unit L2 norm, got " + std::to_string(norm));
  }
  const ExtensionField u = extend(psi, s, default_y_grid(psi.grid(), levels));
  double pot = 0.0;
  for (std::size_t j = 0; j < psi.size(); ++j) pot += v[j] * psi[j] * psi[j];
  pot *= psi.grid().spacing();
  RayleighReport rep;
  rep.value = dirichlet_energy(u) / c_constant(u.a) + pot;
  rep.deviation = std::abs(rep.value - claimed);
  return rep;
}

NodalCount nodal_domains(const ExtensionField& u, double threshold_fraction) {
  const std::size_t n = u.grid.size(), levels = u.y.size(), total = n * levels;
  double peak = 0.0;
  for (double x : u.u) peak = std::max(peak, std::abs(x));
  const double thr = threshold_fraction * peak;
  auto sign = [&](std::size_t idx) { return u.u[idx] > thr ? 1 : (u.u[idx] < -thr ? -1 : 0); };

  NodalCount count;
  std::vector<char> seen(total, 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < total; ++start) {
    const int sg = sign(start);
    if (sg == 0 || seen[start]) continue;
    ++(sg > 0 ? count.positive : count.negative);
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t idx = stack.back();
      stack.pop_back();
      const std::size_t m = idx / n, j = idx % n;
      const std::size_t nb[4] = {m * n + (j + 1) % n, m * n + (j + n - 1) % n,
                                 m > 0 ? idx - n : idx, m + 1 < levels ? idx + n : idx};
      for (std::size_t q : nb) {
        if (!seen[q] && sign(q) == sg) {
          seen[q] = 1;
          stack.push_back(q);
        }
      }
    }
  }
  count.total = count.positive + count.negative;
  return count;
}

}  // namespace fracgs
