#include "fracgs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>

#include "fft.hpp"
#include "fracgs/errors.hpp"
#include "fracgs/quadrature.hpp"

namespace fracgs {
namespace {

constexpr double kPi = std::numbers::pi;

void validate_order(double s) {
  if (!(s > 0.0 && s <= 1.0)) {
    std::ostringstream os;
    os << "kernel order must lie in (0, 1], got " << s;
    throw ConfigError(os.str());
  }
}

// sum_n c_n z^{-1-2sn}, c_n = (-1)^{n+1} Gamma(2sn+1) sin(pi s n) w_n / pi.
// For the heat kernel w_n = 1/n!; for the resolvent w_n = lambda^{-n-1}.
class PowerSeries {
 public:
  PowerSeries(double s, bool resolvent, double lambda) : s_(s) {
    for (int n = 1; n <= kTerms; ++n) {
      const double sn = std::sin(kPi * s * n);
      double logmag = std::lgamma(2.0 * s * n + 1.0) - std::log(kPi);
      logmag += resolvent ? -(n + 1) * std::log(lambda) : -std::lgamma(n + 1.0);
      log_mag_.push_back(logmag);
      sign_.push_back(std::abs(sn) < 1e-14 ? 0.0 : ((n % 2 == 1 ? 1.0 : -1.0) * sn));
    }
  }

  /// Value at z, or nullopt when the terms do not drop below roundoff. The
  /// convergence test uses the envelope without the sin factor.
  std::optional<double> value(double z) const {
    const double lz = std::log(z);
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    int small = 0;
    for (int n = 1; n <= kTerms; ++n) {
      if (sign_[n - 1] == 0.0) continue;
      const double lt = log_mag_[n - 1] - (1.0 + 2.0 * s_ * n) * lz;
      const double mag = std::exp(lt);
      sum += sign_[n - 1] * mag;
      if (mag > prev && small == 0 && n > 3) return std::nullopt;
      prev = mag;
      if (mag <= 1e-17 * std::abs(sum)) {
        if (++small >= 2) return sum;
      } else {
        small = 0;
      }
    }
    return std::nullopt;
  }

  /// int_Z^inf of the series, or nullopt when not converged at Z.
  std::optional<double> tail_integral(double z) const {
    const double lz = std::log(z);
    double sum = 0.0;
    int small = 0;
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 1; n <= kTerms; ++n) {
      if (sign_[n - 1] == 0.0) continue;
      const double lt = log_mag_[n - 1] - 2.0 * s_ * n * lz;
      const double mag = std::exp(lt) / (2.0 * s_ * n);
      sum += sign_[n - 1] * mag;
      if (mag > prev && small == 0 && n > 3) return std::nullopt;
      prev = mag;
      if (mag <= 1e-17 * std::abs(sum)) {
        if (++small >= 2) return sum;
      } else {
        small = 0;
      }
    }
    return std::nullopt;
  }

 private:
  static constexpr int kTerms = 200;
  double s_;
  std::vector<double> log_mag_;
  std::vector<double> sign_;
};

// K_1(z) for z >= 0.
double unit_heat_kernel(double s, double z, const PowerSeries* series, double rel_tol = 1e-14) {
  if (s < 1.0 && z >= 1.0 && series != nullptr) {
    if (auto v = series->value(z)) return *v;
  }
  // Gaussian case: exp(-z^2/4) is below the double range.
  if (s == 1.0 && z * z > 4.0 * 745.0) return 0.0;
  const quad::Integrand g = [s](double u) { return std::exp(-std::pow(u, 2.0 * s)); };
  return quad::oscillatory(g, z, quad::Oscillator::cosine, 1e-17, rel_tol).value / kPi;
}

}  // namespace

std::vector<double> log_spaced(double a, double b, std::size_t n) {
  if (!(a > 0.0 && b > a) || n < 2) throw ConfigError("log_spaced requires 0 < a < b and n >= 2");
  std::vector<double> xs(n);
  const double la = std::log(a), lb = std::log(b);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = std::exp(la + (lb - la) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  xs.back() = b;
  return xs;
}

double heat_kernel_value(double s, double t, double x) {
  validate_order(s);
  if (!(t > 0.0)) throw ConfigError("heat kernel time must be positive");
  const double scale = std::pow(t, -0.5 / s);
  const PowerSeries series(s, false, 1.0);
  return scale * unit_heat_kernel(s, std::abs(x) * scale, &series);
}

double heat_kernel_at_origin(double s, double t) {
  return std::tgamma(0.5 / s) * std::pow(t, -0.5 / s) / (2.0 * kPi * s);
}

HeatKernelTable heat_kernel(double s, double t, std::span<const double> xs) {
  validate_order(s);
  if (!(t > 0.0)) throw ConfigError("heat kernel time must be positive");
  HeatKernelTable table{s, t, {xs.begin(), xs.end()}, {}};
  const double scale = std::pow(t, -0.5 / s);
  const PowerSeries series(s, false, 1.0);
  table.values.reserve(xs.size());
  for (double x : xs) table.values.push_back(scale * unit_heat_kernel(s, std::abs(x) * scale, &series));
  return table;
}

double heat_kernel_mass(double s, double t, double half_range) {
  validate_order(s);
  const quad::Integrand g = [s, t](double u) { return std::exp(-t * std::pow(u, 2.0 * s)) / u; };
  return 2.0 / kPi *
         quad::oscillatory(g, half_range, quad::Oscillator::sine, 1e-16, 1e-14).value;
}

PropertyLedger check_heat_kernel_bounds(const HeatKernelTable& table) {
  PropertyLedger ledger;
  const std::size_t n = table.x.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(table.x[a]) < std::abs(table.x[b]); });

  double min_value = std::numeric_limits<double>::infinity();
  std::string bad_sign;
  for (std::size_t i = 0; i < n; ++i) {
    min_value = std::min(min_value, table.values[i]);
    if (!(table.values[i] > 0.0)) bad_sign += (bad_sign.empty() ? "x=" : ",") + std::to_string(table.x[i]);
  }
  ledger.holds("positivity", bad_sign.empty(), min_value, "heat kernel is strictly positive",
               bad_sign);

  double worst_rise = -std::numeric_limits<double>::infinity();
  std::string bad_mono;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t a = order[i - 1], b = order[i];
    if (std::abs(table.x[a]) == std::abs(table.x[b])) continue;
    const double rise = table.values[b] - table.values[a];
    worst_rise = std::max(worst_rise, rise);
    if (!(rise < 0.0)) bad_mono += (bad_mono.empty() ? "x=" : ",") + std::to_string(table.x[b]);
  }
  ledger.holds("strict_decay", bad_mono.empty(), worst_rise,
               "heat kernel strictly decreases in |x|", bad_mono);

  double worst_xk = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst_xk = std::max(worst_xk, std::abs(table.x[i] * table.values[i]));
  ledger.at_most("x_times_kernel", worst_xk, 1.0 / kPi, "|x K_t(x)| <= 1/pi");

  const double k0 = heat_kernel_at_origin(table.s, table.t);
  double worst_ratio = 0.0;
  for (double v : table.values) worst_ratio = std::max(worst_ratio, v / k0);
  ledger.at_most("bounded_by_origin", worst_ratio, 1.0 + 1e-12,
                 "K_t(x) <= K_t(0) = Gamma(1/2s) t^{-1/2s} / (2 pi s)");
  return ledger;
}

std::vector<double> periodized_heat_kernel(double s, double t, const Grid& grid) {
  validate_order(s);
  const std::size_t n = grid.size();
  const double L = grid.length();
  const double h = grid.spacing();
  const double scale = std::pow(t, -0.5 / s);
  const PowerSeries series(s, false, 1.0);
  // Images sit at |y| >= L/2; use the series there when it converges.
  const bool series_images = s < 1.0 && series.value(0.5 * L * scale).has_value();
  const bool negligible_images = s == 1.0 && 0.25 * L * L / (4.0 * t) > 700.0;
  constexpr int kImages = 100;
  std::vector<double> out(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double y = m < n / 2 ? static_cast<double>(m) * h : (static_cast<double>(m) - static_cast<double>(n)) * h;
    double v = scale * unit_heat_kernel(s, std::abs(y) * scale, &series);
    if (negligible_images) {
      out[m] = v;
      continue;
    }
    for (int k = 1; k <= kImages; ++k) {
      for (double img : {y + k * L, y - k * L}) {
        const double z = std::abs(img) * scale;
        if (series_images) {
          v += scale * series.value(z).value_or(0.0);
        } else {
          v += scale * unit_heat_kernel(s, z, &series);
        }
      }
    }
    if (series_images) {
      // Remaining images by the midpoint rule on the series integral.
      const double far = (kImages + 0.5) * L * scale;
      v += 2.0 / L * series.tail_integral(far).value_or(0.0);
    }
    out[m] = v;
  }
  return out;
}

double semigroup_check(double s, double t1, double t2, const Grid& grid) {
  const std::size_t n = grid.size();
  const auto a = periodized_heat_kernel(s, t1, grid);
  const auto b = periodized_heat_kernel(s, t2, grid);
  const auto c = periodized_heat_kernel(s, t1 + t2, grid);
  auto A = detail::rfft(a);
  const auto B = detail::rfft(b);
  for (std::size_t k = 0; k < A.size(); ++k) A[k] *= B[k];
  auto conv = detail::irfft(A, n);
  double worst = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    worst = std::max(worst, std::abs(grid.spacing() * conv[m] - c[m]));
  }
  return worst;
}

double resolvent_laplace(double s, double lambda, double x) {
  validate_order(s);
  if (!(lambda > 0.0)) throw ConfigError("resolvent shift must be positive");
  x = std::abs(x);
  if (x == 0.0 && s <= 0.5) return std::numeric_limits<double>::infinity();
  const PowerSeries series(s, false, 1.0);
  auto kt = [&](double t) {
    const double scale = std::pow(t, -0.5 / s);
    if (!std::isfinite(x * scale)) return 0.0;
    return scale * unit_heat_kernel(s, x * scale, &series, 1e-11);
  };
  // t in (0, 1]: t = exp(-v); t in [1, inf): t = exp(v).
  const quad::Integrand lower = [&](double v) {
    const double t = std::exp(-v);
    if (t == 0.0) return 0.0;
    return std::exp(-lambda * t) * kt(t) * t;
  };
  const quad::Integrand upper = [&](double v) {
    const double lt = lambda * std::exp(v);
    if (lt > 745.0) return 0.0;
    const double t = std::exp(v);
    return std::exp(-lt) * kt(t) * t;
  };
  return quad::exp_sinh(lower, 1e-10) + quad::exp_sinh(upper, 1e-10);
}

double resolvent_fourier(double s, double lambda, double x) {
  validate_order(s);
  if (!(lambda > 0.0)) throw ConfigError("resolvent shift must be positive");
  x = std::abs(x);
  if (x == 0.0 && s <= 0.5) return std::numeric_limits<double>::infinity();
  const quad::Integrand g = [s, lambda](double u) { return 1.0 / (std::pow(u, 2.0 * s) + lambda); };
  return quad::oscillatory(g, x, quad::Oscillator::cosine, 1e-15, 1e-13).value / kPi;
}

ResolventKernelTable resolvent_kernel(double s, double lambda, std::span<const double> xs) {
  validate_order(s);
  if (!(lambda > 0.0)) throw ConfigError("resolvent shift must be positive");
  ResolventKernelTable table{s, lambda, {xs.begin(), xs.end()}, {}, {}, {}};
  double worst = 0.0;
  double worst_x = 0.0;
  for (double x : xs) {
    const double a = resolvent_laplace(s, lambda, x);
    const double b = resolvent_fourier(s, lambda, x);
    const double dev = std::abs(a - b) / std::abs(a);
    table.values.push_back(a);
    table.fourier.push_back(b);
    table.deviation.push_back(dev);
    const double ax = std::abs(x);
    if (ax >= 0.1 && ax <= 20.0 && dev > worst) worst = dev, worst_x = x;
  }
  if (worst > 1e-5) {
    std::ostringstream os;
    os << "resolvent routes disagree by " << worst << " at x=" << worst_x;
    throw NumericError(os.str(), worst);
  }
  return table;
}

double resolvent_mass(double s, double lambda, double half_range) {
  validate_order(s);
  const quad::Integrand g = [s, lambda](double u) {
    return 1.0 / (u * (std::pow(u, 2.0 * s) + lambda));
  };
  const double inner =
      2.0 / kPi * quad::oscillatory(g, half_range, quad::Oscillator::sine, 1e-16, 1e-14).value;
  if (s == 1.0) return inner + std::exp(-half_range * std::sqrt(lambda)) / lambda;
  const PowerSeries series(s, true, lambda);
  const auto tail = series.tail_integral(half_range);
  if (!tail) throw NumericError("resolvent tail series does not converge at the cut");
  return inner + 2.0 * *tail;
}

PropertyLedger check_resolvent(const ResolventKernelTable& table) {
  PropertyLedger ledger;
  const std::size_t n = table.x.size();
  double min_value = std::numeric_limits<double>::infinity();
  for (double v : table.values) min_value = std::min(min_value, v);
  ledger.at_least("positivity", min_value, std::numeric_limits<double>::min(),
                  "resolvent kernel is strictly positive");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(table.x[a]) < std::abs(table.x[b]); });
  double worst_rise = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t a = order[i - 1], b = order[i];
    if (std::abs(table.x[a]) == std::abs(table.x[b])) continue;
    worst_rise = std::max(worst_rise, table.values[b] - table.values[a]);
  }
  ledger.holds("strict_decay", worst_rise < 0.0, worst_rise, "resolvent kernel strictly decreases in |x|");

  double worst_dev = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = std::abs(table.x[i]);
    if (ax >= 0.1 && ax <= 20.0) worst_dev = std::max(worst_dev, table.deviation[i]);
  }
  ledger.at_most("route_agreement", worst_dev, 1e-5,
                 "Laplace-transform and Fourier routes to the resolvent agree");

  double worst_bound = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    worst_bound = std::max(worst_bound, std::abs(table.x[i]) * table.lambda * table.values[i]);
  }
  ledger.at_most("x_lambda_kernel", worst_bound, 1.0 / kPi, "x lambda G(x) <= 1/pi");
  return ledger;
}

}  // namespace fracgs
