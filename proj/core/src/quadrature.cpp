#include "fracgs/quadrature.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "fracgs/errors.hpp"

namespace fracgs::quad {

double WynnEpsilon::push(double partial_sum) {
  // diag_[k] holds eps_k on the latest antidiagonal; eps_{-1} = 0.
  std::vector<double> next;
  next.reserve(std::min(diag_.size() + 1, width_));
  next.push_back(partial_sum);
  for (std::size_t k = 0; k < diag_.size() && next.size() < width_; ++k) {
    const double diff = next[k] - diag_[k];
    if (diff == 0.0 || !std::isfinite(diff)) break;
    const double below = k == 0 ? 0.0 : diag_[k - 1];
    next.push_back(below + 1.0 / diff);
  }
  diag_ = std::move(next);
  ++count_;
  const std::size_t top = (diag_.size() - 1) & ~std::size_t{1};
  const double est = std::isfinite(diag_[top]) ? diag_[top] : partial_sum;
  change_ = count_ == 1 ? std::abs(est) : std::abs(est - estimate_);
  estimate_ = est;
  return estimate_;
}

double gauss_kronrod(const Integrand& g, double a, double b, double rel_tol, unsigned max_depth) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, a, b, max_depth, rel_tol,
                                                                       &err);
}

double tanh_sinh(const Integrand& g, double a, double b, double rel_tol) {
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  auto fn = [&g](double t) { return g(t); };
  return integrator.integrate(fn, a, b, rel_tol);
}

double exp_sinh(const Integrand& g, double rel_tol) {
  static thread_local boost::math::quadrature::exp_sinh<double> integrator;
  auto fn = [&g](double t) { return g(t); };
  return integrator.integrate(fn, rel_tol);
}

Estimate oscillatory(const Integrand& g, double x, Oscillator kind, double abs_tol, double rel_tol,
                     std::size_t max_panels) {
  Estimate out;
  if (x == 0.0) {
    if (kind == Oscillator::sine) return out;
    out.value = exp_sinh(g, rel_tol);
    return out;
  }
  const double sign = (kind == Oscillator::sine && x < 0.0) ? -1.0 : 1.0;
  x = std::abs(x);
  const double half_period = std::numbers::pi / x;
  const Integrand f = [&](double u) {
    return g(u) * (kind == Oscillator::cosine ? std::cos(u * x) : std::sin(u * x));
  };
  const double first_zero = kind == Oscillator::cosine ? 0.5 * half_period : half_period;

  // First half period: tanh-sinh near 0, then doubling intervals.
  double lead = std::min(first_zero, 1.0);
  double sum = tanh_sinh(f, 0.0, lead, rel_tol);
  double a = lead;
  while (a < first_zero) {
    const double b = std::min(2.0 * a, first_zero);
    sum += gauss_kronrod(f, a, b, rel_tol);
    a = b;
    if (std::abs(g(b)) * b < 1e-3 * abs_tol) {
      out.value = sign * sum;
      return out;
    }
  }

  WynnEpsilon wynn;
  wynn.push(sum);
  std::size_t settled = 0;
  for (std::size_t m = 0; m < max_panels; ++m) {
    const double lo = first_zero + static_cast<double>(m) * half_period;
    const double hi = lo + half_period;
    const double panel = gauss_kronrod(f, lo, hi, rel_tol, 4);
    sum += panel;
    out.panels = m + 1;
    if (std::abs(panel) < 1e-3 * abs_tol && std::abs(g(hi)) * half_period < 1e-3 * abs_tol) {
      out.value = sign * sum;
      out.error = std::abs(panel);
      return out;
    }
    wynn.push(sum);
    const double target = std::max(abs_tol, rel_tol * std::abs(wynn.estimate()));
    settled = wynn.change() <= target ? settled + 1 : 0;
    if (m >= 4 && settled >= 2) {
      out.value = sign * wynn.estimate();
      out.error = wynn.change();
      return out;
    }
  }
  throw NumericError("oscillatory quadrature did not converge", wynn.change());
}

double bessel_k_scaled(double nu, double r) {
  if (!(r > 0.0)) throw ConfigError("bessel_k_scaled requires r > 0");
  const Integrand f = [nu, r](double t) {
    if (t > 700.0) return 0.0;
    // cosh t - 1 = 2 sinh^2(t/2) keeps small-t accuracy.
    const double sh = std::sinh(0.5 * t);
    const double e = 2.0 * r * sh * sh;
    if (e > 745.0) return 0.0;
    return std::exp(-e) * std::cosh(nu * t);
  };
  return exp_sinh(f, 1e-14);
}

}  // namespace fracgs::quad
