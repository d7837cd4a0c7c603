#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace fracgs::quad {

using Integrand = std::function<double(double)>;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
};

/// Wynn epsilon acceleration fed one partial sum at a time. Keeps only the
/// last antidiagonal, truncated to `width` columns.
class WynnEpsilon {
 public:
  explicit WynnEpsilon(std::size_t width = 40) : width_(width) {}

  /// Push the next partial sum; returns the current best estimate.
  double push(double partial_sum);
  double estimate() const noexcept { return estimate_; }
  /// |difference| between the two most recent estimates.
  double change() const noexcept { return change_; }
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t width_;
  std::vector<double> diag_;
  double estimate_ = 0.0;
  double change_ = 0.0;
  std::size_t count_ = 0;
};

enum class Oscillator { cosine, sine };

/// int_0^inf g(u) cos(u x) du (or sin) for g that is eventually monotone in
/// |g| and tends to 0. Half-period panels between consecutive zeros of the
/// oscillator are integrated by adaptive Gauss-Kronrod and the partial sums
/// are accelerated with Wynn epsilon. The first panel is split geometrically
/// and its leading piece uses tanh-sinh to absorb endpoint singularities.
/// Throws NumericError with the last change as estimate when the target is
/// not met within `max_panels`.
Estimate oscillatory(const Integrand& g, double x, Oscillator kind, double abs_tol,
                     double rel_tol = 1e-13, std::size_t max_panels = 2000);

/// int_a^b g by adaptive 31-point Gauss-Kronrod.
double gauss_kronrod(const Integrand& g, double a, double b, double rel_tol = 1e-13,
                     unsigned max_depth = 12);

/// int_a^b g by tanh-sinh; tolerates integrable endpoint singularities.
double tanh_sinh(const Integrand& g, double a, double b, double rel_tol = 1e-13);

/// int_0^inf g by exp-sinh.
double exp_sinh(const Integrand& g, double rel_tol = 1e-13);

/// Modified Bessel function of the second kind from the integral
/// int_0^inf exp(-r cosh t) cosh(nu t) dt, returned as exp(r) K_nu(r) so
/// that large r does not underflow.
double bessel_k_scaled(double nu, double r);

}  // namespace fracgs::quad
