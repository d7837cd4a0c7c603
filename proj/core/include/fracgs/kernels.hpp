#pragma once

#include <span>
#include <vector>

#include "fracgs/grid.hpp"
#include "fracgs/report.hpp"

namespace fracgs {

// All kernels use the mass-one normalization
//   K_t(x) = (1/2 pi) int exp(-t |xi|^{2s}) exp(i xi x) d xi,
//   G(x)   = (1/2 pi) int exp(i xi x) / (|xi|^{2s} + lambda) d xi.

struct HeatKernelTable {
  double s = 0.5;
  double t = 1.0;
  std::vector<double> x;
  std::vector<double> values;
};

struct ResolventKernelTable {
  double s = 0.5;
  double lambda = 1.0;
  std::vector<double> x;
  std::vector<double> values;     ///< Laplace route
  std::vector<double> fourier;    ///< direct oscillatory route
  std::vector<double> deviation;  ///< |A - B| / |A|
};

/// n points geometrically spaced on [a, b], a > 0.
std::vector<double> log_spaced(double a, double b, std::size_t n);

/// K_t(x). Large |x| t^{-1/(2s)} uses the convergent (s < 1/2) or asymptotic
/// power series in |x|^{-2s} when its terms fall below roundoff; otherwise
/// oscillatory quadrature of the defining integral.
double heat_kernel_value(double s, double t, double x);

/// Gamma(1/(2s)) t^{-1/(2s)} / (2 pi s)
double heat_kernel_at_origin(double s, double t);

/// Throws ConfigError unless 0 < s <= 1 and t > 0.
HeatKernelTable heat_kernel(double s, double t, std::span<const double> xs);

/// int_{-X}^{X} K_t from the sine-integral form of the mass on [-X, X].
double heat_kernel_mass(double s, double t, double half_range);

/// Positivity, strict decay in |x|, |x K_t(x)| <= 1/pi, K_t(x) <= K_t(0).
PropertyLedger check_heat_kernel_bounds(const HeatKernelTable& table);

/// max_j |(K_{t1} * K_{t2})(x_j) - K_{t1+t2}(x_j)| with both sides periodized
/// on `grid` and the convolution done by FFT.
double semigroup_check(double s, double t1, double t2, const Grid& grid);

/// Periodized K_t sampled at offsets m h, m = 0..N-1 (wrapped into the box).
std::vector<double> periodized_heat_kernel(double s, double t, const Grid& grid);

/// G(x) = int_0^inf exp(-lambda t) K_t(x) dt, split at t = 1 with a log
/// substitution on each half.
double resolvent_laplace(double s, double lambda, double x);

/// G(x) = (1/pi) int_0^inf cos(u x) / (u^{2s} + lambda) du.
double resolvent_fourier(double s, double lambda, double x);

/// Tabulates both routes. Throws NumericError when they disagree by more than
/// 1e-5 relative at some |x| in [0.1, 20].
ResolventKernelTable resolvent_kernel(double s, double lambda, std::span<const double> xs);

/// int_R G: sine-integral form on [-X, X] plus the power-series tail beyond.
double resolvent_mass(double s, double lambda, double half_range = 200.0);

/// Positivity, strict decay, route agreement, x lambda G(x) <= 1/pi.
PropertyLedger check_resolvent(const ResolventKernelTable& table);

}  // namespace fracgs
