#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fracgs/grid.hpp"
#include "fracgs/report.hpp"

namespace fracgs {

/// Model (-Delta)^s Q + lambda Q - |Q|^alpha Q = 0.
struct ModelParams {
  double s = 0.5;
  double alpha = 1.0;
  double lambda = 1.0;

  /// Throws ConfigError unless 0 < s <= 1, 0 < alpha < alpha_max(s), lambda > 0.
  void validate() const;
};

/// 4s/(1-2s) for s < 1/2, +infinity otherwise. Throws ConfigError for s
/// outside (0, 1].
double alpha_max(double s);

/// J(u) = (int |(-Delta)^{s/2} u|^2)^{alpha/4s} (int u^2)^{alpha(2s-1)/4s + 1}
///        / int |u|^{alpha+2}.
/// Invariant under u -> a u and u -> u(b x). Throws ConfigError for u = 0.
double weinstein(const Field& u, double s, double alpha);

struct PohozaevResiduals {
  double mass = 0.0;      ///< lambda int Q^2 / 2 against a_s int Q^{alpha+2} / (alpha+2)
  double seminorm = 0.0;  ///< |Q|_{H^s}^2 / 2 against b_s int Q^{alpha+2} / (alpha+2)
};

struct DecayFit {
  /// Algebraic tail C |x|^{-exponent}; for s = 1 the exponential tail
  /// C exp(-rate |x|) is fitted instead and exponent is NaN.
  bool algebraic = true;
  double constant = 0.0;
  double exponent = 0.0;
  double rate = 0.0;
  double window_lo = 0.0;
  double window_hi = 0.0;
};

struct GroundStateSolution {
  ModelParams params;
  Field q;
  double weinstein_value = 0.0;
  PohozaevResiduals pohozaev;
  DecayFit decay;
  double residual = 0.0;  ///< relative fixed-point residual
  std::size_t iterations = 0;
  std::size_t fallback_steps = 0;
  bool converged = false;
  std::vector<double> history;
};

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 20000;
  /// Iterations without a 10% residual improvement before gradient steps on J.
  std::size_t stagnation_window = 400;
  /// Anderson mixing depth on the Petviashvili map; 0 runs the plain map.
  std::size_t anderson_depth = 5;
  bool certify = true;  ///< run positivity, monotonicity and decay checks
};

/// int |u|^p with the grid rule.
double power_integral(const Field& u, double p);

/// |Q - ((-Delta)^s + lambda)^{-1} Q_+^{alpha+1}|_2 / |Q|_2
double fixed_point_residual(const Field& q, const ModelParams& params);

/// Petviashvili iteration on Q = ((-Delta)^s + lambda)^{-1} Q_+^{alpha+1}
/// from an even nonnegative start (default exp(-x^2)). The iterate is kept
/// even, recentred on its maximum, and clipped at zero before the power.
/// Throws ConvergenceError (with the residual history) on divergence, collapse
/// or iteration cap, PropertyError when the converged field is not positive,
/// even and decreasing or has the wrong tail law.
GroundStateSolution solve_ground_state(const ModelParams& params, const Grid& grid,
                                       std::optional<Field> init = std::nullopt,
                                       const SolverOptions& options = {});

PohozaevResiduals pohozaev_residuals(const Field& q, const ModelParams& params);

/// Relative size of the gradient of log J at q. Vanishes at every critical
/// point of J, hence at every solution.
double weinstein_gradient_residual(const Field& q, double s, double alpha);

struct GnConstant {
  double value = 0.0;
  double error_estimate = 0.0;  ///< |C(N) - C(2N)|
};

/// Optimal constant 1 / J(Q) from the ground state at lambda = 1.
GnConstant gn_constant(double s, double alpha, const Grid& grid, double tol = 1e-10);

/// Tail fit on |x| in [L/8, L/4] of C sum_n |x + nL|^{-p} (periodic images
/// included). Throws PropertyError when |p - (1 + 2s)| > 0.2. For s = 1 the
/// exponential law is fitted where Q lies between 1e-12 and 1e-3 of its max.
DecayFit decay_fit(const Field& q, double s);

/// Evenness, positivity and strict decrease on x > 0.
/// Positivity counts values above -1e-13 max Q as nonnegative roundoff.
PropertyLedger check_symmetry_monotonicity(const Field& q);

/// omega^{1/alpha} Q(omega^{1/2s} x), omega = lambda_new / lambda, by Fourier
/// interpolation inside the box and the fitted tail law outside it, then
/// polished by the solver at lambda_new. Throws NumericError when the
/// compressed field carries more than 1e-10 of its energy above the new
/// Nyquist frequency.
std::pair<Field, ModelParams> rescale_solution(const Field& q, const ModelParams& params,
                                               double lambda_new, double tol = 1e-10);

/// J(Q) <= (1 + tolerance) J(u) for `trials` random even positive fields
/// built from Gaussian, Lorentzian and sech bumps. On a periodic box Q
/// minimizes J only up to the box error (the size of its Pohozaev
/// residuals), and bumps shaped like Q can undercut it by that much.
PropertyCheck minimality_spot_check(const Field& q, double s, double alpha, std::size_t trials,
                                    std::uint64_t seed, double tolerance = 1e-3);

/// Circular shift putting the maximum at x = 0.
Field recentre(const Field& f);

/// Copy q onto a grid with the same spacing and a longer box; nodes outside
/// the old box take the fitted tail law.
Field embed(const Field& q, double s, const Grid& target);

/// Largest power-of-two spacing 2^-k (k >= 4) at which the ground state on a
/// pilot box of length 32 lambda^{-1/2s} carries at most 1e-4 of |Q^(0)| in
/// the upper half of its resolved band. Throws NumericError past 2^-12.
double resolved_spacing(const ModelParams& params);

struct CertifiedSolve {
  GroundStateSolution solution;
  /// (L, N, max Pohozaev residual) of every box tried, in order.
  std::vector<std::array<double, 3>> trail;
};

/// Solve at the resolved spacing on boxes of growing length until both
/// Pohozaev residuals fall below `target`. The box length is extrapolated
/// from the observed power-law decay of the residual in L and never exceeds
/// `max_points` nodes; the last solution is returned either way.
CertifiedSolve solve_certified(const ModelParams& params, double target = 5e-6,
                               std::size_t max_points = std::size_t{1} << 22,
                               double tol = 1e-10);

}  // namespace fracgs
