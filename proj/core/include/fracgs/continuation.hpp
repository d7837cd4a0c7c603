#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracgs/dense.hpp"
#include "fracgs/grid.hpp"
#include "fracgs/groundstate.hpp"
#include "fracgs/report.hpp"

namespace fracgs {

/// F(Q, lambda, s) = (Q - ((-Delta)^s + lambda)^{-1} |Q|^alpha Q,
///                    int |Q|^{alpha+2} - c0).
struct BranchResidual {
  Field field;
  double scalar = 0.0;
};

BranchResidual residual_F(const Field& q, double lambda, double s, double alpha, double c0);

/// max(|F_1|_2 / |Q|_2, |F_2| / c0), the quantity Newton drives below its
/// tolerance.
double residual_norm(const BranchResidual& r, const Field& q, double c0);

struct BorderedSolution {
  Field eta;
  double gamma = 0.0;
  /// |(1 + K) eta + gamma g - f|_2 / (|f|_2 + |eta|_2 + |gamma g|_2), with
  /// K = -((-Delta)^s + lambda)^{-1} (alpha+1) |Q|^alpha and
  /// g = ((-Delta)^s + lambda)^{-2} |Q|^alpha Q.
  double backward_residual = 0.0;
  /// <|Q|^alpha Q, (1 + K)^{-1} g>; equals -(1/alpha) int Q^2 at a solution.
  double gamma_coefficient = 0.0;
};

/// Dense factorization of the even-sector Jacobian of F at one state.
///
/// (1 + K) = ((-Delta)^s + lambda)^{-1} L+, so systems are solved with the
/// symmetric matrix of L+ in even sector coefficients. A factor taken at one
/// state also solves systems at nearby states by iterative refinement
/// against the exact operator there.
class EvenJacobian {
 public:
  /// Throws ConfigError above the dense cap and BranchAssumptionError when
  /// the estimated smallest |eigenvalue| of L+ is below gap_threshold.
  EvenJacobian(const Field& q, double lambda, double s, double alpha,
               double gap_threshold = 1e-8);

  /// Bordered system (1 + K) eta + gamma g = f, (alpha+2) <|Q|^alpha Q, eta> = beta
  /// at the factored state. Throws PropertyError when the gamma coefficient
  /// vanishes.
  BorderedSolution solve(const Field& f, double beta) const;
  /// Same system with K, g taken at (q, lambda, s). Throws NumericError when
  /// refinement with this factor does not contract.
  BorderedSolution solve_at(const Field& q, double lambda, double s, const Field& f,
                            double beta) const;
  /// (1 + K) eta = f at (q, lambda, s); lambda is held fixed.
  Field solve_field_at(const Field& q, double lambda, double s, const Field& f) const;

  std::size_t morse_even() const noexcept { return factor_.negative_count(); }
  /// Lower estimate of the smallest |eigenvalue| of L+ on even functions.
  double gap() const noexcept { return 1.0 / factor_.inverse_norm(); }
  double s() const noexcept { return s_; }
  double lambda() const noexcept { return lambda_; }
  double alpha() const noexcept { return alpha_; }
  const Grid& grid() const noexcept { return grid_; }
  const Field& state() const noexcept { return q_; }

 private:
  std::vector<double> refine(const Field& q, double lambda, double s,
                             std::span<const double> rhs) const;

  Grid grid_;
  Field q_;
  double lambda_;
  double s_;
  double alpha_;
  SymmetricFactor factor_;
};

/// Factor at (q, lambda, s) and solve once.
BorderedSolution solve_bordered(const Field& q, double lambda, double s, double alpha,
                                const Field& f, double beta);

struct BranchMonitors {
  double l2_norm_sq = 0.0;
  double hs_seminorm_sq = 0.0;
  double power_norm = 0.0;       ///< int |Q|^{alpha+2}
  double lambda_l2 = 0.0;        ///< lambda int Q^2
  double log_moment = 0.0;       ///< <Q, (-Delta)^s log(-Delta) Q>
  bool positive = false;
  bool monotone = false;
  double decay_constant = 0.0;   ///< max |x| Q(x) over decay_radius <= |x| < L/2
  double decay_radius = 0.0;
  std::size_t morse_even = 0;
  double even_gap = 0.0;         ///< lower estimate of min |e| over the even sector
  double kernel_residual = 0.0;  ///< |L+ Q'|_2 / |Q'|_2
  double newton_residual = 0.0;
  std::size_t newton_iterations = 0;
  PohozaevResiduals pohozaev;
};

struct BranchPoint {
  double s = 0.0;
  double lambda = 0.0;
  Field q;
  BranchMonitors monitors;
};

enum class Termination { reached_target, monitor_failure, newton_failure };

std::string_view to_string(Termination t) noexcept;

struct ContinuationConfig {
  double ds_init = 0.01;
  double ds_min = 1e-5;
  double ds_max = 0.02;
  double newton_tol = 1e-10;
  std::size_t newton_max_iter = 12;
  /// Windows for lambda, int Q^2, lambda int Q^2, the log moment, the
  /// logarithmic s-derivative of int Q^2 and the decay constant are fixed
  /// from the first calibration_points points, widened by this factor.
  double window_factor = 10.0;
  std::size_t calibration_points = 5;
  /// Smallest admissible even-sector gap estimate.
  double gap_threshold = 1e-8;
  /// Decay radius as a multiple of the half width at half maximum of Q_{s0}.
  double decay_radius_factor = 8.0;
  /// Allow s_target < s0. No a-priori bounds cover that direction.
  bool experimental_backward = false;

  /// Throws ConfigError unless 0 < ds_min <= ds_init <= ds_max and
  /// newton_tol > 0.
  void validate() const;
};

struct Prediction {
  Field q;
  double lambda = 0.0;
  Field dq_ds;
  double dlambda_ds = 0.0;
};

/// Tangent step: J (dQ/ds, dlambda/ds) = -(dF/ds, 0), prediction
/// (Q + ds dQ/ds, lambda + ds dlambda/ds). ds may have either sign.
Prediction predictor(const BranchPoint& point, double alpha, double c0, double ds);
Prediction predictor(const BranchPoint& point, const EvenJacobian& jacobian, double c0,
                     double ds);

/// Newton on F from the prediction at fixed s. Throws ConvergenceError
/// (newton failure) when the residual grows, lambda leaves (0, inf) or the
/// iteration cap is hit, PropertyError (monitor failure) when the converged
/// field is not positive, even and decreasing or its even Morse index is not
/// one, and BranchAssumptionError for a vanishing even gap.
/// decay_radius <= 0 selects decay_radius_factor times the half width of the
/// result.
BranchPoint corrector(const Field& q_pred, double lambda_pred, double s, double alpha, double c0,
                      const ContinuationConfig& config, double decay_radius = 0.0);

struct MonitorWindows {
  bool calibrated = false;
  double lambda_lo = 0.0, lambda_hi = 0.0;
  double l2_lo = 0.0, l2_hi = 0.0;
  double lambda_l2_lo = 0.0, lambda_l2_hi = 0.0;
  double log_moment_max = 0.0;     ///< bound on |log moment|
  double log_derivative_max = 0.0; ///< bound on |d log int Q^2 / ds|
  double lambda_derivative_max = 0.0; ///< bound on |d lambda / ds|
  double decay_max = 0.0;
};

struct Branch {
  double alpha = 0.0;
  double s0 = 0.0;
  double c0 = 0.0;
  double s_target = 0.0;
  double newton_tol = 0.0;
  std::vector<BranchPoint> points;
  Termination termination = Termination::reached_target;
  std::string diagnostic;  ///< failed monitor or Newton message
  MonitorWindows windows;
  std::size_t rejected_steps = 0;
};

/// March from the start (polished by Newton at fixed lambda, which fixes c0)
/// to s_target with adaptive steps: halve on Newton failure, grow by 1.3
/// after a corrector that needed at most three iterations. A non-empty
/// `schedule` replaces step control by its s values (ascending, after s0).
/// Throws ConfigError for an invalid config, a backward target without the
/// experimental flag, or alpha >= alpha_max(s) anywhere on the path.
Branch continue_branch(const GroundStateSolution& start, double s_target,
                       const ContinuationConfig& config = {},
                       const std::vector<double>& schedule = {});

/// Conservation to 10 newton_tol, s increasing, lambda Lipschitz within the
/// window, positivity, monotonicity, even Morse index one, kernel residual
/// at most 1e-3, Pohozaev residuals at each point's own s
/// (pohozaev_tol), termination.
PropertyLedger branch_ledger(const Branch& branch, double pohozaev_tol = 1e-5);

/// lambda_* = (alpha / (2 (alpha+2)) c0 / int |P'|^2)^{2 alpha / (alpha+4)},
/// P(x) = (sigma+1)^{1/2sigma} cosh^{-1/sigma}(sigma x), sigma = alpha/2.
double lambda_star(double alpha, double c0);

/// lambda^{1/alpha} P(lambda^{1/2} x) on the grid.
Field limit_profile(double alpha, double lambda, const Grid& grid);

struct LimitReport {
  double s_end = 0.0;
  double lambda_end = 0.0;
  double lambda_star = 0.0;
  double lambda_deviation = 0.0;  ///< |lambda_end - lambda_*| / lambda_*
  double field_deviation = 0.0;   ///< relative L^2 distance to the limit profile
  double classical_pohozaev = 0.0;  ///< |int Q'^2 - a int Q^{a+2}| / (a int Q^{a+2}), a = alpha/(2(alpha+2))
  double tolerance = 0.0;         ///< 10 (1 - s_end) + 1e-8
  PropertyLedger ledger;
};

/// Compare the last point with the local s = 1 ground state of the same
/// conserved power. Throws ConfigError when the branch stops below s = 0.99.
LimitReport verify_limit(const Branch& branch);

struct UniquenessReport {
  std::vector<GroundStateSolution> ground_states;
  std::vector<Branch> branches;
  double ground_state_deviation = 0.0;  ///< max relative L^2 distance to seed 0 after recentring
  double branch_deviation = 0.0;        ///< max over shared s of field and lambda distance
  std::size_t shared_points = 0;
  PropertyLedger ledger;
};

/// Solve the ground state from every seed on `grid`, continue the first
/// branch adaptively to s_target and the others on its s values, then
/// compare. Throws ConfigError for fewer than two seeds.
UniquenessReport uniqueness_experiment(const ModelParams& params, const Grid& grid,
                                       const std::vector<Field>& seeds, double s_target,
                                       const ContinuationConfig& config = {},
                                       double ground_state_tol = 1e-6);

}  // namespace fracgs
