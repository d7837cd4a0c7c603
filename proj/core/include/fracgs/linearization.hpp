#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fracgs/dense.hpp"
#include "fracgs/grid.hpp"
#include "fracgs/groundstate.hpp"
#include "fracgs/report.hpp"

namespace fracgs {

/// Largest sector dimension handed to the dense eigensolver; larger sectors
/// are treated matrix-free.
inline constexpr std::size_t kDenseCap = 4097;

/// L+ = (-Delta)^s + lambda - (alpha+1) Q^alpha in one parity sector, in the
/// grid-orthonormal basis of sector.hpp.
struct SectorMatrix {
  Parity sector = Parity::even;
  Grid grid;
  ModelParams params;
  std::size_t dimension = 0;
  DenseMatrix entries;             ///< empty above the dense cap
  std::vector<double> diagonal;    ///< |xi_k|^{2s} + lambda per basis index
  std::vector<double> potential;   ///< -(alpha+1) Q_+^alpha at the nodes
  std::vector<double> start;       ///< sector coefficients of Q (even) or Q' (odd)

  bool dense() const noexcept { return entries.n != 0; }
  /// L+ c in sector coefficients, through FFTs.
  std::vector<double> apply(std::span<const double> c) const;
  /// max |potential|; L+ + shift dominates the diagonal part.
  double shift() const;
};

struct SignChanges {
  std::size_t line = 0;      ///< over all of the box
  std::size_t positive = 0;  ///< over x > 0
};

struct SpectrumReport {
  Parity sector = Parity::even;
  double epsilon_zero = 1e-6;
  std::vector<double> eigenvalues;  ///< lowest k, ascending
  std::vector<Field> eigenfields;   ///< unit L^2 norm, sign-normalized
  std::size_t morse_index = 0;      ///< eigenvalues below -epsilon_zero, whole sector
  std::vector<double> zero_modes;   ///< computed eigenvalues with |e| <= epsilon_zero
  std::vector<bool> below_continuum;  ///< e < lambda per computed eigenvalue
  std::vector<SignChanges> sign_changes;
  /// "inertia" when the Morse index comes from a dense LDL^T inertia count,
  /// "lobpcg" when it counts converged lowest eigenvalues until one is above
  /// -epsilon_zero.
  std::string morse_method;
};

/// Dense assembly. Throws ConfigError when Q is not even or the sector is
/// larger than `cap`.
SectorMatrix build_lplus(const Field& q, const ModelParams& params, Parity sector,
                         std::size_t cap = kDenseCap);

/// Same operator without the dense matrix; spectrum() then runs LOBPCG.
SectorMatrix build_lplus_matrix_free(const Field& q, const ModelParams& params, Parity sector);

/// build_lplus when the sector fits under kDenseCap, matrix-free otherwise.
SectorMatrix build_lplus_auto(const Field& q, const ModelParams& params, Parity sector);

/// Lowest k eigenpairs (dense LAPACK or LOBPCG). Eigenfields are scaled to unit L^2 norm; even fields
/// are signed to have positive integral, odd fields positive mass on x > 0.
SpectrumReport spectrum(const SectorMatrix& m, std::size_t k, double epsilon_zero);

/// max(1e-6, 1e3 * fixed-point residual)
double zero_threshold(double fixed_point_residual);

/// L+ f evaluated spectrally on the grid of q.
Field apply_lplus(const Field& q, const ModelParams& params, const Field& f);

struct KernelReport {
  double residual = 0.0;  ///< |L+ Q'|_2 / |Q'|_2
  double even_gap = 0.0;  ///< smallest |e| in the even sector
  double odd_gap = 0.0;   ///< second smallest |e| in the odd sector
  double odd_nearest = 0.0;      ///< odd eigenvalue of smallest magnitude
  double odd_correlation = 0.0;  ///< |<psi, Q'>| / (|psi| |Q'|) for that eigenfield
};

/// Residual from the grid operator; gaps from the sector spectra (as many
/// eigenvalues as they hold).
KernelReport kernel_residual(const Field& q, const ModelParams& params,
                             const SpectrumReport& even, const SpectrumReport& odd);
double kernel_residual(const Field& q, const ModelParams& params);

struct IdentityResiduals {
  double q = 0.0;  ///< |L+ Q + alpha Q^{alpha+1}| / |alpha Q^{alpha+1}|
  double r = 0.0;  ///< |L+ R + 2 s lambda Q| / |2 s lambda Q|, R = (2s/alpha) Q + chi x Q'
};

/// chi is 1 on |x| <= 0.3 L and falls smoothly to 0 at 0.4 L. Throws
/// ConfigError for Q = 0.
IdentityResiduals identity_residuals(const Field& q, const ModelParams& params);

/// Sign flips between consecutive nodes with |psi| above
/// threshold_fraction * max|psi|; nodes below the threshold are skipped.
SignChanges sign_changes(const Field& psi, double threshold_fraction = 1e-6);

/// Ground eigenvalue is even, simple and has a fixed-sign eigenfield; the
/// lowest odd eigenfield has a fixed sign on x > 0.
PropertyLedger perron_checks(const SpectrumReport& even, const SpectrumReport& odd);

struct CoercivityReport {
  double with_translation = 0.0;     ///< min over the complement of {phi, Q'}
  double without_translation = 0.0;  ///< min over the complement of phi only
};

/// Minimum of <eta, L+ eta> / |eta|_{H^s}^2 (|eta|_{H^s}^2 = int (1 + |xi|^{2s})
/// |eta^|^2) over grid functions orthogonal to the even ground eigenfield
/// and, in the first number, to Q'.
CoercivityReport coercivity_check(const SectorMatrix& even, const SectorMatrix& odd,
                                  const SpectrumReport& even_spectrum, const Field& q);

struct SecondOrderReport {
  double worst_ratio = 0.0;         ///< min <eta, L+ eta> / |eta|^2 over the trials
  double constrained_minimum = 0.0; ///< lowest even eigenvalue on the complement of Q^{alpha+1}
  double unconstrained_q = 0.0;     ///< <Q, L+ Q> / |Q|^2, negative
  std::size_t trials = 0;
};

/// Random even eta orthogonal to Q^{alpha+1}: <eta, L+ eta> >= -eps |eta|^2.
SecondOrderReport second_order_condition(const Field& q, const ModelParams& params,
                                         const SectorMatrix& even, std::size_t trials,
                                         std::uint64_t seed);

struct LinearizationAnalysis {
  GroundStateSolution solution;
  SpectrumReport even;
  SpectrumReport odd;
  KernelReport kernel;
  IdentityResiduals identities;
  CoercivityReport coercivity;
  SecondOrderReport second_order;
  PropertyLedger ledger;
};

struct AnalysisOptions {
  std::size_t even_count = 3;
  std::size_t odd_count = 2;
  std::size_t trials = 100;  ///< second-order spot checks
  std::uint64_t seed = 1;
  bool coercivity = true;
};

/// Solve on `grid` (shape checks only; the decay window of a spectral box is
/// usually pre-asymptotic), then run every L+ diagnostic. Ledger entries:
/// shape, morse_even, ground eigenfield sign, odd zero mode (|e| <= 1e-4
/// lambda, correlation with Q' >= 0.999), even gap >= 1e-3 lambda, kernel
/// residual <= 1e-3, second even eigenfield sign changes (1 on x > 0, 2 on
/// the line), Perron checks, coercivity > 0, second-order condition.
LinearizationAnalysis analyze_linearization(const ModelParams& params, const Grid& grid,
                                            const AnalysisOptions& options = {});
/// Same diagnostics for a given (e.g. stored) solution.
LinearizationAnalysis analyze_linearization(GroundStateSolution solution,
                                            const AnalysisOptions& options = {});

/// Halves resolved_spacing(params) until the kernel residual of the ground
/// state on the pilot box is at most 1e-5; the product Q^alpha Q' aliases on
/// coarser grids. Throws NumericError after four halvings.
double spectral_spacing(const ModelParams& params);

/// Grid for spectral work: spectral_spacing(params), at least `points`
/// nodes and a box of at least min_length lambda^{-1/2s}.
Grid spectral_grid(const ModelParams& params, std::size_t points = 4096,
                   double min_length = 16.0);

}  // namespace fracgs
