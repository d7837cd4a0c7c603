#pragma once

#include <span>
#include <vector>

#include "fracgs/grid.hpp"

namespace fracgs {

/// Radial Fourier multiplier
///   m(xi) = (|xi|^{2s} + lambda)^p                      (log off)
///   m(xi) = |xi|^{2s} log(xi^2) (|xi|^{2s} + lambda)^p  (log on, m(0) = 0)
/// p = 1, lambda = 0 is (-Delta)^s; p = -1 the resolvent; log with p = -2 is
/// the s-derivative of the resolvent up to sign.
struct SymbolSpec {
  double s = 1.0;
  double lambda = 0.0;
  double power = 1.0;
  bool log = false;

  /// Throws ConfigError on s outside (0, 1] or lambda < 0, and
  /// SingularSymbolError when power < 0 meets lambda = 0.
  void validate() const;
};

double symbol_value(const SymbolSpec& spec, double abs_xi);

/// Multiply the Fourier coefficients of f by m(xi_k). Parity tag is kept.
Field apply_symbol(const Field& f, const SymbolSpec& spec);

/// (1/L) sum_k |xi_k|^{2s} |f^_k|^2, the grid value of int |(-Delta)^{s/2} f|^2.
double hs_seminorm_sq(const Field& f, double s);

/// (1/L) sum_k |f^_k|^2; equals h sum_j f_j^2 by Parseval.
double l2_norm_sq_spectral(const Field& f);

/// (h sum_j |f_j|^p)^{1/p}; throws ConfigError for p < 1.
double lp_norm(const Field& f, double p);

/// h sum_j f_j
double integral(const Field& f);

/// h sum_j f_j g_j
double inner(const Field& f, const Field& g);

/// Spectral d/dx with the Nyquist mode dropped. Flips the parity tag.
Field derivative(const Field& f);

/// Evaluate the trigonometric interpolant of f at arbitrary points. Points
/// outside [-L/2, L/2) wrap periodically.
std::vector<double> interpolate(const Field& f, std::span<const double> xs);

/// Pointwise max(f, 0)^p.
Field positive_power(const Field& f, double p);

/// Pointwise |f|^{p-1} f.
Field signed_power(const Field& f, double p);

}  // namespace fracgs
