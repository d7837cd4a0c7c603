#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace fracgs {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid grid, model parameters, or command configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A Fourier symbol that would divide by zero at some mode.
class SingularSymbolError : public Error {
 public:
  using Error::Error;
};

/// Quadrature, factorization or eigensolver failure.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double estimate = 0.0)
      : Error(what), estimate_(estimate) {}
  double estimate() const noexcept { return estimate_; }

 private:
  double estimate_;
};

/// Fixed-point or Newton iteration that failed to converge.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<double>& history() const noexcept { return history_; }

 private:
  std::vector<double> history_;
};

/// A converged result that violates a structural property (positivity,
/// monotonicity, decay law, ...).
class PropertyError : public Error {
 public:
  using Error::Error;
};

/// The even-sector linearization is (nearly) singular, so the branch cannot
/// be continued by the implicit function theorem.
class BranchAssumptionError : public Error {
 public:
  BranchAssumptionError(const std::string& what, double gap) : Error(what), gap_(gap) {}
  double gap() const noexcept { return gap_; }

 private:
  double gap_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracgs
