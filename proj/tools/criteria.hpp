#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracgs/grid.hpp"
#include "fracgs/io.hpp"
#include "fracgs/report.hpp"

namespace fracgs::tools {

/// One acceptance criterion: its checks, the numbers behind them and the
/// wall time it took. Runtime budgets are part of the ledger.
struct CriterionResult {
  int id = 0;
  std::string title;
  PropertyLedger ledger;
  Json results = Json::object();
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 10;

/// Runs the listed criteria (1..10) in order; criteria 4 and 5 share one
/// sweep of linearization analyses. `progress` sees each result as soon as
/// it is complete. Throws ConfigError for an id outside 1..10.
std::vector<CriterionResult> run_criteria(const std::vector<int>& ids, std::uint64_t seed,
                                          const std::function<void(const CriterionResult&)>& progress = {});

/// Even, positive, unimodal start fields: exp(-x^2) first, then random
/// Gaussian or Lorentzian bumps drawn from `seed`.
std::vector<Field> seed_fields(const Grid& grid, std::size_t count, std::uint64_t seed);

/// Two-bump fields with random signs, centres and widths, for trace
/// inequality trials.
std::vector<Field> trace_trial_fields(const Grid& grid, std::size_t count, std::uint64_t seed);

struct TraceTrial {
  double energy = 0.0;  ///< Dirichlet energy of the perturbed extension
  double bound = 0.0;   ///< c_a times the H^s seminorm of the trace
};

/// Extends f, multiplies level y by 1 + y/(1+y) (same trace, no longer the
/// minimizer) and returns both sides of the trace inequality.
TraceTrial trace_trial(const Field& f, double s);

/// Gaussian exp(-x^2), Lorentzian 1/(1+x^2) and a signed two-bump field.
std::vector<std::pair<std::string, Field>> energy_test_fields(const Grid& grid);

}  // namespace fracgs::tools
