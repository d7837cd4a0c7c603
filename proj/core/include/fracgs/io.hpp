#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracgs/continuation.hpp"
#include "fracgs/extension.hpp"
#include "fracgs/grid.hpp"
#include "fracgs/groundstate.hpp"
#include "fracgs/kernels.hpp"
#include "fracgs/linearization.hpp"
#include "fracgs/report.hpp"

namespace fracgs {

/// Key order is kept as inserted so reports diff cleanly.
using Json = nlohmann::ordered_json;

/// Bumped whenever a field is renamed or removed from any artifact.
inline constexpr int kSchemaVersion = 1;

/// "%.17g": 17 significant digits, which round-trips every finite double.
std::string format_real(double v);
/// Inverse of format_real, including "nan" and "inf"; throws IoError on junk
/// or trailing characters.
double parse_real(std::string_view text);

/// JSON number, or the format_real string for NaN and infinities.
Json real(double v);
Json reals(std::span<const double> v);

/// Parameters of one CLI run. Everything a run depends on is here, so a
/// report's config block reproduces the run.
struct RunConfig {
  std::string command;
  ModelParams model;
  std::optional<double> length;       ///< box length; command default when absent
  std::optional<std::size_t> points;  ///< nodes; command default when absent
  double tol = 1e-10;
  double target_s = 0.999;
  double t = 1.0;                     ///< heat kernel time
  std::uint64_t seed = 1;
  std::size_t seeds = 0;              ///< continue: > 1 runs the uniqueness experiment
  std::optional<std::string> solution;  ///< spectrum: stored solution.json
  std::string criteria;               ///< verify-all: comma-separated ids, empty for all
  std::string out;
};

Json to_json(const RunConfig& c);
RunConfig run_config_from_json(const Json& j);

Json to_json(const Grid& g);
Grid grid_from_json(const Json& j);
Json to_json(const ModelParams& p);
ModelParams params_from_json(const Json& j);
Json to_json(const PropertyCheck& c);
Json to_json(const PropertyLedger& l);
PropertyLedger ledger_from_json(const Json& j);

/// {grid, parity, values}
Json to_json(const Field& f);
Field field_from_json(const Json& j);

/// Everything but the residual history is kept; the field is included.
Json to_json(const GroundStateSolution& s);
GroundStateSolution solution_from_json(const Json& j);

Json to_json(const PohozaevResiduals& p);
Json to_json(const DecayFit& d);
/// Eigenvalues and per-eigenfield sign changes; eigenfields go to CSV.
Json to_json(const SpectrumReport& r);
Json to_json(const KernelReport& k);
Json to_json(const IdentityResiduals& r);
Json to_json(const CoercivityReport& c);
Json to_json(const SecondOrderReport& r);
Json to_json(const BranchMonitors& m);
Json to_json(const MonitorWindows& w);
Json to_json(const LimitReport& r);
/// Scalar summary; the branches themselves go to JSON lines.
Json to_json(const UniquenessReport& r);
/// Shape of an extension without its samples.
Json descriptor(const ExtensionField& u);

/// {schema_version, command, config, results, ledger, all_passed}
Json make_report(std::string_view command, const RunConfig& config, Json results,
                 const PropertyLedger& ledger);

/// Files. All throw IoError when the file cannot be opened, written or parsed.
void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Header "x,value", one row per node.
void write_field_csv(const std::filesystem::path& path, const Field& f);
/// Grid recovered from the x column (uniform, starting at -L/2).
Field read_field_csv(const std::filesystem::path& path, Parity parity = Parity::none);

/// Named equal-length columns.
void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns);

/// Rows "x,y,u" for every x_stride-th node of every y_stride-th level.
void write_extension_csv(const std::filesystem::path& path, const ExtensionField& u,
                         std::size_t x_stride = 1, std::size_t y_stride = 1);

/// One header object (schema_version, kind "branch", scalars, windows), then
/// one object per point with s, lambda, monitors and the field values.
void write_branch_jsonl(const std::filesystem::path& path, const Branch& b);
Branch read_branch_jsonl(const std::filesystem::path& path);

/// The flag if given, else $FRACGS_OUT, else "fracgs-out".
std::filesystem::path output_root(const std::optional<std::string>& flag);

}  // namespace fracgs
