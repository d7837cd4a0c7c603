#include "fracgs/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "fracgs/errors.hpp"

namespace fracgs {

// JSON has no NaN or infinity; those travel as strings.
Json real(double v) {
  if (std::isfinite(v)) return v;
  return format_real(v);
}

Json reals(std::span<const double> v) {
  Json a = Json::array();
  for (double x : v) a.push_back(real(x));
  return a;
}

namespace {

double get_real(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_real(j.get<std::string>());
  throw IoError("expected a number, got " + j.dump());
}

std::vector<double> get_reals(const Json& j) {
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& x : j) v.push_back(get_real(x));
  return v;
}

// Looks up a key with a useful message instead of a bare json exception.
const Json& at(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw IoError(std::string("missing key \"") + key + "\"");
  return *it;
}

Parity parity_from(std::string_view s) {
  if (s == "even") return Parity::even;
  if (s == "odd") return Parity::odd;
  if (s == "none") return Parity::none;
  throw IoError("unknown parity \"" + std::string(s) + "\"");
}

Termination termination_from(std::string_view s) {
  for (Termination t : {Termination::reached_target, Termination::monitor_failure,
                        Termination::newton_failure}) {
    if (to_string(t) == s) return t;
  }
  throw IoError("unknown termination \"" + std::string(s) + "\"");
}

void check_schema(const Json& j) {
  const int v = at(j, "schema_version").get<int>();
  if (v != kSchemaVersion) {
    throw IoError("schema_version " + std::to_string(v) + " is not " + std::to_string(kSchemaVersion));
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

PohozaevResiduals pohozaev_from_json(const Json& j) {
  return {get_real(at(j, "mass")), get_real(at(j, "seminorm"))};
}

DecayFit decay_from_json(const Json& j) {
  DecayFit d;
  d.algebraic = at(j, "algebraic").get<bool>();
  d.constant = get_real(at(j, "constant"));
  d.exponent = get_real(at(j, "exponent"));
  d.rate = get_real(at(j, "rate"));
  d.window_lo = get_real(at(j, "window_lo"));
  d.window_hi = get_real(at(j, "window_hi"));
  return d;
}

BranchMonitors monitors_from_json(const Json& j) {
  BranchMonitors m;
  m.l2_norm_sq = get_real(at(j, "l2_norm_sq"));
  m.hs_seminorm_sq = get_real(at(j, "hs_seminorm_sq"));
  m.power_norm = get_real(at(j, "power_norm"));
  m.lambda_l2 = get_real(at(j, "lambda_l2"));
  m.log_moment = get_real(at(j, "log_moment"));
  m.positive = at(j, "positive").get<bool>();
  m.monotone = at(j, "monotone").get<bool>();
  m.decay_constant = get_real(at(j, "decay_constant"));
  m.decay_radius = get_real(at(j, "decay_radius"));
  m.morse_even = at(j, "morse_even").get<std::size_t>();
  m.even_gap = get_real(at(j, "even_gap"));
  m.kernel_residual = get_real(at(j, "kernel_residual"));
  m.newton_residual = get_real(at(j, "newton_residual"));
  m.newton_iterations = at(j, "newton_iterations").get<std::size_t>();
  m.pohozaev = pohozaev_from_json(at(j, "pohozaev"));
  return m;
}

MonitorWindows windows_from_json(const Json& j) {
  MonitorWindows w;
  w.calibrated = at(j, "calibrated").get<bool>();
  w.lambda_lo = get_real(at(j, "lambda_lo"));
  w.lambda_hi = get_real(at(j, "lambda_hi"));
  w.l2_lo = get_real(at(j, "l2_lo"));
  w.l2_hi = get_real(at(j, "l2_hi"));
  w.lambda_l2_lo = get_real(at(j, "lambda_l2_lo"));
  w.lambda_l2_hi = get_real(at(j, "lambda_l2_hi"));
  w.log_moment_max = get_real(at(j, "log_moment_max"));
  w.log_derivative_max = get_real(at(j, "log_derivative_max"));
  w.lambda_derivative_max = get_real(at(j, "lambda_derivative_max"));
  w.decay_max = get_real(at(j, "decay_max"));
  return w;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_real(std::string_view text) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
    throw IoError("not a number: \"" + std::string(text) + "\"");
  }
  return v;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["model"] = to_json(c.model);
  j["L"] = c.length ? real(*c.length) : Json();
  j["N"] = c.points ? Json(*c.points) : Json();
  j["tol"] = real(c.tol);
  j["target_s"] = real(c.target_s);
  j["t"] = real(c.t);
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["solution"] = c.solution ? Json(*c.solution) : Json();
  j["criteria"] = c.criteria;
  j["out"] = c.out;
  return j;
}

RunConfig run_config_from_json(const Json& j) {
  RunConfig c;
  c.command = at(j, "command").get<std::string>();
  c.model = params_from_json(at(j, "model"));
  if (!at(j, "L").is_null()) c.length = get_real(j["L"]);
  if (!at(j, "N").is_null()) c.points = j["N"].get<std::size_t>();
  c.tol = get_real(at(j, "tol"));
  c.target_s = get_real(at(j, "target_s"));
  c.t = get_real(at(j, "t"));
  c.seed = at(j, "seed").get<std::uint64_t>();
  c.seeds = at(j, "seeds").get<std::size_t>();
  if (!at(j, "solution").is_null()) c.solution = j["solution"].get<std::string>();
  c.criteria = at(j, "criteria").get<std::string>();
  c.out = at(j, "out").get<std::string>();
  return c;
}

Json to_json(const Grid& g) { return {{"L", real(g.length())}, {"N", g.size()}}; }

Grid grid_from_json(const Json& j) {
  return Grid(get_real(at(j, "L")), at(j, "N").get<std::size_t>());
}

Json to_json(const ModelParams& p) {
  return {{"s", real(p.s)}, {"alpha", real(p.alpha)}, {"lambda", real(p.lambda)}};
}

ModelParams params_from_json(const Json& j) {
  return {get_real(at(j, "s")), get_real(at(j, "alpha")), get_real(at(j, "lambda"))};
}

Json to_json(const PropertyCheck& c) {
  return {{"name", c.name},           {"status", c.passed ? "pass" : "fail"},
          {"value", real(c.value)},   {"tolerance", real(c.tolerance)},
          {"anchor", c.anchor},       {"detail", c.detail}};
}

Json to_json(const PropertyLedger& l) {
  Json a = Json::array();
  for (const auto& c : l.checks()) a.push_back(to_json(c));
  return a;
}

PropertyLedger ledger_from_json(const Json& j) {
  PropertyLedger l;
  for (const auto& c : j) {
    const std::string status = at(c, "status").get<std::string>();
    if (status != "pass" && status != "fail") throw IoError("unknown status \"" + status + "\"");
    l.add({at(c, "name").get<std::string>(), status == "pass", get_real(at(c, "value")),
           get_real(at(c, "tolerance")), at(c, "anchor").get<std::string>(),
           at(c, "detail").get<std::string>()});
  }
  return l;
}

Json to_json(const Field& f) {
  return {{"grid", to_json(f.grid())}, {"parity", std::string(to_string(f.parity()))},
          {"values", reals(f.values())}};
}

Field field_from_json(const Json& j) {
  const Grid g = grid_from_json(at(j, "grid"));
  std::vector<double> v = get_reals(at(j, "values"));
  if (v.size() != g.size()) throw IoError("field has " + std::to_string(v.size()) + " values for N = " + std::to_string(g.size()));
  return Field(g, std::move(v), parity_from(at(j, "parity").get<std::string>()));
}

Json to_json(const PohozaevResiduals& p) { return {{"mass", real(p.mass)}, {"seminorm", real(p.seminorm)}}; }

Json to_json(const DecayFit& d) {
  return {{"algebraic", d.algebraic}, {"constant", real(d.constant)}, {"exponent", real(d.exponent)},
          {"rate", real(d.rate)},     {"window_lo", real(d.window_lo)}, {"window_hi", real(d.window_hi)}};
}

Json to_json(const GroundStateSolution& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "ground_state";
  j["params"] = to_json(s.params);
  j["weinstein"] = real(s.weinstein_value);
  j["pohozaev"] = to_json(s.pohozaev);
  j["decay"] = to_json(s.decay);
  j["residual"] = real(s.residual);
  j["iterations"] = s.iterations;
  j["fallback_steps"] = s.fallback_steps;
  j["converged"] = s.converged;
  j["q"] = to_json(s.q);
  return j;
}

GroundStateSolution solution_from_json(const Json& j) {
  check_schema(j);
  if (at(j, "kind") != "ground_state") throw IoError("not a ground state file");
  GroundStateSolution s{params_from_json(at(j, "params")), field_from_json(at(j, "q")), 0.0, {}, {}, 0.0, 0, 0,
                        false, {}};
  s.weinstein_value = get_real(at(j, "weinstein"));
  s.pohozaev = pohozaev_from_json(at(j, "pohozaev"));
  s.decay = decay_from_json(at(j, "decay"));
  s.residual = get_real(at(j, "residual"));
  s.iterations = at(j, "iterations").get<std::size_t>();
  s.fallback_steps = at(j, "fallback_steps").get<std::size_t>();
  s.converged = at(j, "converged").get<bool>();
  return s;
}

Json to_json(const SpectrumReport& r) {
  Json sc = Json::array();
  for (const auto& c : r.sign_changes) sc.push_back({{"line", c.line}, {"positive", c.positive}});
  Json below = Json::array();
  for (bool b : r.below_continuum) below.push_back(b);
  return {{"sector", std::string(to_string(r.sector))},
          {"epsilon_zero", real(r.epsilon_zero)},
          {"eigenvalues", reals(r.eigenvalues)},
          {"morse_index", r.morse_index},
          {"morse_method", r.morse_method},
          {"zero_modes", reals(r.zero_modes)},
          {"below_continuum", below},
          {"sign_changes", sc}};
}

Json to_json(const KernelReport& k) {
  return {{"residual", real(k.residual)},       {"even_gap", real(k.even_gap)},
          {"odd_gap", real(k.odd_gap)},         {"odd_nearest", real(k.odd_nearest)},
          {"odd_correlation", real(k.odd_correlation)}};
}

Json to_json(const IdentityResiduals& r) { return {{"q", real(r.q)}, {"r", real(r.r)}}; }

Json to_json(const CoercivityReport& c) {
  return {{"with_translation", real(c.with_translation)},
          {"without_translation", real(c.without_translation)}};
}

Json to_json(const SecondOrderReport& r) {
  return {{"worst_ratio", real(r.worst_ratio)},
          {"constrained_minimum", real(r.constrained_minimum)},
          {"unconstrained_q", real(r.unconstrained_q)},
          {"trials", r.trials}};
}

Json to_json(const BranchMonitors& m) {
  return {{"l2_norm_sq", real(m.l2_norm_sq)},
          {"hs_seminorm_sq", real(m.hs_seminorm_sq)},
          {"power_norm", real(m.power_norm)},
          {"lambda_l2", real(m.lambda_l2)},
          {"log_moment", real(m.log_moment)},
          {"positive", m.positive},
          {"monotone", m.monotone},
          {"decay_constant", real(m.decay_constant)},
          {"decay_radius", real(m.decay_radius)},
          {"morse_even", m.morse_even},
          {"even_gap", real(m.even_gap)},
          {"kernel_residual", real(m.kernel_residual)},
          {"newton_residual", real(m.newton_residual)},
          {"newton_iterations", m.newton_iterations},
          {"pohozaev", to_json(m.pohozaev)}};
}

Json to_json(const MonitorWindows& w) {
  return {{"calibrated", w.calibrated},
          {"lambda_lo", real(w.lambda_lo)},
          {"lambda_hi", real(w.lambda_hi)},
          {"l2_lo", real(w.l2_lo)},
          {"l2_hi", real(w.l2_hi)},
          {"lambda_l2_lo", real(w.lambda_l2_lo)},
          {"lambda_l2_hi", real(w.lambda_l2_hi)},
          {"log_moment_max", real(w.log_moment_max)},
          {"log_derivative_max", real(w.log_derivative_max)},
          {"lambda_derivative_max", real(w.lambda_derivative_max)},
          {"decay_max", real(w.decay_max)}};
}

Json to_json(const LimitReport& r) {
  return {{"s_end", real(r.s_end)},
          {"lambda_end", real(r.lambda_end)},
          {"lambda_star", real(r.lambda_star)},
          {"lambda_deviation", real(r.lambda_deviation)},
          {"field_deviation", real(r.field_deviation)},
          {"classical_pohozaev", real(r.classical_pohozaev)},
          {"tolerance", real(r.tolerance)},
          {"ledger", to_json(r.ledger)}};
}

Json to_json(const UniquenessReport& r) {
  Json residuals = Json::array();
  for (const auto& g : r.ground_states) residuals.push_back(real(g.residual));
  Json ends = Json::array();
  for (const auto& b : r.branches) {
    ends.push_back({{"points", b.points.size()},
                    {"termination", std::string(to_string(b.termination))},
                    {"s_end", b.points.empty() ? Json() : real(b.points.back().s)}});
  }
  return {{"seeds", r.ground_states.size()},
          {"ground_state_residuals", residuals},
          {"ground_state_deviation", real(r.ground_state_deviation)},
          {"branch_deviation", real(r.branch_deviation)},
          {"shared_points", r.shared_points},
          {"branches", ends},
          {"ledger", to_json(r.ledger)}};
}

Json descriptor(const ExtensionField& u) {
  return {{"schema_version", kSchemaVersion},
          {"kind", "extension"},
          {"grid", to_json(u.grid)},
          {"a", real(u.a)},
          {"levels", u.y.size()},
          {"y_min", u.y.empty() ? Json() : real(u.y.front())},
          {"y_max", u.y.empty() ? Json() : real(u.y.back())},
          {"y", reals(u.y)}};
}

Json make_report(std::string_view command, const RunConfig& config, Json results,
                 const PropertyLedger& ledger) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = std::string(command);
  j["config"] = to_json(config);
  j["results"] = std::move(results);
  j["ledger"] = to_json(ledger);
  j["all_passed"] = ledger.all_passed();
  return j;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

Json read_json(const std::filesystem::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_field_csv(const std::filesystem::path& path, const Field& f) {
  auto out = open_out(path);
  out << "x,value\n";
  for (std::size_t j = 0; j < f.size(); ++j) {
    out << format_real(f.grid().node(j)) << ',' << format_real(f[j]) << '\n';
  }
  finish(out, path);
}

Field read_field_csv(const std::filesystem::path& path, Parity parity) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != "x,value") throw IoError(path.string() + ": bad header");
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 2) throw IoError(path.string() + ": bad row \"" + line + "\"");
    xs.push_back(parse_real(cells[0]));
    vs.push_back(parse_real(cells[1]));
  }
  if (xs.size() < 2) throw IoError(path.string() + ": too few rows");
  const double length = -2.0 * xs.front();
  if (!(length > 0.0) || !std::has_single_bit(xs.size()) || xs.size() < 8) {
    throw IoError(path.string() + ": x column does not describe a grid");
  }
  const Grid g(length, xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (std::abs(xs[j] - g.node(j)) > 1e-12 * length) {
      throw IoError(path.string() + ": x column is not a grid starting at -L/2");
    }
  }
  return Field(g, std::move(vs), parity);
}

void write_columns_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                       const std::vector<std::span<const double>>& columns) {
  if (names.size() != columns.size() || columns.empty()) throw IoError("column names and data differ");
  const std::size_t rows = columns.front().size();
  for (const auto& c : columns) {
    if (c.size() != rows) throw IoError("columns of unequal length");
  }
  auto out = open_out(path);
  for (std::size_t i = 0; i < names.size(); ++i) out << (i ? "," : "") << names[i];
  out << '\n';
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << format_real(columns[i][r]);
    out << '\n';
  }
  finish(out, path);
}

void write_extension_csv(const std::filesystem::path& path, const ExtensionField& u,
                         std::size_t x_stride, std::size_t y_stride) {
  if (x_stride == 0 || y_stride == 0) throw IoError("strides must be positive");
  auto out = open_out(path);
  out << "x,y,u\n";
  for (std::size_t m = 0; m < u.y.size(); m += y_stride) {
    for (std::size_t j = 0; j < u.grid.size(); j += x_stride) {
      out << format_real(u.grid.node(j)) << ',' << format_real(u.y[m]) << ',' << format_real(u.at(j, m)) << '\n';
    }
  }
  finish(out, path);
}

void write_branch_jsonl(const std::filesystem::path& path, const Branch& b) {
  auto out = open_out(path);
  const Json header = {{"schema_version", kSchemaVersion},
                       {"kind", "branch"},
                       {"alpha", real(b.alpha)},
                       {"s0", real(b.s0)},
                       {"c0", real(b.c0)},
                       {"s_target", real(b.s_target)},
                       {"newton_tol", real(b.newton_tol)},
                       {"termination", std::string(to_string(b.termination))},
                       {"diagnostic", b.diagnostic},
                       {"rejected_steps", b.rejected_steps},
                       {"points", b.points.size()},
                       {"windows", to_json(b.windows)}};
  out << header.dump() << '\n';
  for (const auto& p : b.points) {
    const Json line = {{"s", real(p.s)}, {"lambda", real(p.lambda)},
                       {"monitors", to_json(p.monitors)}, {"q", to_json(p.q)}};
    out << line.dump() << '\n';
  }
  finish(out, path);
}

Branch read_branch_jsonl(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty");
  Branch b;
  std::size_t expected = 0;
  try {
    const Json h = Json::parse(line);
    check_schema(h);
    if (at(h, "kind") != "branch") throw IoError(path.string() + ": not a branch file");
    b.alpha = get_real(at(h, "alpha"));
    b.s0 = get_real(at(h, "s0"));
    b.c0 = get_real(at(h, "c0"));
    b.s_target = get_real(at(h, "s_target"));
    b.newton_tol = get_real(at(h, "newton_tol"));
    b.termination = termination_from(at(h, "termination").get<std::string>());
    b.diagnostic = at(h, "diagnostic").get<std::string>();
    b.rejected_steps = at(h, "rejected_steps").get<std::size_t>();
    b.windows = windows_from_json(at(h, "windows"));
    expected = at(h, "points").get<std::size_t>();
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const Json p = Json::parse(line);
      b.points.push_back({get_real(at(p, "s")), get_real(at(p, "lambda")), field_from_json(at(p, "q")),
                          monitors_from_json(at(p, "monitors"))});
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  if (b.points.size() != expected) {
    throw IoError(path.string() + ": header announces " + std::to_string(expected) + " points, found " +
                  std::to_string(b.points.size()));
  }
  return b;
}

std::filesystem::path output_root(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("FRACGS_OUT"); env != nullptr && *env != '\0') return env;
  return "fracgs-out";
}

}  // namespace fracgs
