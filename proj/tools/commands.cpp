#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "criteria.hpp"
#include "fracgs/continuation.hpp"
#include "fracgs/errors.hpp"
#include "fracgs/extension.hpp"
#include "fracgs/groundstate.hpp"
#include "fracgs/kernels.hpp"
#include "fracgs/linearization.hpp"
#include "fracgs/spectral.hpp"

namespace fracgs::tools {
namespace fs = std::filesystem;
namespace {

constexpr double kPi = std::numbers::pi;

/// --L and --N come together or not at all.
std::optional<Grid> explicit_grid(const RunConfig& c) {
  if (c.length.has_value() != c.points.has_value()) {
    throw ConfigError("--L and --N must be given together");
  }
  if (!c.length) return std::nullopt;
  return Grid(*c.length, *c.points);
}

Grid grid_or(const RunConfig& c, const Grid& fallback) {
  const auto g = explicit_grid(c);
  return g ? *g : fallback;
}

double max_deviation_on(const Field& q, const std::function<double(double)>& profile, double radius) {
  double worst = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const double x = q.grid().node(j);
    if (std::abs(x) <= radius) worst = std::max(worst, std::abs(q[j] - profile(x)));
  }
  return worst;
}

void write_fields_csv(const fs::path& path, const Grid& grid, const std::vector<std::string>& names,
                      const std::vector<const Field*>& fields) {
  const std::vector<double> x = grid.nodes();
  std::vector<std::string> header{"x"};
  std::vector<std::span<const double>> cols{x};
  for (std::size_t i = 0; i < fields.size(); ++i) {
    header.push_back(names[i]);
    cols.push_back(fields[i]->values());
  }
  write_columns_csv(path, header, cols);
}

}  // namespace

Json cmd_solve(const RunConfig& config, const fs::path& out_dir) {
  const ModelParams& p = config.model;
  p.validate();
  Json trail = Json::array();
  GroundStateSolution sol = [&] {
    if (const auto grid = explicit_grid(config)) {
      SolverOptions o;
      o.tol = config.tol;
      o.certify = false;
      return solve_ground_state(p, *grid, std::nullopt, o);
    }
    auto c = solve_certified(p, 5e-6, std::size_t{1} << 22, config.tol);
    for (const auto& t : c.trail) trail.push_back({{"L", real(t[0])}, {"N", static_cast<std::size_t>(t[1])}, {"pohozaev", real(t[2])}});
    return std::move(c.solution);
  }();

  PropertyLedger ledger;
  ledger.holds("converged", sol.converged, sol.residual, "the fixed-point iteration converged");
  ledger.merge(check_symmetry_monotonicity(sol.q), "shape");
  Json decay = nullptr;
  try {
    sol.decay = decay_fit(sol.q, p.s);
    decay = to_json(sol.decay);
    ledger.holds("decay_law", true, sol.decay.algebraic ? sol.decay.exponent : sol.decay.rate,
                 p.s < 1.0 ? "Q decays like |x|^-(1+2s)" : "Q decays exponentially");
  } catch (const PropertyError& e) {
    ledger.holds("decay_law", false, 0.0, p.s < 1.0 ? "Q decays like |x|^-(1+2s)" : "Q decays exponentially",
                 e.what());
  }
  ledger.at_most("pohozaev_mass", sol.pohozaev.mass, 1e-5,
                 "lambda int Q^2 / 2 balances its multiple of int Q^(alpha+2)");
  ledger.at_most("pohozaev_seminorm", sol.pohozaev.seminorm, 1e-5,
                 "the H^s seminorm balances its multiple of int Q^(alpha+2)");

  // Closed forms rescaled by Q_lambda(x) = lambda^(1/alpha) Q_1(lambda^(1/2s) x).
  Json closed = nullptr;
  const double amp = std::pow(p.lambda, 1.0 / p.alpha);
  if (p.s == 0.5 && p.alpha == 1.0) {
    const double lam = p.lambda;
    const double dev =
        max_deviation_on(sol.q, [lam](double x) { return 2.0 * lam / (1.0 + lam * lam * x * x); }, 10.0) /
        (2.0 * amp);
    ledger.at_most("closed_form_deviation", dev, 1e-3, "the s=1/2, alpha=1 ground state is 2/(1+x^2)",
                   "relative max norm on |x| <= 10");
    closed = real(dev);
  } else if (p.s == 1.0) {
    const double sigma = p.alpha / 2.0, k = std::sqrt(p.lambda);
    const double dev = max_deviation_on(sol.q, [=](double x) {
      return amp * std::pow(sigma + 1.0, 0.5 / sigma) / std::pow(std::cosh(sigma * k * x), 1.0 / sigma);
    }, 10.0) / amp;
    ledger.at_most("closed_form_deviation", dev, 1e-8,
                   "the s=1 ground state is (sigma+1)^(1/2sigma) sech^(1/sigma)(sigma x), sigma=alpha/2",
                   "max norm on |x| <= 10, relative to lambda^(1/alpha)");
    closed = real(dev);
  }
  ledger.add(minimality_spot_check(sol.q, p.s, p.alpha, 20, config.seed));

  write_json(out_dir / "solution.json", to_json(sol));
  write_field_csv(out_dir / "q.csv", sol.q);
  Json results = {{"grid", to_json(sol.q.grid())},
                  {"weinstein", real(sol.weinstein_value)},
                  {"gn_constant", p.lambda == 1.0 ? real(1.0 / sol.weinstein_value) : Json()},
                  {"residual", real(sol.residual)},
                  {"iterations", sol.iterations},
                  {"fallback_steps", sol.fallback_steps},
                  {"pohozaev", to_json(sol.pohozaev)},
                  {"decay", decay},
                  {"closed_form_deviation", closed},
                  {"certification_trail", trail},
                  {"files", Json::array({"solution.json", "q.csv"})}};
  return make_report("solve", config, std::move(results), ledger);
}

Json cmd_spectrum(const RunConfig& config, const fs::path& out_dir) {
  AnalysisOptions options;
  options.seed = config.seed;
  LinearizationAnalysis a = [&] {
    if (config.solution) return analyze_linearization(solution_from_json(read_json(*config.solution)), options);
    config.model.validate();
    return analyze_linearization(config.model, grid_or(config, spectral_grid(config.model)), options);
  }();

  std::vector<std::string> names;
  std::vector<const Field*> fields;
  for (std::size_t i = 0; i < a.even.eigenfields.size(); ++i) {
    names.push_back("even_" + std::to_string(i));
    fields.push_back(&a.even.eigenfields[i]);
  }
  for (std::size_t i = 0; i < a.odd.eigenfields.size(); ++i) {
    names.push_back("odd_" + std::to_string(i));
    fields.push_back(&a.odd.eigenfields[i]);
  }
  write_fields_csv(out_dir / "eigenfields.csv", a.solution.q.grid(), names, fields);
  write_field_csv(out_dir / "q.csv", a.solution.q);

  Json results = {{"model", to_json(a.solution.params)},
                  {"grid", to_json(a.solution.q.grid())},
                  {"even", to_json(a.even)},
                  {"odd", to_json(a.odd)},
                  {"kernel", to_json(a.kernel)},
                  {"identities", to_json(a.identities)},
                  {"coercivity", to_json(a.coercivity)},
                  {"second_order", to_json(a.second_order)},
                  {"files", Json::array({"eigenfields.csv", "q.csv"})}};
  return make_report("spectrum", config, std::move(results), a.ledger);
}

Json cmd_continue(const RunConfig& config, const fs::path& out_dir) {
  const ModelParams& p = config.model;
  p.validate();
  const Grid grid = grid_or(config, Grid(256.0, 4096));
  ContinuationConfig cc;
  cc.newton_tol = config.tol;

  if (config.seeds > 1) {
    const auto rep = uniqueness_experiment(p, grid, seed_fields(grid, config.seeds, config.seed),
                                           config.target_s, cc);
    Json files = Json::array();
    for (std::size_t i = 0; i < rep.branches.size(); ++i) {
      const std::string name = "branch-" + std::to_string(i) + ".jsonl";
      write_branch_jsonl(out_dir / name, rep.branches[i]);
      files.push_back(name);
    }
    Json results = to_json(rep);
    results["files"] = files;
    return make_report("continue", config, std::move(results), rep.ledger);
  }

  SolverOptions o;
  o.tol = config.tol;
  o.certify = false;
  const auto gs = solve_ground_state(p, grid, std::nullopt, o);
  const Branch b = continue_branch(gs, config.target_s, cc);
  write_branch_jsonl(out_dir / "branch.jsonl", b);

  PropertyLedger ledger;
  ledger.merge(branch_ledger(b), "branch");
  Json limit = nullptr;
  if (b.termination == Termination::reached_target && !b.points.empty() && b.points.back().s >= 0.99) {
    const LimitReport lim = verify_limit(b);
    ledger.merge(lim.ledger, "limit");
    limit = to_json(lim);
  }
  Json results = {{"grid", to_json(grid)},
                  {"c0", real(b.c0)},
                  {"points", b.points.size()},
                  {"rejected_steps", b.rejected_steps},
                  {"termination", std::string(to_string(b.termination))},
                  {"diagnostic", b.diagnostic},
                  {"s_end", b.points.empty() ? Json() : real(b.points.back().s)},
                  {"lambda_end", b.points.empty() ? Json() : real(b.points.back().lambda)},
                  {"windows", to_json(b.windows)},
                  {"limit", limit},
                  {"files", Json::array({"branch.jsonl"})}};
  return make_report("continue", config, std::move(results), ledger);
}

Json cmd_kernels(const RunConfig& config, const fs::path& out_dir) {
  const double s = config.model.s, t = config.t, lambda = config.model.lambda;
  if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
  PropertyLedger ledger;

  // The s = 1 Gaussian tail drops under quadrature roundoff past x^2 / 4t = 25.
  const double heat_max = s == 1.0 ? std::min(50.0, 10.0 * std::sqrt(t)) : 50.0;
  const auto heat = heat_kernel(s, t, log_spaced(1e-2, heat_max, 64));
  ledger.merge(check_heat_kernel_bounds(heat), "heat");
  const double k0 = heat_kernel_at_origin(s, t);
  ledger.at_most("heat_origin", std::abs(heat_kernel_value(s, t, 0.0) - k0) / k0, 1e-8,
                 "K_t(0) = Gamma(1/2s) t^(-1/2s) / (2 pi s)");
  Json oracle = nullptr;
  if (s == 0.5 || s == 1.0) {
    double dev = 0.0;
    for (std::size_t i = 0; i < heat.x.size(); ++i) {
      const double x = heat.x[i];
      const double exact = s == 0.5 ? t / (kPi * (t * t + x * x))
                                    : std::exp(-x * x / (4 * t)) / std::sqrt(4 * kPi * t);
      dev = std::max(dev, std::abs(heat.values[i] - exact));
    }
    ledger.at_most("heat_oracle", dev, 1e-8,
                   s == 0.5 ? "at s=1/2 the heat kernel is t / (pi (t^2 + x^2))"
                            : "at s=1 the heat kernel is the Gaussian exp(-x^2/4t) / sqrt(4 pi t)");
    oracle = real(dev);
  }

  // At s = 1 the kernel decays like exp(-sqrt(lambda) |x|) and the oscillatory
  // route bottoms out near 1e-17 absolute; stop the table at sqrt(lambda) |x| = 20.
  const double x_max = s == 1.0 ? std::min(20.0, 20.0 / std::sqrt(lambda)) : 20.0;
  const auto res = resolvent_kernel(s, lambda, log_spaced(0.1, x_max, 40));
  ledger.merge(check_resolvent(res), "resolvent");
  if (s == 1.0) {
    const double k = std::sqrt(lambda);
    double dev = 0.0;
    for (std::size_t i = 0; i < res.x.size(); ++i) {
      const double exact = std::exp(-k * res.x[i]) / (2.0 * k);
      dev = std::max(dev, std::abs(res.values[i] - exact) / exact);
    }
    ledger.at_most("resolvent_oracle", dev, 1e-8, "at s=1 the resolvent kernel is exp(-sqrt(lambda)|x|) / (2 sqrt(lambda))");
  }
  const double mass = resolvent_mass(s, lambda);
  ledger.at_most("resolvent_mass", std::abs(mass - 1.0 / lambda), 1e-6, "int G = 1 / lambda");

  write_columns_csv(out_dir / "heat.csv", {"x", "value"}, {heat.x, heat.values});
  write_columns_csv(out_dir / "resolvent.csv", {"x", "laplace", "fourier", "deviation"},
                    {res.x, res.values, res.fourier, res.deviation});
  Json results = {{"heat_origin", real(k0)},
                  {"heat_oracle_deviation", oracle},
                  {"resolvent_route_deviation", real(*std::max_element(res.deviation.begin(), res.deviation.end()))},
                  {"resolvent_mass", real(mass)},
                  {"files", Json::array({"heat.csv", "resolvent.csv"})}};
  return make_report("kernels", config, std::move(results), ledger);
}

Json cmd_extend(const RunConfig& config, const fs::path& out_dir) {
  const double s = config.model.s;
  const double a = weight_exponent(s);
  const double ca = c_constant(a);
  const Grid grid = grid_or(config, Grid(64.0, 1024));
  PropertyLedger ledger;

  Json ratios = Json::object();
  for (const auto& [name, f] : energy_test_fields(grid)) {
    const double ratio = dirichlet_energy(extend(f, s, default_y_grid(grid), {true, config.seed})) /
                         (ca * hs_seminorm_sq(f, s));
    ledger.at_most("energy_" + name, std::abs(ratio - 1.0), 1e-3,
                   "the Dirichlet energy of the extension is c_a times the H^s seminorm");
    ratios[name] = real(ratio);
  }
  const double scalar = profile_energy(a);
  ledger.at_most("profile_energy", std::abs(scalar - ca), 1e-6, "int r^a (m'^2 + m^2) dr = c_a");
  const double mass = kernel_mass(a);
  ledger.at_most("kernel_mass", std::abs(mass - 1.0), 1e-8, "the Poisson kernel P_a(., y) has unit mass");

  double margin = INFINITY;
  for (const Field& f : trace_trial_fields(grid, 20, config.seed)) {
    const TraceTrial t = trace_trial(f, s);
    margin = std::min(margin, t.energy / t.bound - 1.0);
  }
  ledger.at_least("trace_strict", margin, 1e-3,
                  "a field that is not the extension of its trace has more energy than c_a |f|_{H^s}^2",
                  "smallest relative excess over 20 random fields");

  const Field gauss = energy_test_fields(grid).front().second;
  const auto u = extend(gauss, s, default_y_grid(grid), {true, config.seed});
  const auto n = neumann_trace(extend(gauss, s, default_y_grid(grid, 16)), {1e-1, 1e-2, 1e-3});
  ledger.holds("neumann_decreasing", n.decreasing, n.deviation.back(),
               "the weighted normal derivative approaches (-Delta)^s f as eps shrinks");

  write_extension_csv(out_dir / "extension.csv", u, std::max<std::size_t>(1, grid.size() / 256), 4);
  Json results = {{"a", real(a)},
                  {"c_a", real(ca)},
                  {"profile_energy", real(scalar)},
                  {"kernel_mass", real(mass)},
                  {"energy_ratio", ratios},
                  {"trace_margin", real(margin)},
                  {"neumann", {{"eps", reals(n.eps)}, {"deviation", reals(n.deviation)}}},
                  {"harmonicity_residual", real(harmonicity_residual(u))},
                  {"extension", descriptor(u)},
                  {"files", Json::array({"extension.csv"})}};
  return make_report("extend", config, std::move(results), ledger);
}

std::vector<int> parse_criteria(const std::string& list) {
  std::vector<int> ids;
  if (list.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) ids.push_back(i);
    return ids;
  }
  std::stringstream in(list);
  for (std::string item; std::getline(in, item, ',');) {
    std::size_t used = 0;
    int id = 0;
    try {
      id = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || id < 1 || id > kCriterionCount) {
      throw ConfigError("bad criterion id '" + item + "'");
    }
    ids.push_back(id);
  }
  return ids;
}

Json cmd_verify_all(const RunConfig& config, const fs::path& out_dir,
                    const std::function<void(const std::string&)>& log) {
  (void)out_dir;
  PropertyLedger ledger;
  Json rows = Json::array();
  auto progress = [&](const CriterionResult& r) {
    if (!log) return;
    char line[160];
    std::snprintf(line, sizeof line, "criterion %2d %s  %-40s %8.1f s", r.id,
                  r.ledger.all_passed() ? "PASS" : "FAIL", r.title.c_str(), r.seconds);
    log(line);
  };
  for (auto& r : run_criteria(parse_criteria(config.criteria), config.seed, progress)) {
    ledger.merge(r.ledger, "criterion_" + std::to_string(r.id));
    rows.push_back({{"id", r.id}, {"title", r.title}, {"passed", r.ledger.all_passed()},
                    {"seconds", real(r.seconds)}, {"results", std::move(r.results)}});
  }
  return make_report("verify-all", config, {{"criteria", rows}}, ledger);
}

Json run_command(const RunConfig& config, const fs::path& out_dir,
                 const std::function<void(const std::string&)>& log) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  Json report;
  if (config.command == "solve") report = cmd_solve(config, out_dir);
  else if (config.command == "spectrum") report = cmd_spectrum(config, out_dir);
  else if (config.command == "continue") report = cmd_continue(config, out_dir);
  else if (config.command == "kernels") report = cmd_kernels(config, out_dir);
  else if (config.command == "extend") report = cmd_extend(config, out_dir);
  else if (config.command == "verify-all") report = cmd_verify_all(config, out_dir, log);
  else throw ConfigError("unknown command '" + config.command + "'");
  write_json(out_dir / "report.json", report);
  return report;
}

}  // namespace fracgs::tools
