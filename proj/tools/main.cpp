#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include "commands.hpp"
#include "fracgs/errors.hpp"
#include "fracgs/io.hpp"

namespace {

using fracgs::Json;
using fracgs::RunConfig;

// Exit codes. 0 is reserved for an all-pass ledger.
constexpr int kLedgerFailed = 1;
constexpr int kUsage = 2;
constexpr int kIo = 3;
constexpr int kNumeric = 4;

struct Flags {
  double s = 0.5, alpha = 1.0, lambda = 1.0, length = 0.0, tol = 1e-10, target_s = 0.999, t = 1.0;
  std::size_t points = 0, seeds = 0;
  std::uint64_t seed = 1;
  std::string solution, out, criteria, config;
};

using OptionMap = std::map<std::string, CLI::Option*>;

OptionMap add_common(CLI::App* sub, Flags& f) {
  OptionMap m;
  m["s"] = sub->add_option("--s", f.s, "fractional order in (0, 1]");
  m["alpha"] = sub->add_option("--alpha", f.alpha, "nonlinearity exponent");
  m["lambda"] = sub->add_option("--lambda", f.lambda, "frequency (resolvent parameter for kernels)");
  m["L"] = sub->add_option("--L", f.length, "box length (with --N)");
  m["N"] = sub->add_option("--N", f.points, "number of nodes, a power of two (with --L)");
  m["tol"] = sub->add_option("--tol", f.tol, "solver and Newton tolerance");
  m["target-s"] = sub->add_option("--target-s", f.target_s, "continuation target order");
  m["seed"] = sub->add_option("--seed", f.seed, "seed for random trial fields");
  m["out"] = sub->add_option("--out", f.out, "output directory (default $FRACGS_OUT, then ./fracgs-out)");
  m["config"] = sub->add_option("--config", f.config, "re-run the config block of a report or config JSON")
                    ->check(CLI::ExistingFile);
  return m;
}

bool given(const OptionMap& m, const std::string& name) {
  const auto it = m.find(name);
  return it != m.end() && it->second->count() > 0;
}

RunConfig build_config(const std::string& command, const Flags& f, const OptionMap& m) {
  RunConfig c;
  if (given(m, "config")) {
    Json j = fracgs::read_json(f.config);
    if (j.contains("config")) j = j["config"];
    c = fracgs::run_config_from_json(j);
    if (c.command != command) {
      throw fracgs::ConfigError("config is for '" + c.command + "', not '" + command + "'");
    }
  }
  c.command = command;
  if (given(m, "s")) c.model.s = f.s;
  if (given(m, "alpha")) c.model.alpha = f.alpha;
  if (given(m, "lambda")) c.model.lambda = f.lambda;
  if (given(m, "L")) c.length = f.length;
  if (given(m, "N")) c.points = f.points;
  if (given(m, "tol")) c.tol = f.tol;
  if (given(m, "target-s")) c.target_s = f.target_s;
  if (given(m, "t")) c.t = f.t;
  if (given(m, "seed")) c.seed = f.seed;
  if (given(m, "seeds")) c.seeds = f.seeds;
  if (given(m, "solution")) c.solution = f.solution;
  if (given(m, "criteria")) c.criteria = f.criteria;
  if (given(m, "out")) c.out = f.out;
  return c;
}

int report_outcome(const Json& report, const std::filesystem::path& dir) {
  std::size_t total = 0, failed = 0;
  for (const auto& check : report["ledger"]) {
    ++total;
    if (check["status"] != "pass") {
      ++failed;
      std::cerr << "FAIL " << check["name"].get<std::string>() << ": value " << check["value"].dump()
                << ", tolerance " << check["tolerance"].dump();
      const std::string detail = check.value("detail", "");
      if (!detail.empty()) std::cerr << " (" << detail << ")";
      std::cerr << '\n';
    }
  }
  std::cout << report["command"].get<std::string>() << ": " << total - failed << "/" << total
            << " checks passed; report " << (dir / "report.json").string() << '\n';
  return failed == 0 && report["all_passed"].get<bool>() ? 0 : kLedgerFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ground states of the fractional NLS: solver, spectra, continuation and certificates"};
  app.require_subcommand(1);
  Flags f;
  std::map<CLI::App*, OptionMap> options;

  auto* solve = app.add_subcommand("solve", "solve for the ground state and certify it");
  options[solve] = add_common(solve, f);
  auto* spectrum = app.add_subcommand("spectrum", "spectrum of the linearized operator L+");
  options[spectrum] = add_common(spectrum, f);
  options[spectrum]["solution"] =
      spectrum->add_option("--solution", f.solution, "stored solution.json instead of an inline solve");
  auto* cont = app.add_subcommand("continue", "continue the ground state in s");
  options[cont] = add_common(cont, f);
  options[cont]["seeds"] = cont->add_option("--seeds", f.seeds, "number of start fields (> 1: uniqueness run)");
  auto* kernels = app.add_subcommand("kernels", "heat and resolvent kernels");
  options[kernels] = add_common(kernels, f);
  options[kernels]["t"] = kernels->add_option("--t", f.t, "heat kernel time");
  auto* ext = app.add_subcommand("extend", "weighted harmonic extension certificates");
  options[ext] = add_common(ext, f);
  auto* verify = app.add_subcommand("verify-all", "run the acceptance criteria");
  options[verify] = add_common(verify, f);
  options[verify]["criteria"] =
      verify->add_option("--criteria", f.criteria, "comma-separated criterion ids (default all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  try {
    const RunConfig config = build_config(sub->get_name(), f, options[sub]);
    const auto dir = fracgs::output_root(config.out.empty() ? std::nullopt : std::optional(config.out));
    const Json report = fracgs::tools::run_command(config, dir, [](const std::string& line) {
      std::cout << line << std::endl;
    });
    return report_outcome(report, dir);
  } catch (const fracgs::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const fracgs::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const fracgs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumeric;
  }
}
