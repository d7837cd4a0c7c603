#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "fracgs/errors.hpp"
#include "fracgs/io.hpp"

namespace fracgs {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("fracgs-io-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST(RealTextTest, RoundTripsEveryBitPattern) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20000; ++i) {
    double v;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    EXPECT_TRUE(same_bits(parse_real(format_real(v)), v)) << format_real(v);
  }
  for (double v : {0.0, -0.0, 1.0 / 3.0, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max()}) {
    EXPECT_TRUE(same_bits(parse_real(format_real(v)), v));
  }
  EXPECT_TRUE(std::isnan(parse_real(format_real(std::nan("")))));
  EXPECT_EQ(parse_real(format_real(-INFINITY)), -INFINITY);
  EXPECT_EQ(format_real(0.1), "0.10000000000000001");
}

TEST(RealTextTest, RejectsJunk) {
  EXPECT_THROW(parse_real(""), IoError);
  EXPECT_THROW(parse_real("1.5x"), IoError);
  EXPECT_THROW(parse_real("abc"), IoError);
}

Field sample_field() {
  return Field::sample(Grid(12.5, 64), [](double x) { return std::exp(-x * x) / 3.0 + 1e-300 * x; });
}

TEST(FieldIoTest, CsvRoundTripIsExact) {
  TempDir dir;
  const Field f = sample_field();
  write_field_csv(dir.path() / "f.csv", f);
  const Field g = read_field_csv(dir.path() / "f.csv");
  ASSERT_TRUE(g.grid() == f.grid());
  for (std::size_t j = 0; j < f.size(); ++j) EXPECT_TRUE(same_bits(f[j], g[j]));
  std::ifstream in(dir.path() / "f.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "x,value");
}

TEST(FieldIoTest, JsonRoundTripIsExact) {
  Field f = sample_field();
  f.symmetrize(Parity::even);
  f.set_parity(Parity::even);
  const Field g = field_from_json(Json::parse(to_json(f).dump()));
  EXPECT_EQ(g.parity(), Parity::even);
  for (std::size_t j = 0; j < f.size(); ++j) EXPECT_TRUE(same_bits(f[j], g[j]));
}

TEST(FieldIoTest, MalformedInputsAreIoErrors) {
  TempDir dir;
  EXPECT_THROW(read_field_csv(dir.path() / "missing.csv"), IoError);
  EXPECT_THROW(read_json(dir.path() / "missing.json"), IoError);
  fs::create_directories(dir.path());
  std::ofstream(dir.path() / "bad.csv") << "x,value\n0,1\n1,2\n5,3\n";
  EXPECT_THROW(read_field_csv(dir.path() / "bad.csv"), IoError);
  std::ofstream(dir.path() / "bad.json") << "{ not json";
  EXPECT_THROW(read_json(dir.path() / "bad.json"), IoError);
}

TEST(SolutionIoTest, RoundTripThroughFile) {
  TempDir dir;
  GroundStateSolution s{ModelParams{0.7, 1.5, 2.0}, sample_field()};
  s.weinstein_value = 0.123456789012345678;
  s.pohozaev = {1e-7, 2e-7};
  s.decay.algebraic = false;
  s.decay.exponent = std::nan("");
  s.decay.rate = 1.5;
  s.residual = 3e-11;
  s.iterations = 41;
  s.converged = true;
  write_json(dir.path() / "sol.json", to_json(s));
  const auto t = solution_from_json(read_json(dir.path() / "sol.json"));
  EXPECT_EQ(t.params.s, 0.7);
  EXPECT_EQ(t.params.lambda, 2.0);
  EXPECT_EQ(t.weinstein_value, s.weinstein_value);
  EXPECT_TRUE(std::isnan(t.decay.exponent));
  EXPECT_FALSE(t.decay.algebraic);
  EXPECT_EQ(t.iterations, 41u);
  EXPECT_TRUE(t.converged);
  for (std::size_t j = 0; j < s.q.size(); ++j) EXPECT_TRUE(same_bits(s.q[j], t.q[j]));

  Json j = to_json(s);
  j["schema_version"] = kSchemaVersion + 1;
  EXPECT_THROW(solution_from_json(j), IoError);
  j = to_json(s);
  j.erase("q");
  EXPECT_THROW(solution_from_json(j), IoError);
}

TEST(LedgerIoTest, RoundTripAndReport) {
  PropertyLedger l;
  l.at_most("small", 1e-9, 1e-8, "a tiny number", "detail text");
  l.at_least("big", 0.5, 1.0, "a failing bound");
  const auto back = ledger_from_json(Json::parse(to_json(l).dump()));
  ASSERT_EQ(back.checks().size(), 2u);
  EXPECT_TRUE(back.checks()[0].passed);
  EXPECT_FALSE(back.checks()[1].passed);
  EXPECT_EQ(back.checks()[0].detail, "detail text");
  EXPECT_EQ(back.checks()[1].tolerance, 1.0);

  RunConfig c;
  c.command = "solve";
  c.length = 40.0;
  const Json r = make_report("solve", c, {{"x", 1}}, l);
  EXPECT_EQ(r["schema_version"], kSchemaVersion);
  EXPECT_FALSE(r["all_passed"].get<bool>());
  EXPECT_EQ(r["ledger"][1]["status"], "fail");
}

TEST(RunConfigIoTest, RoundTrip) {
  RunConfig c;
  c.command = "continue";
  c.model = {0.55, 1.25, 3.0};
  c.points = 2048;
  c.tol = 1e-11;
  c.target_s = 0.7;
  c.seed = 99;
  c.seeds = 3;
  c.solution = "sol.json";
  c.criteria = "1,9";
  c.out = "dir";
  const auto d = run_config_from_json(Json::parse(to_json(c).dump()));
  EXPECT_EQ(d.command, "continue");
  EXPECT_EQ(d.model.alpha, 1.25);
  EXPECT_FALSE(d.length.has_value());
  EXPECT_EQ(d.points, 2048u);
  EXPECT_EQ(d.seed, 99u);
  EXPECT_EQ(d.seeds, 3u);
  EXPECT_EQ(d.solution, "sol.json");
  EXPECT_EQ(d.criteria, "1,9");
  EXPECT_EQ(to_json(d), to_json(c));
}

TEST(BranchIoTest, JsonLinesRoundTrip) {
  TempDir dir;
  Branch b;
  b.alpha = 2;
  b.s0 = 0.9;
  b.c0 = 4.0 / 3.0;
  b.s_target = 0.95;
  b.newton_tol = 1e-10;
  b.termination = Termination::monitor_failure;
  b.diagnostic = "lambda left its window";
  b.windows.calibrated = true;
  b.windows.lambda_hi = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    BranchPoint p{0.9 + 0.01 * i, 1.0 + i / 7.0, sample_field(), {}};
    p.monitors.morse_even = 1;
    p.monitors.newton_iterations = 3 + i;
    p.monitors.pohozaev.mass = 1e-9 * i;
    p.monitors.positive = true;
    b.points.push_back(std::move(p));
  }
  write_branch_jsonl(dir.path() / "b.jsonl", b);
  std::ifstream in(dir.path() / "b.jsonl");
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line);) ++lines;
  EXPECT_EQ(lines, 4u);

  const Branch c = read_branch_jsonl(dir.path() / "b.jsonl");
  EXPECT_EQ(c.termination, Termination::monitor_failure);
  EXPECT_EQ(c.diagnostic, b.diagnostic);
  EXPECT_EQ(c.c0, b.c0);
  EXPECT_TRUE(std::isinf(c.windows.lambda_hi));
  ASSERT_EQ(c.points.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(c.points[i].s, b.points[i].s);
    EXPECT_EQ(c.points[i].lambda, b.points[i].lambda);
    EXPECT_EQ(c.points[i].monitors.newton_iterations, b.points[i].monitors.newton_iterations);
    EXPECT_EQ(c.points[i].monitors.pohozaev.mass, b.points[i].monitors.pohozaev.mass);
    EXPECT_TRUE(c.points[i].monitors.positive);
    for (std::size_t j = 0; j < b.points[i].q.size(); ++j) EXPECT_TRUE(same_bits(c.points[i].q[j], b.points[i].q[j]));
  }

  // wrong header, then a file missing its last point
  std::ofstream(dir.path() / "bad.jsonl") << to_json(b.windows).dump() << "\n";
  EXPECT_THROW(read_branch_jsonl(dir.path() / "bad.jsonl"), IoError);
  {
    std::ifstream full(dir.path() / "b.jsonl");
    std::ofstream cut(dir.path() / "cut.jsonl");
    std::string line;
    for (int i = 0; i < 3 && std::getline(full, line); ++i) cut << line << '\n';
  }
  EXPECT_THROW(read_branch_jsonl(dir.path() / "cut.jsonl"), IoError);
}

TEST(ExtensionIoTest, CsvAndDescriptor) {
  TempDir dir;
  const Grid g(10.0, 32);
  const auto u = extend(Field::sample(g, [](double x) { return std::exp(-x * x); }), 0.4, default_y_grid(g, 12));
  write_extension_csv(dir.path() / "u.csv", u, 4, 3);
  std::ifstream in(dir.path() / "u.csv");
  std::size_t rows = 0;
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x,y,u");
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 8u * 4u);
  const Json d = descriptor(u);
  EXPECT_EQ(d["levels"], 12);
  EXPECT_EQ(d["kind"], "extension");
  EXPECT_NEAR(d["a"].get<double>(), 0.2, 1e-15);
}

TEST(OutputRootTest, FlagThenEnvironmentThenDefault) {
  const char* saved = std::getenv("FRACGS_OUT");
  const std::string keep = saved ? saved : "";
  ::setenv("FRACGS_OUT", "/tmp/from-env", 1);
  EXPECT_EQ(output_root(std::string("flag")), fs::path("flag"));
  EXPECT_EQ(output_root(std::nullopt), fs::path("/tmp/from-env"));
  ::unsetenv("FRACGS_OUT");
  EXPECT_EQ(output_root(std::nullopt), fs::path("fracgs-out"));
  if (saved) ::setenv("FRACGS_OUT", keep.c_str(), 1);
}

}  // namespace
}  // namespace fracgs
