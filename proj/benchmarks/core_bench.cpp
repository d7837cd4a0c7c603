#include <benchmark/benchmark.h>

#include <cmath>

#include "fracgs/continuation.hpp"
#include "fracgs/extension.hpp"
#include "fracgs/groundstate.hpp"
#include "fracgs/kernels.hpp"
#include "fracgs/linearization.hpp"
#include "fracgs/spectral.hpp"

namespace {

using namespace fracgs;

Field bump(const Grid& g) {
  return Field::sample(g, [](double x) { return std::exp(-x * x); }, Parity::even);
}

void BM_ApplySymbol(benchmark::State& state) {
  const Grid g(64.0, static_cast<std::size_t>(state.range(0)));
  const Field f = bump(g);
  const SymbolSpec spec{0.5, 1.0, -1.0, false};
  for (auto _ : state) benchmark::DoNotOptimize(apply_symbol(f, spec));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplySymbol)->RangeMultiplier(4)->Range(1 << 10, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_SolveGroundState(benchmark::State& state) {
  const ModelParams p{state.range(0) / 10.0, 1.0, 1.0};
  const Grid g(256.0, 4096);
  SolverOptions o;
  o.certify = false;
  for (auto _ : state) benchmark::DoNotOptimize(solve_ground_state(p, g, std::nullopt, o));
}
BENCHMARK(BM_SolveGroundState)->Arg(5)->Arg(7)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_EvenSpectrum(benchmark::State& state) {
  const ModelParams p{0.5, 1.0, 1.0};
  SolverOptions o;
  o.certify = false;
  const auto sol = solve_ground_state(p, Grid(128.0, static_cast<std::size_t>(state.range(0))), std::nullopt, o);
  for (auto _ : state) {
    const SectorMatrix m = build_lplus(sol.q, p, Parity::even);
    benchmark::DoNotOptimize(spectrum(m, 3, 1e-6));
  }
}
BENCHMARK(BM_EvenSpectrum)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_ContinuationStep(benchmark::State& state) {
  const ModelParams p{0.9, 2.0, 1.0};
  SolverOptions o;
  o.certify = false;
  const auto gs = solve_ground_state(p, Grid(64.0, 1024), std::nullopt, o);
  ContinuationConfig c;
  c.ds_init = c.ds_max = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(continue_branch(gs, 0.91, c));
}
BENCHMARK(BM_ContinuationStep)->Unit(benchmark::kMillisecond);

void BM_Extend(benchmark::State& state) {
  const Grid g(64.0, static_cast<std::size_t>(state.range(0)));
  const Field f = bump(g);
  const auto y = default_y_grid(g);
  for (auto _ : state) benchmark::DoNotOptimize(extend(f, 0.3, y, {false, 1}));
}
BENCHMARK(BM_Extend)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_HeatKernelValue(benchmark::State& state) {
  const double s = state.range(0) / 10.0;
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(heat_kernel_value(s, 1.0, x));
    x = x < 40.0 ? x * 1.3 : 0.1;
  }
}
BENCHMARK(BM_HeatKernelValue)->Arg(3)->Arg(5)->Arg(9);

}  // namespace

BENCHMARK_MAIN();
