#include <benchmark/benchmark.h>

#include <cmath>

#include "pipeline.hpp"
#include "toda/direct.hpp"
#include "toda/forward.hpp"
#include "toda/inverse.hpp"

using namespace toda;

static void BM_Forward(benchmark::State& st) {
  auto s = lattice::make_step_profile({});
  forward::ForwardOptions o;
  o.grid_size = static_cast<int>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(forward::full_forward(s, o));
}
BENCHMARK(BM_Forward)->Arg(256)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);

static void BM_Marchenko(benchmark::State& st) {
  const int nmin = -static_cast<int>(st.range(0)), K = 2 * static_cast<int>(st.range(0)) + 40;
  inverse::MarchenkoKernel F;
  F.x_min = 2 * nmin - 2 * K;
  for (int x = F.x_min; x <= 0; ++x) F.F.push_back(0.8 * std::pow(0.5, -x) + 1e-3 * std::cos(0.7 * x) / (1 + x * x));
  for (auto _ : st) benchmark::DoNotOptimize(inverse::solve_marchenko(F, nmin, K));
}
BENCHMARK(BM_Marchenko)->Arg(30)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

static void BM_RK4(benchmark::State& st) {
  auto s = lattice::make_step_profile({});
  for (auto _ : st) benchmark::DoNotOptimize(direct::integrate_rk4(s, 1.0, 1e-3));
}
BENCHMARK(BM_RK4)->Unit(benchmark::kMillisecond);

static void BM_Roundtrip(benchmark::State& st) {
  pipeline::RunConfig c;
  for (auto _ : st) benchmark::DoNotOptimize(pipeline::roundtrip(c));
}
BENCHMARK(BM_Roundtrip)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
