#include "frobpair/cobordism.hpp"
#include "frobpair/cube.hpp"
#include "frobpair/pair.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace frobpair;

static void BM_VerifyAps(benchmark::State& state) {
  auto pair = build_aps();
  const Theory& th = default_theory();
  for (auto _ : state) benchmark::DoNotOptimize(verify(pair, th));
}
BENCHMARK(BM_VerifyAps)->Unit(benchmark::kMillisecond);

static void BM_VerifyLaurentSqrt(benchmark::State& state) {
  auto pair = build_laurent_sqrt();
  const Theory& th = default_theory();
  for (auto _ : state) benchmark::DoNotOptimize(verify(pair, th));
}
BENCHMARK(BM_VerifyLaurentSqrt)->Unit(benchmark::kMillisecond);

static void BM_DiamondSuite(benchmark::State& state) {
  auto pair = build_tt();
  for (auto _ : state) benchmark::DoNotOptimize(diamond_exchange_suite(pair));
}
BENCHMARK(BM_DiamondSuite)->Unit(benchmark::kMillisecond);

static void BM_SmithNormalForm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 g(1);
  std::uniform_int_distribution<int> v(-9, 9);
  IntMatrix m(n, std::vector<mpz_class>(n));
  for (auto& row : m)
    for (auto& x : row) x = v(g);
  for (auto _ : state) benchmark::DoNotOptimize(smith_normal_form(m));
}
BENCHMARK(BM_SmithNormalForm)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

// Differentials of one random cube per crossing count.
static void BM_Differential(benchmark::State& state) {
  std::mt19937_64 g(2);
  RandomCubeOptions opt;
  opt.crossings = static_cast<std::size_t>(state.range(0));
  opt.max_circles = 5;
  std::optional<StateCube> cube;
  while (!cube) cube = random_cube(g, opt);
  auto pair = build_aps();
  for (auto _ : state)
    for (std::size_t i = 0; i < cube->n; ++i) benchmark::DoNotOptimize(differential(*cube, pair, i));
}
BENCHMARK(BM_Differential)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
