// Serial reference vs OpenMP kernels. Each benchmark takes the execution
// policy as its second argument: 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "kemeny/chain.hpp"
#include "kemeny/ctmc.hpp"
#include "kemeny/diffusion.hpp"
#include "kemeny/sim.hpp"
#include "kemeny/specio.hpp"
#include "support/random_models.hpp"

using namespace kemeny;

namespace {

Exec policy(const benchmark::State& state) {
  return state.range(1) == 0 ? Exec::Serial : Exec::Parallel;
}

TransitionMatrix chain(std::size_t n) {
  std::mt19937_64 rng(n);
  return validate_stochastic(
      kemeny::testing::random_stochastic(n, kemeny::testing::Sparsity::Dense, rng));
}

void BM_KemenyFunction(benchmark::State& state) {
  const auto p = chain(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kemeny_function(p, policy(state)));
}
BENCHMARK(BM_KemenyFunction)
    ->ArgsProduct({{16, 64, 128}, {0, 1}})
    ->Unit(benchmark::kMillisecond);

void BM_KemenyFunctionCt(benchmark::State& state) {
  std::mt19937_64 rng(7);
  const auto q = validate_generator(kemeny::testing::random_generator(
      static_cast<std::size_t>(state.range(0)), kemeny::testing::Sparsity::Dense, rng));
  for (auto _ : state) benchmark::DoNotOptimize(kemeny_function_ct(q, policy(state)));
}
BENCHMARK(BM_KemenyFunctionCt)->ArgsProduct({{64}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_KemenyProfile(benchmark::State& state) {
  const auto a = build_analysis(load_diffusion_spec(KEMENY_FIXTURE_DIR "/bessel.json").spec);
  const auto grid = chebyshev_grid(a.spec(), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kemeny_profile(a, grid, policy(state)));
}
BENCHMARK(BM_KemenyProfile)->ArgsProduct({{21}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_MonteCarloDtmc(benchmark::State& state) {
  const auto p = chain(16);
  McOptions opts;
  opts.exec = policy(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        estimate_kemeny_dtmc(p, 0, static_cast<std::uint64_t>(state.range(0)), opts));
}
BENCHMARK(BM_MonteCarloDtmc)->ArgsProduct({{100000}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_MonteCarloDiffusion(benchmark::State& state) {
  const auto a = build_analysis(load_diffusion_spec(KEMENY_FIXTURE_DIR "/bessel.json").spec);
  McOptions opts;
  opts.exec = policy(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        estimate_hitting_diffusion(a, 1.0, 0.5, static_cast<std::uint64_t>(state.range(0)), opts));
}
BENCHMARK(BM_MonteCarloDiffusion)->ArgsProduct({{200}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
