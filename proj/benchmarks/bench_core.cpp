#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "mcnls/envelope.hpp"
#include "mcnls/evolution.hpp"
#include "mcnls/ground_state.hpp"
#include "mcnls/morawetz.hpp"
#include "mcnls/projections.hpp"
#include "mcnls/weights.hpp"

using namespace mcnls;

namespace {

Field wave_packet(const GridSpec& g) {
  return Field::sample(g, [](const Point& x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return std::exp(-r2 / 2.0) * std::exp(Complex(0.0, 0.8 * x[0]));
  });
}

void BM_SpectralRoundTrip(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const GridSpec g = make_grid(d, static_cast<int>(state.range(1)), 12.0);
  const Field f = wave_packet(g);
  for (auto _ : state) benchmark::DoNotOptimize(to_physical(to_spectral(f)));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(g.size()));
}
BENCHMARK(BM_SpectralRoundTrip)->Args({1, 1024})->Args({1, 65536})->Args({2, 128})->Args({2, 512});

void BM_StrangStep(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const GridSpec g = make_grid(d, static_cast<int>(state.range(1)), 12.0);
  Field f = wave_packet(g);
  for (auto _ : state) {
    f = step_strang(f, 1e-3, -1.0);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_StrangStep)->Args({1, 1024})->Args({1, 32768})->Args({2, 256});

// Fused evolve over 100 steps: one linear half step per step on the hot path.
void BM_Evolve100(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const GridSpec g = make_grid(d, static_cast<int>(state.range(1)), 12.0);
  const Field f = wave_packet(g);
  EvolutionConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.1;
  cfg.stride = 100;
  for (auto _ : state) benchmark::DoNotOptimize(evolve(f, cfg));
}
BENCHMARK(BM_Evolve100)->Args({1, 1024})->Args({2, 128})->Unit(benchmark::kMillisecond);

void BM_Petviashvili(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const GridSpec g = make_grid(d, static_cast<int>(state.range(1)), 16.0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_petviashvili(g, 1e-12, 1000));
}
BENCHMARK(BM_Petviashvili)->Args({1, 1024})->Args({2, 128})->Unit(benchmark::kMillisecond);

void BM_CommutatorError(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const GridSpec g = make_grid(d, static_cast<int>(state.range(1)), 12.0);
  const Field f = wave_packet(g);
  for (auto _ : state) benchmark::DoNotOptimize(commutator_error(f, 2.0, 1.0));
}
BENCHMARK(BM_CommutatorError)->Args({1, 1024})->Args({2, 128});

void BM_BuildWeights(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_weights(d, static_cast<double>(state.range(1)), 4.0));
}
BENCHMARK(BM_BuildWeights)->Args({1, 8})->Args({1, 16})->Args({2, 8})->Unit(benchmark::kMillisecond);

void BM_InteractionAction(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const GridSpec g = make_grid(d, static_cast<int>(state.range(1)), 12.0);
  const Field f = wave_packet(g);
  const WeightFamily w = build_weights(d, 8.0, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(interaction_action(f, 1.0, w));
}
BENCHMARK(BM_InteractionAction)->Args({1, 1024})->Args({1, 8192})->Args({2, 64})->Args({2, 128});

void BM_InteractionFlux(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const GridSpec g = make_grid(d, static_cast<int>(state.range(1)), 12.0);
  const Field f = wave_packet(g);
  const WeightFamily w = build_weights(d, 8.0, 4.0);
  for (auto _ : state) benchmark::DoNotOptimize(interaction_flux(f, 1.0, 0.2, -1.0, w));
}
BENCHMARK(BM_InteractionFlux)->Args({1, 1024})->Args({2, 64})->Args({2, 128})->Unit(benchmark::kMillisecond);

PiecewiseEnvelope walk(std::size_t K) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> step(-1, 1);
  std::uniform_real_distribution<double> dur(0.05, 1.0);
  std::vector<int> e{0};
  std::vector<double> t{0.0};
  for (std::size_t i = 0; i < K; ++i) {
    e.push_back(std::min(0, e.back() + step(rng)));
    t.push_back(t.back() + dur(rng));
  }
  return PiecewiseEnvelope(2.0, std::move(t), std::move(e));
}

void BM_SmoothEnvelope(benchmark::State& state) {
  const PiecewiseEnvelope e = walk(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(smooth(e, 5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SmoothEnvelope)->RangeMultiplier(10)->Range(100, 100000)->Complexity();

void BM_CertifyRatio(benchmark::State& state) {
  const PiecewiseEnvelope e = walk(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(certify_ratio(e, 3));
}
BENCHMARK(BM_CertifyRatio)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
