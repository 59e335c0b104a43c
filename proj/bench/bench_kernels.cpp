// Serial reference path against the OpenMP path for the data-parallel kernels.
// Arg 0 selects the policy: 0 = serial, 1 = parallel.

#include "donorqed/cavity.hpp"
#include "donorqed/coherence/experiments.hpp"

#include <benchmark/benchmark.h>

#include <vector>

using namespace donorqed;

namespace {

Exec policy(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void label(benchmark::State& state) {
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel x" + std::to_string(worker_count()));
}

void BM_EnsembleCpmg(benchmark::State& state) {
  coherence::NoiseModel noise;
  noise.S0 = 0.63;
  const auto seq = coherence::cpmg_sequence(8, 5.0);
  const auto trajectories = static_cast<std::size_t>(state.range(1));
  for (auto _ : state)
    benchmark::DoNotOptimize(coherence::evolve(coherence::QubitModel{}, seq, noise, trajectories, policy(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  label(state);
}
BENCHMARK(BM_EnsembleCpmg)->ArgsProduct({{0, 1}, {500, 4000}})->Unit(benchmark::kMillisecond);

void BM_HahnTrace(benchmark::State& state) {
  coherence::NoiseModel noise;
  noise.sigma_qs = coherence::sigma_for_t2star(1e-3);
  std::vector<double> taus;
  for (int i = 0; i < 40; ++i) taus.push_back(0.05 + 0.1 * i);
  for (auto _ : state)
    benchmark::DoNotOptimize(coherence::hahn_echo_experiment(coherence::QubitModel{}, taus, noise, {},
                                                             {static_cast<std::size_t>(state.range(1)), policy(state)}));
  label(state);
}
BENCHMARK(BM_HahnTrace)->ArgsProduct({{0, 1}, {2000}})->Unit(benchmark::kMillisecond);

void BM_StraggleCoupling(benchmark::State& state) {
  const cavity::StragglePlacement placement;
  const auto n = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(cavity::coupling_variation(placement, n, 1, policy(state)));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  label(state);
}
BENCHMARK(BM_StraggleCoupling)->ArgsProduct({{0, 1}, {100000, 1000000}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
