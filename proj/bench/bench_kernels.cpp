#include <benchmark/benchmark.h>

#include <vector>

#include "gms/excursion.hpp"
#include "gms/model.hpp"
#include "gms/parallel.hpp"
#include "gms/rng.hpp"

using namespace gms;

namespace {

const ModelParams kCritical = ModelParams::critical(0.6);

void BM_ReducedSteps(benchmark::State& state) {
  const PrimitiveStream stream(1, kCritical.q());
  for (auto _ : state) {
    ReducedState s;
    advance_reduced(s, kCritical, stream, state.range(0));
    benchmark::DoNotOptimize(s.Delta);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ReducedSteps)->Arg(1 << 20);

void BM_FullSteps(benchmark::State& state) {
  for (auto _ : state) {
    const auto series = run_trajectory(kCritical, state.range(0), 1, SimMode::kFull);
    benchmark::DoNotOptimize(series.terminal.Delta);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FullSteps)->Arg(1 << 18);

// Replica loop over independent trajectories: serial reference vs OpenMP.
template <bool Parallel>
void BM_Replicas(benchmark::State& state) {
  const std::int64_t replicas = 64;
  const std::int64_t steps = 1 << 16;
  std::vector<std::int64_t> out(replicas);
  const auto body = [&](std::int64_t r) {
    const PrimitiveStream stream(derive_seed(3, static_cast<std::uint64_t>(r)), kCritical.q());
    ReducedState s;
    advance_reduced(s, kCritical, stream, steps);
    out[static_cast<std::size_t>(r)] = s.Delta;
  };
  for (auto _ : state) {
    if constexpr (Parallel) {
      for_each_replica(replicas, 0, body);
    } else {
      for_each_replica_serial(replicas, body);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * replicas * steps);
}
BENCHMARK_TEMPLATE(BM_Replicas, false)->Name("BM_Replicas/serial")->UseRealTime();
BENCHMARK_TEMPLATE(BM_Replicas, true)->Name("BM_Replicas/openmp")->UseRealTime();

template <WalkMethod Method>
void BM_HittingTime(benchmark::State& state) {
  PhiloxEngine engine(5, StreamDomain::kRandomWalk);
  const std::int64_t start = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hitting_time(engine, start, 0.5, 10'000'000, Method));
  }
}
BENCHMARK_TEMPLATE(BM_HittingTime, WalkMethod::kLeaping)->Name("BM_HittingTime/leaping")->Arg(1)->Arg(64);
BENCHMARK_TEMPLATE(BM_HittingTime, WalkMethod::kStepwise)->Name("BM_HittingTime/stepwise")->Arg(1)->Arg(64);

void BM_Excursions(benchmark::State& state) {
  ExcursionSampler sampler(kCritical, 9, 1'000'000'000);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sampler.next());
  }
}
BENCHMARK(BM_Excursions);

}  // namespace

BENCHMARK_MAIN();
