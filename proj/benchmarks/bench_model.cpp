#include <benchmark/benchmark.h>

#include "blockprop/fork_security.hpp"
#include "blockprop/gossip_sim.hpp"
#include "blockprop/propagation.hpp"

using namespace blockprop;

static void BM_StateSpace(benchmark::State& state) {
    const ChainParams p{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(build_state_space(p));
}
BENCHMARK(BM_StateSpace)->Args({20, 6})->Args({50, 8})->Args({50, 25});

static void BM_FailureModel(benchmark::State& state) {
    const ChainParams p{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(FailureModel(p));
}
BENCHMARK(BM_FailureModel)->Args({20, 2})->Args({50, 2})->Args({50, 25})->Unit(benchmark::kMillisecond);

static void BM_PropagationModel(benchmark::State& state) {
    const ChainParams p{static_cast<int>(state.range(0)), static_cast<int>(state.range(1))};
    for (auto _ : state) benchmark::DoNotOptimize(PropagationModel(p));
}
BENCHMARK(BM_PropagationModel)->Args({10, 2})->Args({30, 8})->Args({50, 1})->Args({50, 25})
    ->Unit(benchmark::kMillisecond);

// Re-evaluating a built model at a new network setting is what sweeps do.
static void BM_TradeoffFromModel(benchmark::State& state) {
    const PropagationModel model({30, 8});
    double tb = 600.0;
    for (auto _ : state) {
        const auto profile = model.profile(NetworkParams::from_megabytes(10.0, 1.0, tb));
        benchmark::DoNotOptimize(evaluate_tradeoff(profile, SecurityParams{}));
        tb = tb > 1.0 ? tb * 0.9 : 600.0;
    }
}
BENCHMARK(BM_TradeoffFromModel);

static void BM_ModificationProbability(benchmark::State& state) {
    const double q = static_cast<double>(state.range(0)) / 100.0;
    for (auto _ : state) benchmark::DoNotOptimize(modification_probability(1.0 - q, q, 6));
}
BENCHMARK(BM_ModificationProbability)->Arg(10)->Arg(30)->Arg(45);

static void BM_SimulatePropagation(benchmark::State& state) {
    SimConfig cfg{{static_cast<int>(state.range(0)), 2}, NetworkParams::from_megabytes(10.0, 1.0, 600.0), 1000, 1,
                  SimMode::forking};
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(simulate(cfg));
    state.SetItemsProcessed(state.iterations() * cfg.replications);
}
BENCHMARK(BM_SimulatePropagation)->Arg(10)->Arg(30)->Unit(benchmark::kMillisecond);

static void BM_SimulateRace(benchmark::State& state) {
    RaceConfig cfg;
    cfg.p = 0.8;
    cfg.q = 0.2;
    cfg.replications = 10000;
    cfg.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(simulate_race(cfg));
    state.SetItemsProcessed(state.iterations() * cfg.replications);
}
BENCHMARK(BM_SimulateRace)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
