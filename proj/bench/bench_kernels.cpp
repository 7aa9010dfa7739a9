#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "pskfade/execution.hpp"
#include "pskfade/mc_sim.hpp"
#include "pskfade/mutual_info.hpp"
#include "pskfade/prediction.hpp"

using namespace pskfade;
using spectral::SpectrumModel;

namespace {

Execution mode(const benchmark::State& state) {
    return state.range(0) == 0 ? Execution::Serial : Execution::Parallel;
}

void label(benchmark::State& state) {
    state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_RecursiveTraining(benchmark::State& state) {
    sim::SimConfig config;
    config.model = SpectrumModel::gauss_markov_d(1e-2);
    config.rho = 1.0;
    config.L = 200;
    config.trials = 20000;
    config.seed = 7;
    config.execution = mode(state);
    for (auto _ : state) benchmark::DoNotOptimize(sim::run_recursive_training(config));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.trials));
    label(state);
}

void BM_TransientSequence(benchmark::State& state) {
    const auto model = SpectrumModel::gauss_markov_d(1e-3);
    for (auto _ : state)
        benchmark::DoNotOptimize(prediction::transient_error_sequence(model, 10.0, 400, mode(state)));
    label(state);
}

void BM_InducedChannelRates(benchmark::State& state) {
    const auto model = SpectrumModel::gauss_markov_d(1e-4);
    std::vector<double> rhos;
    for (int i = 0; i <= 40; ++i) rhos.push_back(std::pow(10.0, (-30.0 + 0.5 * i) / 10.0));
    const mi::PskConstellation qpsk(4);
    for (auto _ : state) benchmark::DoNotOptimize(mi::induced_channel_rates(model, rhos, qpsk, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rhos.size()));
    label(state);
}

}  // namespace

BENCHMARK(BM_RecursiveTraining)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TransientSequence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_InducedChannelRates)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
