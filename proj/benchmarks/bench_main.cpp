#include <benchmark/benchmark.h>

#include <vector>

#include "cbboost/boost.hpp"
#include "cbboost/confidence.hpp"
#include "cbboost/synth.hpp"

using namespace cbboost;

namespace {

void BM_StumpTrain(benchmark::State& state)
{
    const Dataset ds = gen_normal(static_cast<std::size_t>(state.range(0)), 1);
    const StumpTrainer trainer(ds.features());
    const std::vector<double> w(ds.size(), 1.0 / static_cast<double>(ds.size()));
    for (auto _ : state)
        benchmark::DoNotOptimize(trainer.train(ds.labels(), w));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StumpTrain)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_KnnConfidence(benchmark::State& state)
{
    const NoisyDataset noisy = inject_label_noise(gen_sine(static_cast<std::size_t>(state.range(0)), 2), 0.2, 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_confidence(noisy.data, {}));
}
BENCHMARK(BM_KnnConfidence)->Arg(250)->Arg(500)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Boost(benchmark::State& state, bool cb)
{
    const NoisyDataset noisy = inject_label_noise(gen_normal(500, 4), 0.2, 5);
    const ConfidenceVector gamma = estimate_confidence(noisy.data, {}).gamma;
    BoostConfig cfg;
    cfg.max_iterations = static_cast<std::size_t>(state.range(0));
    cfg.record_trace = false;
    for (auto _ : state) {
        if (cb)
            benchmark::DoNotOptimize(train_cb_adaboost(noisy.data, gamma, cfg));
        else
            benchmark::DoNotOptimize(train_adaboost(noisy.data, cfg));
    }
}
BENCHMARK_CAPTURE(BM_Boost, adaboost, false)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Boost, cb, true)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

} // namespace
