#include <benchmark/benchmark.h>

#include <random>

#include "mixflow/lorentz.hpp"

using namespace mixflow;

namespace {

WeightedSamples make_samples(std::size_t count) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> value(0.0, 5.0);
    std::uniform_real_distribution<double> weight(0.01, 2.0);
    WeightedSamples s;
    for (std::size_t i = 0; i < count; ++i) {
        s.values.push_back(value(rng));
        s.weights.push_back(weight(rng));
    }
    return s;
}

void bm_lorentz_norm(benchmark::State& state) {
    const WeightedSamples s = make_samples(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(lorentz_norm(s, {4.0 / 3.0, 1.0}));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_lorentz_norm)->Arg(1000)->Arg(10000)->Arg(100000)->Unit(benchmark::kMicrosecond);

void bm_rearrangement(benchmark::State& state) {
    const WeightedSamples s = make_samples(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        WeightedSamples r = decreasing_rearrangement(s);
        benchmark::DoNotOptimize(r.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_rearrangement)->Arg(1000)->Arg(100000)->Unit(benchmark::kMicrosecond);

}  // namespace
