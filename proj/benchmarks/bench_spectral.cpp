#include <benchmark/benchmark.h>

#include "mixflow/field_ops.hpp"

using namespace mixflow;

namespace {

void bm_gradient(benchmark::State& state) {
    auto g = make_grid(3, 2.0 * 3.14159265358979323846, static_cast<int>(state.range(0)));
    ScalarField f = random_band_limited(g, g->dealias_cutoff(), 1);
    (void)f.values();
    for (auto _ : state) {
        VectorField grad = gradient(f);
        benchmark::DoNotOptimize(grad[0].values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}
BENCHMARK(bm_gradient)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_leray_project(benchmark::State& state) {
    auto g = make_grid(3, 2.0 * 3.14159265358979323846, static_cast<int>(state.range(0)));
    VectorField v(g);
    for (int c = 0; c < 3; ++c) v[c] = random_band_limited(g, g->dealias_cutoff(), 7 + c);
    for (auto _ : state) {
        VectorField p = leray_project(v);
        benchmark::DoNotOptimize(p[0].spectral().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}
BENCHMARK(bm_leray_project)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_spatial_norm(benchmark::State& state) {
    auto g = make_grid(3, 2.0 * 3.14159265358979323846, static_cast<int>(state.range(0)));
    ScalarField f = random_band_limited(g, g->dealias_cutoff(), 3);
    (void)f.values();
    for (auto _ : state) {
        benchmark::DoNotOptimize(spatial_norm(f, 3.0));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}
BENCHMARK(bm_spatial_norm)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
