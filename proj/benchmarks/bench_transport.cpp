#include <benchmark/benchmark.h>

#include "mixflow/solver.hpp"
#include "mixflow/transport.hpp"

using namespace mixflow;

namespace {

void bm_transport_react_step(benchmark::State& state) {
    auto g = make_grid(3, 2.0 * 3.14159265358979323846, static_cast<int>(state.range(0)));
    const ReactionModel model = ReactionModel::toymodel();
    InitialData init;
    init.a_amplitude = 0.05;
    const SpeciesState species = build_initial_species(g, model, init);
    VectorField u = random_solenoidal(g, 2, 5);
    u *= 0.1;
    TransportConfig cfg;
    for (auto _ : state) {
        TransportStepResult r = transport_react_step(species, model, u, 0.01, cfg);
        benchmark::DoNotOptimize(r.species.w.values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}
BENCHMARK(bm_transport_react_step)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void bm_advect(benchmark::State& state) {
    auto g = make_grid(3, 2.0 * 3.14159265358979323846, static_cast<int>(state.range(0)));
    ScalarField f = random_band_limited(g, 4, 9);
    VectorField u = random_solenoidal(g, 2, 13);
    u *= 0.1;
    TransportConfig cfg;
    cfg.interpolation = static_cast<Interpolation>(state.range(1));
    for (auto _ : state) {
        ScalarField out = advect_semilagrangian(f, u, 0.01, cfg);
        benchmark::DoNotOptimize(out.values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}
BENCHMARK(bm_advect)->Args({32, 0})->Args({32, 1})->Unit(benchmark::kMillisecond);

}  // namespace
