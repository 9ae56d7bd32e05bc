#include <benchmark/benchmark.h>

#include "mixflow/solver.hpp"
#include "mixflow/stokes.hpp"

using namespace mixflow;

namespace {

void bm_stokes_implicit_step(benchmark::State& state) {
    auto g = make_grid(3, 2.0 * 3.14159265358979323846, static_cast<int>(state.range(0)));
    VectorField u = random_solenoidal(g, 3, 17);
    VectorField f = random_solenoidal(g, 3, 19);
    (void)u[0].spectral();
    (void)f[0].spectral();
    for (auto _ : state) {
        FlowState next = stokes_implicit_step(u, f, 1.0, 0.01);
        benchmark::DoNotOptimize(next.u[0].spectral().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}
BENCHMARK(bm_stokes_implicit_step)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void bm_momentum_forcing(benchmark::State& state) {
    auto g = make_grid(3, 2.0 * 3.14159265358979323846, static_cast<int>(state.range(0)));
    const ReactionModel model = ReactionModel::toymodel();
    InitialData init;
    init.a_amplitude = 0.05;
    const SpeciesState species = build_initial_species(g, model, init);
    const ViscosityModel vmodel{1.0, {0.05, 0.05, 0.05, 0.05}, 0.1};
    VectorField u = random_solenoidal(g, 3, 23);
    u *= 0.1;
    for (auto _ : state) {
        ForcingParts parts = momentum_forcing(species, species, vmodel, u, u, nullptr);
        benchmark::DoNotOptimize(parts.total[0].values().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g->size()));
}
BENCHMARK(bm_momentum_forcing)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
