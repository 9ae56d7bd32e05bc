#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixflow/solver.hpp"

using namespace mixflow;

namespace {

constexpr double kPi = std::numbers::pi;

RunConfig small_2d_config() {
    RunConfig cfg;
    cfg.dim = 2;
    cfg.points_per_axis = 16;
    cfg.vmodel = ViscosityModel{1.0, {0.05, 0.05, 0.05, 0.05}, 0.1};
    cfg.initial.u_amplitude = 0.05;
    cfg.initial.a_amplitude = 0.05;
    cfg.dt = 0.02;
    cfg.t_max = 0.2;
    cfg.snapshot_every = 2;
    return cfg;
}

double sup_difference(const Trajectory& a, const Trajectory& b) {
    REQUIRE(a.samples().size() == b.samples().size());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.samples().size(); ++i) {
        VectorField diff = a.samples()[i].u - b.samples()[i].u;
        worst = std::max(worst, spatial_norm(diff, kInfinity));
    }
    return worst;
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("contraction metric on synthetic series") {
    SUBCASE("zero differences give zero") {
        DifferenceSeries s;
        for (int i = 0; i <= 10; ++i) {
            s.stamps.push_back(0.1 * i);
            s.species_l2.push_back(0.0);
            s.u_l2.push_back(0.0);
            s.grad_u_l2.push_back(0.0);
        }
        CHECK(contraction_metric(s) == 0.0);
    }
    SUBCASE("positive homogeneity is exact") {
        DifferenceSeries s;
        for (int i = 0; i <= 20; ++i) {
            const double t = 0.05 * (i + 1);
            s.stamps.push_back(t);
            s.species_l2.push_back(0.3 * std::exp(-t));
            s.u_l2.push_back(0.2 * std::exp(-2.0 * t));
            s.grad_u_l2.push_back(0.4 * std::exp(-t));
        }
        const double base = contraction_metric(s);
        DifferenceSeries scaled = s;
        for (auto& v : scaled.species_l2) v *= 3.0;
        for (auto& v : scaled.u_l2) v *= 3.0;
        for (auto& v : scaled.grad_u_l2) v *= 3.0;
        CHECK(contraction_metric(scaled) == doctest::Approx(3.0 * base).epsilon(1e-14));
    }
    SUBCASE("exponential decay matches the closed form") {
        // delta u = e^{-t} phi with ||phi||_2 = ||grad phi||_2 = c:
        // metric = c (1 + sqrt((1 - e^{-2T})/2))
        const double c = 0.37, T = 1.0, dt = 5e-4;
        DifferenceSeries s;
        for (int i = 0; static_cast<double>(i) * dt <= T + 1e-12; ++i) {
            const double t = i * dt;
            s.stamps.push_back(t);
            s.species_l2.push_back(0.0);
            s.u_l2.push_back(c * std::exp(-t));
            s.grad_u_l2.push_back(c * std::exp(-t));
        }
        const double expected = c * (1.0 + std::sqrt((1.0 - std::exp(-2.0 * T)) / 2.0));
        CHECK(contraction_metric(s) == doctest::Approx(expected).epsilon(1e-6));
    }
    SUBCASE("misaligned series are rejected") {
        DifferenceSeries s;
        s.stamps = {0.0, 0.1};
        s.species_l2 = {0.0, 1.0, 2.0};
        s.u_l2 = {0.0, 1.0};
        s.grad_u_l2 = {0.0, 1.0};
        CHECK_THROWS_AS((void)contraction_metric(s), std::invalid_argument);
    }
    SUBCASE("nonzero species difference at t = 0 is rejected") {
        DifferenceSeries s;
        s.stamps = {0.0, 0.1};
        s.species_l2 = {1.0, 1.0};
        s.u_l2 = {0.0, 0.0};
        s.grad_u_l2 = {0.0, 0.0};
        CHECK_THROWS_AS((void)contraction_metric(s), std::invalid_argument);
    }
}

TEST_CASE("taylor-green run matches the analytic decay at first order") {
    auto error_at = [](double dt) {
        RunConfig cfg;
        cfg.dim = 2;
        cfg.points_per_axis = 32;
        cfg.model = ReactionModel::inert(2, 1);
        cfg.vmodel = ViscosityModel::constant(0.5);
        cfg.couple_species = false;
        cfg.track_b_decomposition = false;
        cfg.record_grad_power = false;
        cfg.initial.u_profile = InitialData::VelocityProfile::taylor_green;
        cfg.initial.u_amplitude = 0.3;
        cfg.initial.a_amplitude = 0.0;
        cfg.dt = dt;
        cfg.t_max = 0.5;
        cfg.snapshot_every = static_cast<int>(std::llround(0.5 / dt));
        const SimulateResult run = simulate(cfg);
        REQUIRE(run.completed);
        const auto& last = run.trajectory.samples().back();
        const double decay = std::exp(-2.0 * 0.5 * 0.5);  // e^{-2 nu t}
        auto g = last.u.grid_ptr();
        VectorField expected = build_initial_velocity(g, cfg.initial);
        expected *= decay;
        return spatial_norm(last.u - expected, kInfinity);
    };
    const double e1 = error_at(0.02);
    const double e2 = error_at(0.01);
    const double e3 = error_at(0.005);
    CHECK(e1 / e2 > 1.7);
    CHECK(e1 / e2 < 2.4);
    CHECK(e2 / e3 > 1.7);
    CHECK(e2 / e3 < 2.4);
}

TEST_CASE("null coupling: trivial mixture equals the pure navier-stokes path") {
    RunConfig coupled = small_2d_config();
    coupled.model = ReactionModel::inert(2, 1);
    coupled.initial.a_amplitude = 0.0;
    coupled.initial.b_amplitude = 0.0;
    coupled.couple_species = true;
    coupled.track_b_decomposition = false;

    RunConfig pure = coupled;
    pure.couple_species = false;

    const SimulateResult run_coupled = simulate(coupled);
    const SimulateResult run_pure = simulate(pure);
    REQUIRE(run_coupled.completed);
    REQUIRE(run_pure.completed);
    CHECK(sup_difference(run_coupled.trajectory, run_pure.trajectory) <= 1e-12);
}

TEST_CASE("simulate handles zero data") {
    RunConfig cfg = small_2d_config();
    cfg.initial.u_amplitude = 0.0;
    cfg.initial.a_amplitude = 0.0;
    const SimulateResult run = simulate(cfg);
    REQUIRE(run.completed);
    for (const auto& s : run.trajectory.samples()) {
        CHECK(spatial_norm(s.u, kInfinity) == 0.0);
    }
    const Theorem1Report rep = theorem1_report(run.trajectory);
    CHECK(rep.u_W21_2_43_1.value == 0.0);
    CHECK(rep.tu_W21_6_4_1.value == 0.0);
    CHECK(rep.grad_u_integral == 0.0);
    CHECK(rep.lemma4_ratio == 0.0);
    CHECK(rep.finite());
}

TEST_CASE("zero velocity leaves a pointwise reactor") {
    RunConfig cfg = small_2d_config();
    cfg.initial.u_amplitude = 0.0;
    cfg.initial.species_modes = 1;
    cfg.initial.a_amplitude = 0.2;
    cfg.initial.seed = 9;
    const SimulateResult run = simulate(cfg);
    REQUIRE(run.completed);
    for (const auto& s : run.trajectory.samples()) {
        CHECK(spatial_norm(s.u, kInfinity) == 0.0);
    }
    // with u = 0 every point reacts independently: reactants only decrease
    const GridPtr g = cfg.make_run_grid();
    const SpeciesState initial = build_initial_species(g, cfg.model, cfg.initial);
    const auto& final_species = *run.trajectory.samples().back().species;
    for (std::size_t k = 0; k < final_species.a.size(); ++k) {
        auto before = initial.a[k].values();
        auto after = final_species.a[k].values();
        for (std::size_t i = 0; i < before.size(); ++i) {
            CHECK(after[i] <= before[i] + 1e-12);
            CHECK(after[i] >= 0.0);
        }
    }
}

TEST_CASE("picard converges immediately for zero data") {
    RunConfig cfg = small_2d_config();
    cfg.model = ReactionModel::inert(2, 1);
    cfg.initial.u_amplitude = 0.0;
    cfg.initial.a_amplitude = 0.1;
    cfg.picard_tolerance = 1e-12;
    const PicardResult result = picard_segment(cfg, 0.1);
    CHECK(result.report.converged);
    CHECK(result.report.iterations == 1);
    CHECK(result.report.metrics.front() <= 1e-12);
}

TEST_CASE("picard chain restarts from each segment end") {
    RunConfig cfg = small_2d_config();
    cfg.dt = 0.02;
    cfg.picard_tolerance = 1e-10;
    cfg.picard_max_iterations = 10;
    cfg.snapshot_every = 1;
    const PicardChainResult chain = picard_chain(cfg, 0.1, 3);
    REQUIRE(chain.segment_reports.size() == 3);
    CHECK(chain.all_converged);
    CHECK(chain.trajectory.horizon() == doctest::Approx(0.3).epsilon(1e-12));
    // stamps strictly increase across the glue points
    const auto& samples = chain.trajectory.samples();
    for (std::size_t i = 1; i < samples.size(); ++i) {
        CHECK(samples[i].t > samples[i - 1].t);
    }
    // a single segment of triple length shares the initial state
    CHECK(samples.front().species.has_value());
}

TEST_CASE("picard on the trivial mixture contracts and meets simulate") {
    RunConfig cfg = small_2d_config();
    cfg.model = ReactionModel::inert(2, 1);
    cfg.initial.a_amplitude = 0.0;
    cfg.initial.u_amplitude = 0.05;
    cfg.dt = 0.0125;
    cfg.picard_tolerance = 1e-11;
    cfg.picard_max_iterations = 20;
    cfg.snapshot_every = 1;
    cfg.track_b_decomposition = false;
    const double T = 0.25;
    const PicardResult picard = picard_segment(cfg, T);
    CHECK(picard.report.converged);
    const auto ratios = picard.report.ratios();
    REQUIRE(!ratios.empty());
    for (std::size_t i = 0; i + 1 < ratios.size(); ++i) CHECK(ratios[i] < 1.0);

    RunConfig direct = cfg;
    direct.t_max = T;
    const SimulateResult run = simulate(direct);
    REQUIRE(run.completed);
    const double dist = sup_difference(picard.trajectory, run.trajectory);
    // the fixed point of the iteration is the direct discrete solution
    CHECK(dist <= 1e-8);
}

TEST_CASE("theorem1 report on the separable analytic trajectory") {
    auto g = make_grid(3, 2.0 * kPi, 16);
    const ReactionModel model = ReactionModel::toymodel();
    Trajectory traj;
    VectorField phi(g);
    {
        auto coefs = phi[1].spectral_mut();
        const std::size_t flat = g->flatten({1, 0, 0});
        coefs[flat] = 0.5;
        coefs[g->conjugate_slot(flat)] = 0.5;
    }
    const double T = 6.0, dt = 0.01;
    const SpeciesState ref = SpeciesState::reference(g, model);
    std::vector<double> stamps;
    for (int m = 0; static_cast<double>(m) * dt <= T + 1e-12; ++m) {
        const double t = m * dt;
        VectorField u = phi;
        u *= std::exp(-t);
        VectorField ut = phi;
        ut *= -std::exp(-t);
        TrajectorySample sample{t, std::move(u), std::move(ut), true, ref};
        traj.push_sample(std::move(sample));
        StepScalars row;
        row.t = t;
        row.grad_u_inf = spatial_norm(gradient_magnitude(phi), kInfinity) * std::exp(-t);
        traj.push_step(row);
        stamps.push_back(t);
    }
    const Theorem1Report rep = theorem1_report(traj);
    CHECK(rep.finite());

    // separable oracles: || u(t) ||-type factors times scalar time norms
    WeightedSamples decay;
    decay.weights = time_cells(stamps);
    for (double t : stamps) decay.values.push_back(std::exp(-t));
    const double phi2 = spatial_norm(phi, 2.0);
    const double f43 = lorentz_norm(decay, {4.0 / 3.0, 1.0});
    const double oracle_u = phi2 + 2.0 * phi2 * f43;  // trace + u_t + hessian, |k| = 1
    CHECK(rep.u_W21_2_43_1.value == doctest::Approx(oracle_u).epsilon(1e-9));

    // grad u integral: ||grad phi||_inf * int e^{-t}
    const double grad_inf = spatial_norm(gradient_magnitude(phi), kInfinity);
    CHECK(rep.grad_u_integral ==
          doctest::Approx(grad_inf * (1.0 - std::exp(-T))).epsilon(1e-4));

    // t-weighted: (t e^{-t})' = (1-t) e^{-t}, trace sup_t t e^{-t} = 1/e
    WeightedSamples weighted;
    weighted.weights = decay.weights;
    for (double t : stamps) weighted.values.push_back(std::abs(1.0 - t) * std::exp(-t));
    const double f41w = lorentz_norm(weighted, {4.0, 1.0});
    WeightedSamples tdecay;
    tdecay.weights = decay.weights;
    for (double t : stamps) tdecay.values.push_back(t * std::exp(-t));
    const double f41t = lorentz_norm(tdecay, {4.0, 1.0});
    const double phi6 = spatial_norm(phi, 6.0);
    const double besov6 = besov_norm(phi, {2.0 - 2.0 / 4.0, 6.0, 1.0}).value;
    const double oracle_tu =
        besov6 * std::exp(-1.0) + phi6 * f41w + phi6 * f41t;  // trace, (tu)_t, t|grad^2 u|
    CHECK(rep.tu_W21_6_4_1.value == doctest::Approx(oracle_tu).epsilon(1e-3));

    CHECK(rep.rho_deviation_inf == 0.0);
    CHECK(rep.grad_rho_l3 <= 1e-12);
    CHECK(rep.lemma4_ratio > 0.0);
}

TEST_CASE("config validation rejects bad setups") {
    RunConfig cfg = small_2d_config();
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_2d_config();
    cfg.dim = 3;
    cfg.initial.u_profile = InitialData::VelocityProfile::taylor_green;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = small_2d_config();
    cfg.initial.w_mode = InitialData::DilutantMode::complement;
    cfg.initial.a_amplitude = 0.4;  // two reactants sum to at most 0.8 < 1
    const GridPtr g = cfg.make_run_grid();
    CHECK_NOTHROW((void)build_initial_species(g, cfg.model, cfg.initial));
    cfg.initial.a_amplitude = 0.9;  // two reactants can sum past the dilutant
    CHECK_THROWS((void)build_initial_species(g, cfg.model, cfg.initial));
}

}  // TEST_SUITE
