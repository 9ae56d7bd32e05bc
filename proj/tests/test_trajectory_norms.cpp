#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mixflow/trajectory.hpp"

using namespace mixflow;

namespace {

constexpr double kPi = std::numbers::pi;

VectorField single_mode_field(const GridPtr& g, double amplitude) {
    VectorField u(g);
    auto v = u[1].values_mut();
    for (std::size_t i = 0; i < g->size(); ++i) {
        const auto x = g->point(i);
        v[i] = amplitude * std::cos(x[0]);
    }
    return u;
}

/// u(t) = e^{-t} phi with phi a single |k| = 1 mode; u_t stored analytically.
Trajectory decaying_mode_trajectory(const GridPtr& g, double t_max, double dt) {
    Trajectory traj;
    VectorField phi = single_mode_field(g, 1.0);
    const auto steps = static_cast<std::size_t>(std::llround(t_max / dt));
    for (std::size_t m = 0; m <= steps; ++m) {
        const double t = m * dt;
        VectorField u = phi;
        u *= std::exp(-t);
        VectorField ut = phi;
        ut *= -std::exp(-t);
        traj.push_sample({t, std::move(u), std::move(ut), true, std::nullopt});
    }
    return traj;
}

}  // namespace

TEST_SUITE("trajectory") {

TEST_CASE("time cells tile the horizon") {
    const std::vector<double> stamps{0.0, 0.1, 0.25, 0.5, 1.0};
    const std::vector<double> cells = time_cells(stamps);
    REQUIRE(cells.size() == stamps.size());
    double total = 0.0;
    for (double c : cells) {
        CHECK(c > 0.0);
        total += c;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cells.front() == doctest::Approx(0.05).epsilon(1e-13));
    CHECK(cells.back() == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("zero trajectory has zero space-time norms") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    Trajectory traj;
    for (int m = 0; m <= 4; ++m) {
        traj.push_sample({0.1 * m, VectorField(g), VectorField(g), m > 0, std::nullopt});
    }
    CHECK(spacetime_lorentz_norm(traj, FieldSelector::velocity, 2.0, 1.0, 2.0).value == 0.0);
    CHECK(w21_norm(traj, 2.0, 4.0 / 3.0, 1.0).value == 0.0);
}

TEST_CASE("constant-in-time field reduces to T^{1/q} times the spatial norm") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    VectorField phi = single_mode_field(g, 0.7);
    Trajectory traj;
    const double T = 2.0;
    for (int m = 0; m <= 40; ++m) {
        traj.push_sample({T * m / 40.0, phi, VectorField(g), m > 0, std::nullopt});
    }
    const double lp = spatial_norm(phi, 3.0);
    for (double q : {2.0, 4.0}) {
        const NormReport r = spacetime_lorentz_norm(traj, FieldSelector::velocity, q, q, 3.0);
        CHECK(r.value == doctest::Approx(std::pow(T, 1.0 / q) * lp).epsilon(1e-12));
        CHECK(r.truncation_horizon == doctest::Approx(T).epsilon(1e-14));
        CHECK(r.tail_value == doctest::Approx(lp).epsilon(1e-12));
    }
}

TEST_CASE("exponentially decaying field matches the scalar layer-cake oracle") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    const double T = 3.0;
    const double dt = 0.005;
    Trajectory traj = decaying_mode_trajectory(g, T, dt);
    const double lp = spatial_norm(single_mode_field(g, 1.0), 2.0);

    // oracle: same stamps, scalar values e^{-t} * ||phi||_p, same cells
    std::vector<double> stamps;
    for (const auto& s : traj.samples()) stamps.push_back(s.t);
    WeightedSamples scalar;
    scalar.weights = time_cells(stamps);
    for (double t : stamps) scalar.values.push_back(std::exp(-t) * lp);
    for (auto [q, r] : {std::pair{2.0, 1.0}, {4.0 / 3.0, 1.0}, {4.0, 2.0}}) {
        const double oracle = lorentz_norm(scalar, {q, r});
        const double value = spacetime_lorentz_norm(traj, FieldSelector::velocity, q, r, 2.0).value;
        CHECK(value == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("w21 norm of a separable decaying mode matches its oracle") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    const double T = 4.0;
    const double dt = 0.01;
    Trajectory traj = decaying_mode_trajectory(g, T, dt);
    const VectorField phi = single_mode_field(g, 1.0);

    const double p = 2.0, q = 4.0 / 3.0, r = 1.0;
    // |k| = 1 sits in shell 0, so the Besov norm of phi is just ||phi||_p
    const double phi_p = spatial_norm(phi, p);
    const double trace_oracle = phi_p;  // sup_t e^{-t} 2^{0 s} ||phi||_p at t = 0

    std::vector<double> stamps;
    for (const auto& s : traj.samples()) stamps.push_back(s.t);
    WeightedSamples decay;
    decay.weights = time_cells(stamps);
    for (double t : stamps) decay.values.push_back(std::exp(-t));
    const double time_factor = lorentz_norm(decay, {q, r});
    // single-axis mode: |grad^2 u| = |k|^2 |u| pointwise
    const double dt_oracle = time_factor * phi_p;
    const double hess_oracle = time_factor * phi_p;

    const W21Result w = w21_norm(traj, p, q, r);
    CHECK(w.trace_sup == doctest::Approx(trace_oracle).epsilon(1e-9));
    CHECK(w.dt_part == doctest::Approx(dt_oracle).epsilon(1e-9));
    CHECK(w.hessian_part == doctest::Approx(hess_oracle).epsilon(1e-9));
    CHECK(w.value == doctest::Approx(trace_oracle + dt_oracle + hess_oracle).epsilon(1e-9));
}

TEST_CASE("static field: derivative part vanishes, trace equals one snapshot") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    VectorField phi = single_mode_field(g, 1.0);
    Trajectory traj;
    for (int m = 0; m <= 10; ++m) {
        traj.push_sample({0.5 * m, phi, VectorField(g), m > 0, std::nullopt});
    }
    const W21Result w = w21_norm(traj, 2.0, 4.0 / 3.0, 1.0);
    CHECK(w.dt_part == 0.0);
    const double besov_single = besov_norm(phi, {2.0 - 2.0 / (4.0 / 3.0), 2.0, 1.0}).value;
    CHECK(w.trace_sup == doctest::Approx(besov_single).epsilon(1e-12));
}

TEST_CASE("t-weighted trajectory uses (tu)_t = u + t u_t") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    const double T = 3.0;
    const double dt = 0.01;
    Trajectory traj = decaying_mode_trajectory(g, T, dt);
    const VectorField phi = single_mode_field(g, 1.0);
    const double phi_p = spatial_norm(phi, 2.0);

    std::vector<double> stamps;
    for (const auto& s : traj.samples()) stamps.push_back(s.t);
    WeightedSamples series;
    series.weights = time_cells(stamps);
    // (t e^{-t})' = (1 - t) e^{-t}
    for (double t : stamps) series.values.push_back(std::abs(1.0 - t) * std::exp(-t) * phi_p);
    const double oracle = lorentz_norm(series, {4.0, 1.0});
    const NormReport got = spacetime_lorentz_norm(traj, FieldSelector::velocity_time_derivative,
                                                  4.0, 1.0, 2.0, TimeWeighting::linear);
    CHECK(got.value == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("space-time product inequalities hold with constant one") {
    // ||fg||_{L_{q,1}(L_2)} <= ||f||_{L_inf(L_3)} ||g||_{L_{q,1}(L_6)} and the
    // (L_{5/4}, L_3, L_{15/7}) variant: pure Holder at every time slice, then
    // the bounded-factor inequality in time.
    auto g = make_grid(2, 2.0 * kPi, 16);
    std::mt19937_64 rng(2718);
    for (int trial = 0; trial < 5; ++trial) {
        const int samples = 12;
        std::vector<double> stamps;
        std::vector<ScalarField> f_fields, g_fields;
        for (int m = 0; m <= samples; ++m) {
            stamps.push_back(0.25 * m);
            ScalarField f = random_band_limited(g, 4, rng());
            ScalarField h = random_band_limited(g, 4, rng());
            f *= 0.5 + 0.1 * m;  // vary the time profile
            h *= 2.0 - 0.1 * m;
            f_fields.push_back(std::move(f));
            g_fields.push_back(std::move(h));
        }
        const std::vector<double> cells = time_cells(stamps);
        for (auto [p_fg, p_g] : {std::pair{2.0, 6.0}, {5.0 / 4.0, 15.0 / 7.0}}) {
            const double q = 4.0 / 3.0;
            WeightedSamples prod, gser;
            double f_sup = 0.0;
            for (int m = 0; m <= samples; ++m) {
                ScalarField fg(g);
                auto dst = fg.values_mut();
                auto fv = f_fields[static_cast<std::size_t>(m)].values();
                auto gv = g_fields[static_cast<std::size_t>(m)].values();
                for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = fv[i] * gv[i];
                prod.values.push_back(spatial_norm(fg, p_fg));
                prod.weights.push_back(cells[static_cast<std::size_t>(m)]);
                gser.values.push_back(spatial_norm(g_fields[static_cast<std::size_t>(m)], p_g));
                gser.weights.push_back(cells[static_cast<std::size_t>(m)]);
                f_sup = std::max(f_sup,
                                 spatial_norm(f_fields[static_cast<std::size_t>(m)], 3.0));
            }
            const double lhs = lorentz_norm(prod, {q, 1.0});
            const double rhs = f_sup * lorentz_norm(gser, {q, 1.0});
            CHECK(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("w21 needs a time derivative") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    Trajectory traj;
    traj.push_sample({0.0, VectorField(g), VectorField(g), false, std::nullopt});
    traj.push_sample({1.0, VectorField(g), VectorField(g), false, std::nullopt});
    traj.push_sample({2.0, VectorField(g), VectorField(g), false, std::nullopt});
    CHECK_THROWS_AS((void)w21_norm(traj, 2.0, 4.0 / 3.0, 1.0), std::invalid_argument);
}

}  // TEST_SUITE
