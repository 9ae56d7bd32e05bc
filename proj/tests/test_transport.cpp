#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mixflow/solver.hpp"
#include "mixflow/transport.hpp"

using namespace mixflow;

namespace {

constexpr double kPi = std::numbers::pi;

// reference solution of the pointwise toymodel ODE by tiny-step RK4
struct ToyOde {
    double a1, a2, b;
};
ToyOde reference_toymodel_ode(ToyOde y0, double t_end, double h = 1e-5) {
    auto rhs = [](const ToyOde& y) {
        const double w1 = y.a1 * y.a1 * y.a2;
        const double w2 = y.a2 * y.a2 * y.a1;
        return ToyOde{-w1, -w2, w1 + w2};
    };
    auto axpy = [](const ToyOde& y, const ToyOde& k, double c) {
        return ToyOde{y.a1 + c * k.a1, y.a2 + c * k.a2, y.b + c * k.b};
    };
    ToyOde y = y0;
    const int steps = static_cast<int>(std::llround(t_end / h));
    for (int s = 0; s < steps; ++s) {
        const ToyOde k1 = rhs(y);
        const ToyOde k2 = rhs(axpy(y, k1, h / 2));
        const ToyOde k3 = rhs(axpy(y, k2, h / 2));
        const ToyOde k4 = rhs(axpy(y, k3, h));
        y.a1 += h / 6 * (k1.a1 + 2 * k2.a1 + 2 * k3.a1 + k4.a1);
        y.a2 += h / 6 * (k1.a2 + 2 * k2.a2 + 2 * k3.a2 + k4.a2);
        y.b += h / 6 * (k1.b + 2 * k2.b + 2 * k3.b + k4.b);
    }
    return y;
}

SpeciesState uniform_species(const GridPtr& g, const ReactionModel& m, double a1, double a2,
                             double b) {
    SpeciesState s = SpeciesState::reference(g, m);
    for (auto& v : s.a[0].values_mut()) v = a1;
    for (auto& v : s.a[1].values_mut()) v = a2;
    for (auto& v : s.b[0].values_mut()) v = b;
    return s;
}

// divergence-free rotation localized away from the torus boundary:
// u = omega(r) (-(y-c), x-c) with a smooth radial cutoff
VectorField localized_rotation(const GridPtr& g, double rate) {
    VectorField u(g);
    const double c = 0.5 * g->extent();
    const double r0 = 0.32 * g->extent();  // rigid region
    const double r1 = 0.46 * g->extent();  // zero beyond
    auto ux = u[0].values_mut();
    auto uy = u[1].values_mut();
    for (std::size_t i = 0; i < g->size(); ++i) {
        const auto x = g->point(i);
        const double dx = x[0] - c;
        const double dy = x[1] - c;
        const double r = std::sqrt(dx * dx + dy * dy);
        double chi = 0.0;
        if (r <= r0) {
            chi = 1.0;
        } else if (r < r1) {
            const double s = (r - r0) / (r1 - r0);
            chi = 0.5 * (1.0 + std::cos(kPi * s));
        }
        ux[i] = -rate * chi * dy;
        uy[i] = rate * chi * dx;
    }
    return u;
}

ScalarField gaussian_blob(const GridPtr& g, double cx, double cy, double sigma) {
    ScalarField f(g);
    auto v = f.values_mut();
    for (std::size_t i = 0; i < g->size(); ++i) {
        const auto x = g->point(i);
        const double dx = x[0] - cx;
        const double dy = x[1] - cy;
        v[i] = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
    }
    return f;
}

}  // namespace

TEST_SUITE("transport") {

TEST_CASE("zero velocity leaves fields untouched") {
    auto g = make_grid(2, 2.0 * kPi, 32);
    ScalarField f = random_band_limited(g, 5, 3);
    VectorField u(g);
    ScalarField out = advect_semilagrangian(f, u, 0.1);
    auto a = f.values();
    auto b = out.values();
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(b[i] == a[i]);
}

TEST_CASE("grid-aligned constant velocity is an exact cyclic shift") {
    auto g = make_grid(2, 16.0, 16);  // spacing exactly 1
    ScalarField f = random_band_limited(g, 4, 5);
    VectorField u(g);
    for (auto& v : u[0].values_mut()) v = 1.0;
    TransportConfig cfg;
    cfg.conserve_mass = false;
    ScalarField out = advect_semilagrangian(f, u, 1.0, cfg);
    auto src = f.values();
    auto dst = out.values();
    for (std::size_t i = 0; i < g->size(); ++i) {
        auto j = g->unflatten(i);
        j[0] = (j[0] + 15) % 16;  // foot point one cell to the left
        CHECK(dst[i] == src[g->flatten(j)]);
    }
}

TEST_CASE("localized rotation returns the blob after one revolution") {
    const double rate = 1.0;
    auto run = [&](int n, int steps) {
        auto g = make_grid(2, 2.0 * kPi, n);
        const double c = kPi;
        // blob small enough that its tail stays inside the rigid region
        ScalarField f0 = gaussian_blob(g, c + 0.12 * 2.0 * kPi, c, 0.05 * 2.0 * kPi);
        VectorField u = localized_rotation(g, rate);
        const double dt = 2.0 * kPi / (rate * steps);
        ScalarField f = f0;
        TransportConfig cfg;
        cfg.interpolation = Interpolation::clamped_cubic;
        for (int s = 0; s < steps; ++s) f = advect_semilagrangian(f, u, dt, cfg);
        return spatial_norm(f - f0, 2.0) / spatial_norm(f0, 2.0);
    };
    const double coarse = run(96, 192);
    const double fine = run(192, 384);
    CHECK(coarse < 0.06);        // envelope frozen from the refined-grid study
    CHECK(fine < coarse * 0.5);  // self-convergence under joint refinement
}

TEST_CASE("interpolation is monotone: no new extrema without reaction") {
    auto g = make_grid(2, 2.0 * kPi, 32);
    ScalarField f = random_band_limited(g, 5, 17);
    {
        auto v = f.values_mut();
        for (auto& x : v) x = 1.0 + 0.5 * x;  // positive, range (0.5, 1.5)
    }
    VectorField u = random_solenoidal(g, 3, 23);
    u *= 0.8;
    TransportConfig cfg;
    cfg.conserve_mass = false;
    for (Interpolation interp : {Interpolation::linear, Interpolation::clamped_cubic}) {
        cfg.interpolation = interp;
        ScalarField cur = f;
        double lo = 0.5, hi = 1.5;
        for (int s = 0; s < 25; ++s) {
            cur = advect_semilagrangian(cur, u, 0.05, cfg);
            double new_lo = 1e300, new_hi = -1e300;
            for (double v : cur.values()) {
                new_lo = std::min(new_lo, v);
                new_hi = std::max(new_hi, v);
            }
            CHECK(new_lo >= lo - 4e-15);
            CHECK(new_hi <= hi + 4e-15);
            lo = new_lo;
            hi = new_hi;
        }
    }
}

TEST_CASE("mass fixer conserves every transported integral") {
    auto g = make_grid(2, 2.0 * kPi, 32);
    ScalarField f = gaussian_blob(g, kPi, kPi, 1.0);
    VectorField u = random_solenoidal(g, 3, 29);
    u *= 0.5;
    const double m0 = spatial_norm(f, 1.0);
    TransportConfig cfg;  // conserve_mass on by default
    ScalarField cur = f;
    for (int s = 0; s < 40; ++s) cur = advect_semilagrangian(cur, u, 0.05, cfg);
    CHECK(spatial_norm(cur, 1.0) == doctest::Approx(m0).epsilon(1e-12));
}

TEST_CASE("strang step with zero velocity matches the pointwise ODE") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    const ReactionModel m = ReactionModel::toymodel();
    SpeciesState s = uniform_species(g, m, 1.0, 1.0, 0.0);
    VectorField u(g);
    TransportConfig cfg;
    int substeps = 0;
    for (int step = 0; step < 20; ++step) {
        auto r = transport_react_step(s, m, u, 0.05, cfg);
        s = std::move(r.species);
        substeps = std::max(substeps, r.max_substeps_used);
        CHECK(r.clamp_mass == 0.0);
    }
    const ToyOde ref = reference_toymodel_ode({1.0, 1.0, 0.0}, 1.0);
    CHECK(s.a[0].values()[0] == doctest::Approx(ref.a1).epsilon(1e-8));
    CHECK(s.a[1].values()[0] == doctest::Approx(ref.a2).epsilon(1e-8));
    CHECK(s.b[0].values()[0] == doctest::Approx(ref.b).epsilon(1e-8));
    CHECK(substeps > 0);
}

TEST_CASE("uniform species with any velocity still reduces to the ODE") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    const ReactionModel m = ReactionModel::toymodel();
    SpeciesState s = uniform_species(g, m, 0.8, 1.2, 0.1);
    VectorField u = random_solenoidal(g, 3, 31);
    TransportConfig cfg;
    for (int step = 0; step < 10; ++step) {
        s = transport_react_step(s, m, u, 0.05, cfg).species;
    }
    const ToyOde ref = reference_toymodel_ode({0.8, 1.2, 0.1}, 0.5);
    for (double v : s.a[0].values()) CHECK(v == doctest::Approx(ref.a1).epsilon(1e-8));
    for (double v : s.b[0].values()) CHECK(v == doctest::Approx(ref.b).epsilon(1e-8));
}

TEST_CASE("strang step conserves the reacting mass") {
    auto g = make_grid(2, 2.0 * kPi, 24);
    const ReactionModel m = ReactionModel::toymodel();
    InitialData init;
    init.a_amplitude = 0.3;
    init.species_modes = 3;
    init.seed = 7;
    SpeciesState s = build_initial_species(g, m, init);
    VectorField u = random_solenoidal(g, 3, 37);
    u *= 0.4;
    auto mass = [&](const SpeciesState& st) {
        double total = 0.0;
        for (const auto& f : st.a) total += spatial_norm(f, 1.0);
        for (const auto& f : st.b) total += spatial_norm(f, 1.0);
        return total;
    };
    const double m0 = mass(s);
    TransportConfig cfg;
    for (int step = 0; step < 20; ++step) {
        s = transport_react_step(s, m, u, 0.05, cfg).species;
    }
    CHECK(mass(s) == doctest::Approx(m0).epsilon(1e-9));
    CHECK(s.min_value() >= 0.0);
}

TEST_CASE("b decomposition starts exact and stays zero without reaction") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    const ReactionModel inert = ReactionModel::inert(2, 1);
    InitialData init;
    init.a_amplitude = 0.2;
    init.b_amplitude = 0.1;
    SpeciesState s = build_initial_species(g, inert, init);
    BDecomposition d = BDecomposition::initial(s);
    CHECK(d.identity_error(inert) == 0.0);
    CHECK(spatial_norm(d.big_b, kInfinity) == 0.0);

    VectorField u = random_solenoidal(g, 3, 41);
    u *= 0.5;
    TransportConfig cfg;
    SpeciesState cur = s;
    for (int step = 0; step < 10; ++step) {
        SpeciesState next = transport_react_step(cur, inert, u, 0.05, cfg).species;
        d = evolve_b_decomposition(d, inert, cur, next, u, 0.05, cfg);
        cur = std::move(next);
    }
    CHECK(spatial_norm(d.big_b, kInfinity) == 0.0);
    // without reaction b is pure transport, so b := b_ini exactly
    CHECK(d.identity_error(inert) <= 1e-14);
}

TEST_CASE("toymodel b identity error is small and refines at scheme order") {
    const ReactionModel m = ReactionModel::toymodel();
    auto run = [&](int n, double dt) {
        auto g = make_grid(2, 2.0 * kPi, n);
        InitialData init;
        init.a_amplitude = 0.4;
        init.species_modes = 2;
        init.seed = 11;
        SpeciesState s = build_initial_species(g, m, init);
        VectorField u = random_solenoidal(g, 2, 43);
        u *= 0.3;
        BDecomposition d = BDecomposition::initial(s);
        TransportConfig cfg;
        double worst = 0.0;
        const int steps = static_cast<int>(std::llround(1.0 / dt));
        for (int step = 0; step < steps; ++step) {
            SpeciesState next = transport_react_step(s, m, u, dt, cfg).species;
            d = evolve_b_decomposition(d, m, s, next, u, dt, cfg);
            s = std::move(next);
            worst = std::max(worst, d.identity_error(m));
        }
        return worst;
    };
    const double coarse = run(16, 0.04);
    const double fine = run(32, 0.02);
    CHECK(fine < coarse);
    CHECK(coarse < 1e-3);  // envelope from the development calibration run
}

TEST_CASE("grad power norm") {
    auto g = make_grid(2, 2.0 * kPi, 64);
    const ReactionModel m = ReactionModel::toymodel();

    SUBCASE("constant fields give zero") {
        SpeciesState s = uniform_species(g, m, 0.5, 0.5, 0.0);
        CHECK(grad_power_norm(s, 3.0, 2.0 / 3.0) == 0.0);
    }
    SUBCASE("alpha -> 0 recovers the plain gradient norm") {
        SpeciesState s(g, m);
        for (auto& f : s.a) f = random_band_limited(g, 4, 47);
        for (auto& f : s.a) {
            auto v = f.values_mut();
            for (auto& x : v) x = 1.0 + 0.3 * x;
        }
        double direct = 0.0;
        for (const auto& f : s.a) direct += std::pow(spatial_norm(gradient(f), 3.0), 3.0);
        CHECK(grad_power_norm(s, 3.0, 1e-9) == doctest::Approx(direct).epsilon(1e-6));
    }
    SUBCASE("sinusoidal profile matches fine quadrature") {
        // a1 = 1 + 0.1 sin(x), p = 3, alpha = 2/3: spectral vs dense 1D rule
        SpeciesState s = uniform_species(g, m, 1.0, 1.0, 0.0);
        {
            auto v = s.a[0].values_mut();
            for (std::size_t i = 0; i < g->size(); ++i) {
                v[i] = 1.0 + 0.1 * std::sin(g->point(i)[0]);
            }
        }
        const double p = 3.0, alpha = 2.0 / 3.0;
        // d/dx (1 + 0.1 sin x)^{1/3} = (1/3)(1 + 0.1 sin x)^{-2/3} * 0.1 cos x
        const int nq = 200000;
        double integral = 0.0;
        for (int i = 0; i < nq; ++i) {
            const double x = 2.0 * kPi * (i + 0.5) / nq;
            const double gprime = (1.0 / 3.0) * std::pow(1.0 + 0.1 * std::sin(x), -2.0 / 3.0) *
                                  0.1 * std::cos(x);
            integral += std::pow(std::abs(gprime), p);
        }
        integral *= 2.0 * kPi / nq;        // 1D line integral
        const double oracle = integral * 2.0 * kPi;  // constant in y
        // a2 constant contributes zero
        CHECK(grad_power_norm(s, p, alpha) == doctest::Approx(oracle).epsilon(1e-6));
    }
}

TEST_CASE("invariant report: inert static run has tight equalities") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    const ReactionModel inert = ReactionModel::inert(2, 1);
    InitialData init;
    init.a_amplitude = 0.2;
    init.b_amplitude = 0.05;
    SpeciesState s = build_initial_species(g, inert, init);
    Trajectory traj;
    traj.push_sample({0.0, VectorField(g), VectorField(g), false, s});
    traj.push_sample({1.0, VectorField(g), VectorField(g), true, s});
    const SpeciesInvariantReport rep = species_invariant_report(traj, inert);
    CHECK(rep.w_bound.observed == rep.w_bound.bound);
    for (const auto& b : rep.a_bounds) CHECK(b.observed == b.bound);
    CHECK(rep.max_conservation_error <= 1e-14);
    CHECK(rep.all_bounds_hold(1e-12));
}

TEST_CASE("invariant report: zero initial products obey the sharpened bound") {
    auto g = make_grid(2, 2.0 * kPi, 24);
    const ReactionModel m = ReactionModel::toymodel();
    InitialData init;
    init.a_amplitude = 0.4;
    init.b_amplitude = 0.0;
    init.seed = 3;
    SpeciesState s = build_initial_species(g, m, init);
    ScalarField a_sum = s.a[0] + s.a[1];
    const double theta_bound = spatial_norm(a_sum, kInfinity);

    VectorField u = random_solenoidal(g, 2, 51);
    u *= 0.3;
    Trajectory traj;
    traj.push_sample({0.0, u, VectorField(g), false, s});
    TransportConfig cfg;
    SpeciesState cur = s;
    for (int step = 1; step <= 30; ++step) {
        cur = transport_react_step(cur, m, u, 0.05, cfg).species;
        if (step % 10 == 0) {
            traj.push_sample({0.05 * step, u, VectorField(g), true, cur});
        }
    }
    const SpeciesInvariantReport rep = species_invariant_report(traj, m);
    REQUIRE(rep.b_bounds.size() == 1);
    CHECK(rep.b_bounds[0].bound == doctest::Approx(theta_bound).epsilon(1e-12));
    CHECK(rep.b_bounds[0].observed <= theta_bound * (1.0 + 1e-8));
    CHECK(rep.all_bounds_hold(1e-8));
    CHECK(rep.min_species >= 0.0);
}

TEST_CASE("clamp budget aborts a poisoned step") {
    auto g = make_grid(2, 2.0 * kPi, 16);
    const ReactionModel m = ReactionModel::toymodel();
    SpeciesState s = uniform_species(g, m, 1e-13, 1e-13, 0.0);
    // inject a real negative region beyond the tolerated budget
    {
        auto v = s.a[0].values_mut();
        for (std::size_t i = 0; i < v.size() / 2; ++i) v[i] = -1e-9;
    }
    VectorField u(g);
    TransportConfig cfg;
    cfg.positivity_tolerance = 1e-12;
    CHECK_THROWS(transport_react_step(s, m, u, 0.05, cfg));
}

}  // TEST_SUITE
