#include "mixflow/solver.hpp"

#include <cmath>
#include <numbers>

#include "mixflow/util.hpp"

namespace mixflow {

void RunConfig::validate() const {
    require(dt > 0.0, "run config: dt must be positive");
    require(t_max > 0.0, "run config: t_max must be positive");
    require(snapshot_every >= 1, "run config: snapshot cadence must be >= 1");
    require(picard_max_iterations >= 1, "run config: picard needs at least one iteration");
    require(picard_tolerance > 0.0, "run config: picard tolerance must be positive");
    require(picard_segment > 0.0, "run config: picard segment must be positive");
    transport.validate();
    vmodel.validate(model.species_count());
    require(initial.u_amplitude >= 0.0 && initial.a_amplitude >= 0.0 && initial.b_amplitude >= 0.0,
            "run config: amplitudes must be nonnegative");
    if (initial.u_profile == InitialData::VelocityProfile::taylor_green) {
        require(dim == 2, "run config: Taylor-Green initial data is two-dimensional");
    }
}

GridPtr RunConfig::make_run_grid() const {
    return make_grid(dim, extent, points_per_axis);
}

SpeciesState build_initial_species(const GridPtr& grid, const ReactionModel& model,
                                   const InitialData& init) {
    SpeciesState s(grid, model);
    auto fill = [&](ScalarField& f, double amplitude, std::uint64_t seed) {
        if (amplitude <= 0.0) return;
        ScalarField r = random_band_limited(grid, init.species_modes, seed);
        auto dst = f.values_mut();
        auto rv = r.values();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = amplitude * (1.0 + 0.5 * rv[i]) / 1.5;
        }
    };
    std::uint64_t seed = init.seed * 1000003ULL + 17ULL;
    for (auto& f : s.a) fill(f, init.a_amplitude, seed++);
    for (auto& f : s.b) fill(f, init.b_amplitude, seed++);

    auto wv = s.w.values_mut();
    if (init.w_mode == InitialData::DilutantMode::unit) {
        for (auto& v : wv) v = 1.0;
    } else {
        for (auto& v : wv) v = 1.0;
        for (const auto& f : s.a) {
            auto fv = f.values();
            for (std::size_t i = 0; i < wv.size(); ++i) wv[i] -= fv[i];
        }
        for (const auto& f : s.b) {
            auto fv = f.values();
            for (std::size_t i = 0; i < wv.size(); ++i) wv[i] -= fv[i];
        }
        require(s.w.finite() && s.min_value() >= 0.0,
                "initial data: complement dilutant went negative, lower the amplitudes");
    }
    return s;
}

VectorField build_initial_velocity(const GridPtr& grid, const InitialData& init) {
    if (init.u_profile == InitialData::VelocityProfile::taylor_green) {
        require(grid->dim() == 2, "taylor-green initial data needs a 2D grid");
        VectorField u(grid);
        auto ux = u[0].values_mut();
        auto uy = u[1].values_mut();
        const double k = 2.0 * std::numbers::pi / grid->extent();
        for (std::size_t i = 0; i < grid->size(); ++i) {
            const auto x = grid->point(i);
            ux[i] = init.u_amplitude * std::sin(k * x[0]) * std::cos(k * x[1]);
            uy[i] = -init.u_amplitude * std::cos(k * x[0]) * std::sin(k * x[1]);
        }
        return u;
    }
    if (init.u_amplitude <= 0.0) return VectorField(grid);
    VectorField u = random_solenoidal(grid, init.u_modes, init.seed);
    u *= init.u_amplitude;
    u.dealias();
    return u;
}

namespace {

double flow_energy(const SpeciesState& species, const VectorField& u) {
    const ScalarField rho = species.total_density();
    auto rv = rho.values();
    KahanSum acc;
    for (int c = 0; c < u.dim(); ++c) {
        auto uv = u[c].values();
        for (std::size_t i = 0; i < uv.size(); ++i) acc.add(rv[i] * uv[i] * uv[i]);
    }
    return 0.5 * acc.value() * u.grid().cell_volume();
}

StepScalars make_step_row(double t, const SpeciesState& species, const VectorField& u,
                          const ReactionModel& model, const RunConfig& config, double clamp_mass,
                          double b_identity_error) {
    StepScalars row;
    row.t = t;
    row.grad_u_inf = spatial_norm(gradient_magnitude(u), kInfinity);
    row.u_inf = spatial_norm(u, kInfinity);
    row.u_l2 = spatial_norm(u, 2.0);
    row.u_l3 = spatial_norm(u, 3.0);
    row.energy = flow_energy(species, u);
    row.min_species = species.min_value();
    row.clamp_mass = clamp_mass;
    {
        KahanSum acc;
        for (const auto& f : species.a) acc.add(spatial_norm(f, 1.0));
        for (const auto& f : species.b) acc.add(spatial_norm(f, 1.0));
        row.reacting_mass = acc.value();
    }
    row.sup_w = spatial_norm(species.w, kInfinity);
    for (const auto& f : species.a) row.sup_a.push_back(spatial_norm(f, kInfinity));
    for (const auto& f : species.b) row.sup_b.push_back(spatial_norm(f, kInfinity));
    if (config.record_grad_power) {
        row.grad_power_p3 = grad_power_norm(species, 3.0, model.alpha(3.0));
        row.grad_power_p6 = grad_power_norm(species, 6.0, model.alpha(6.0));
    }
    row.b_identity_error = b_identity_error;
    return row;
}

VectorField backward_difference(const VectorField& now, const VectorField& before, double dt) {
    VectorField ut = now;
    ut -= before;
    ut *= 1.0 / dt;
    return ut;
}

}  // namespace

SimulateResult simulate(const RunConfig& config) {
    config.validate();
    const GridPtr grid = config.make_run_grid();
    const ReactionModel& model = config.model;

    SpeciesState species = build_initial_species(grid, model, config.initial);
    VectorField u = build_initial_velocity(grid, config.initial);
    VectorField u_t(grid);
    bool have_ut = false;
    BDecomposition decomp = BDecomposition::initial(species);

    SimulateResult result;
    Trajectory& traj = result.trajectory;
    traj.push_sample({0.0, u, VectorField(grid), false, species});
    traj.push_step(make_step_row(0.0, species, u, model, config, 0.0, 0.0));

    const auto steps = static_cast<std::size_t>(std::llround(config.t_max / config.dt));
    double t = 0.0;
    try {
        for (std::size_t m = 0; m < steps; ++m) {
            double clamp_mass = 0.0;
            double b_err = 0.0;
            SpeciesState next_species = species;
            if (config.couple_species) {
                TransportStepResult sr = transport_react_step(species, model, u, config.dt,
                                                              config.transport);
                clamp_mass = sr.clamp_mass;
                if (config.track_b_decomposition) {
                    decomp = evolve_b_decomposition(decomp, model, species, sr.species, u,
                                                    config.dt, config.transport);
                    b_err = decomp.identity_error(model);
                }
                next_species = std::move(sr.species);
                require(next_species.finite(), "simulate: species went non-finite");
            }

            MomentumStepInput input{next_species, next_species, config.vmodel, nullptr,
                                    have_ut ? &u_t : nullptr};
            FlowState state{u, ScalarField(grid), t};
            FlowState next = nonlinear_momentum_step(state, input, config.dt);

            u_t = backward_difference(next.u, u, config.dt);
            have_ut = true;
            u = std::move(next.u);
            species = std::move(next_species);
            t += config.dt;

            traj.push_step(make_step_row(t, species, u, model, config, clamp_mass, b_err));
            if ((m + 1) % static_cast<std::size_t>(config.snapshot_every) == 0 || m + 1 == steps) {
                traj.push_sample({t, u, u_t, true, species});
            }
        }
        result.completed = true;
    } catch (const GuardAbort& e) {
        result.completed = false;
        result.guard_reason = e.what();
    }
    return result;
}

double contraction_metric(const DifferenceSeries& series) {
    const std::size_t n = series.stamps.size();
    require(n >= 2, "contraction metric: need at least two samples");
    require(series.species_l2.size() == n && series.u_l2.size() == n && series.grad_u_l2.size() == n,
            "contraction metric: misaligned series");
    for (std::size_t i = 1; i < n; ++i) {
        require(series.stamps[i] > series.stamps[i - 1], "contraction metric: stamps must increase");
    }
    double weighted_sup = 0.0;
    double u_sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = series.stamps[i];
        if (t > 0.0) {
            weighted_sup = std::max(weighted_sup, series.species_l2[i] / std::sqrt(t));
        } else {
            require(series.species_l2[i] == 0.0,
                    "contraction metric: weighted term undefined at t = 0 with nonzero difference");
        }
        u_sup = std::max(u_sup, series.u_l2[i]);
    }
    KahanSum quad;
    for (std::size_t i = 1; i < n; ++i) {
        const double dt = series.stamps[i] - series.stamps[i - 1];
        const double a = series.grad_u_l2[i - 1];
        const double b = series.grad_u_l2[i];
        quad.add(0.5 * dt * (a * a + b * b));
    }
    return weighted_sup + u_sup + std::sqrt(quad.value());
}

std::vector<double> PicardReport::ratios() const {
    std::vector<double> out;
    for (std::size_t i = 1; i < metrics.size(); ++i) {
        if (metrics[i - 1] > 0.0) out.push_back(metrics[i] / metrics[i - 1]);
    }
    return out;
}

namespace {

struct IterateLevels {
    std::vector<SpeciesState> species;  // one per time level, including t = 0
    std::vector<VectorField> u;
};

double stacked_species_l2(const SpeciesState& x, const SpeciesState& y) {
    KahanSum acc;
    for (int i = 0; i < x.species_count(); ++i) {
        ScalarField diff = x.component(i) - y.component(i);
        const double norm = spatial_norm(diff, 2.0);
        acc.add(norm * norm);
    }
    return std::sqrt(acc.value());
}

}  // namespace

namespace {

PicardResult picard_segment_from(const RunConfig& config, double segment_horizon,
                                 const SpeciesState& species0, const VectorField& u0,
                                 double t_offset) {
    const GridPtr grid = species0.grid_ptr();
    const ReactionModel& model = config.model;
    const auto steps = static_cast<std::size_t>(std::llround(segment_horizon / config.dt));
    require(steps >= 2, "picard: segment shorter than two steps");

    // iterate 0: u == 0 at every level, species transported by zero velocity
    IterateLevels prev;
    prev.u.assign(steps + 1, VectorField(grid));
    prev.species.reserve(steps + 1);
    prev.species.push_back(species0);
    {
        const VectorField zero(grid);
        SpeciesState s = species0;
        for (std::size_t m = 0; m < steps; ++m) {
            s = transport_react_step(s, model, zero, config.dt, config.transport).species;
            prev.species.push_back(s);
        }
    }

    PicardResult result;
    PicardReport& report = result.report;
    IterateLevels cur;
    for (int iter = 0; iter < config.picard_max_iterations; ++iter) {
        cur.species.clear();
        cur.u.clear();
        cur.species.reserve(steps + 1);
        cur.u.reserve(steps + 1);
        cur.species.push_back(species0);
        cur.u.push_back(u0);

        // species transported by the frozen previous velocity
        for (std::size_t m = 0; m < steps; ++m) {
            cur.species.push_back(transport_react_step(cur.species.back(), model, prev.u[m],
                                                       config.dt, config.transport)
                                      .species);
        }
        // linearized momentum: transport velocity u^n, coefficients rho^{n+1},
        // viscosity from rho^n
        VectorField u_t(grid);
        bool have_ut = false;
        for (std::size_t m = 0; m < steps; ++m) {
            MomentumStepInput input{cur.species[m + 1], prev.species[m + 1], config.vmodel,
                                    &prev.u[m], have_ut ? &u_t : nullptr};
            FlowState state{cur.u.back(), ScalarField(grid), static_cast<double>(m) * config.dt};
            FlowState next = nonlinear_momentum_step(state, input, config.dt);
            u_t = backward_difference(next.u, cur.u.back(), config.dt);
            have_ut = true;
            cur.u.push_back(std::move(next.u));
        }

        DifferenceSeries diff;
        for (std::size_t m = 0; m <= steps; ++m) {
            diff.stamps.push_back(static_cast<double>(m) * config.dt);
            diff.species_l2.push_back(stacked_species_l2(cur.species[m], prev.species[m]));
            VectorField du = cur.u[m] - prev.u[m];
            diff.u_l2.push_back(spatial_norm(du, 2.0));
            diff.grad_u_l2.push_back(spatial_norm(gradient_magnitude(du), 2.0));
        }
        // at t = 0 both iterates share the initial data exactly
        diff.species_l2.front() = 0.0;
        const double metric = contraction_metric(diff);
        report.metrics.push_back(metric);
        report.iterations = iter + 1;
        prev = cur;
        if (metric < config.picard_tolerance) {
            report.converged = true;
            break;
        }
    }
    {
        const auto ratios = report.ratios();
        report.slow_contraction_flag = ratios.size() >= 3 && ratios[2] > 0.5;
    }

    // assemble the last iterate into a trajectory
    Trajectory& traj = result.trajectory;
    for (std::size_t m = 0; m <= steps; ++m) {
        const double t = t_offset + static_cast<double>(m) * config.dt;
        TrajectorySample sample{t, prev.u[m], VectorField(grid), false, prev.species[m]};
        if (m > 0) {
            sample.u_t = backward_difference(prev.u[m], prev.u[m - 1], config.dt);
            sample.has_ut = true;
        }
        traj.push_sample(std::move(sample));
        traj.push_step(make_step_row(t, prev.species[m], prev.u[m], model, config, 0.0, 0.0));
    }
    return result;
}

}  // namespace

PicardResult picard_segment(const RunConfig& config, double segment_horizon) {
    config.validate();
    require(segment_horizon > 0.0, "picard: segment horizon must be positive");
    const GridPtr grid = config.make_run_grid();
    const SpeciesState species0 = build_initial_species(grid, config.model, config.initial);
    const VectorField u0 = build_initial_velocity(grid, config.initial);
    return picard_segment_from(config, segment_horizon, species0, u0, 0.0);
}

PicardChainResult picard_chain(const RunConfig& config, double segment_horizon, int segments) {
    config.validate();
    require(segments >= 1, "picard chain: need at least one segment");
    const GridPtr grid = config.make_run_grid();
    SpeciesState species = build_initial_species(grid, config.model, config.initial);
    VectorField u = build_initial_velocity(grid, config.initial);

    PicardChainResult out;
    out.all_converged = true;
    double t_offset = 0.0;
    for (int seg = 0; seg < segments; ++seg) {
        PicardResult result = picard_segment_from(config, segment_horizon, species, u, t_offset);
        const auto& samples = result.trajectory.samples();
        species = *samples.back().species;
        u = samples.back().u;
        // glue, dropping the duplicated segment-start sample
        const std::size_t first = seg == 0 ? 0 : 1;
        for (std::size_t i = first; i < samples.size(); ++i) {
            out.trajectory.push_sample(samples[i]);
        }
        const auto& rows = result.trajectory.steps();
        for (std::size_t i = first; i < rows.size(); ++i) {
            out.trajectory.push_step(rows[i]);
        }
        out.segment_reports.push_back(result.report);
        out.all_converged = out.all_converged && result.report.converged;
        t_offset += segment_horizon;
    }
    return out;
}

Theorem1Report theorem1_report(const Trajectory& traj) {
    require(traj.samples().size() >= 3, "theorem1 report: too few snapshots");
    Theorem1Report report;
    report.horizon = traj.horizon();
    report.u_W21_2_43_1 = w21_norm(traj, 2.0, 4.0 / 3.0, 1.0);
    report.u_W21_54_54_1 = w21_norm(traj, 5.0 / 4.0, 5.0 / 4.0, 1.0);
    report.tu_W21_6_4_1 = w21_norm(traj, 6.0, 4.0, 1.0, TimeWeighting::linear);
    report.tu_W21_2_4_1 = w21_norm(traj, 2.0, 4.0, 1.0, TimeWeighting::linear);

    const auto grad_integral = traj.grad_u_inf_integral();
    report.grad_u_integral = grad_integral.total;
    report.grad_u_integral_tail = grad_integral.last_quarter;

    for (const auto& sample : traj.samples()) {
        if (!sample.species) continue;
        const SpeciesState& s = *sample.species;
        double dev = 0.0;
        for (int i = 0; i < s.species_count(); ++i) {
            ScalarField diff = s.component(i);
            if (i == 0) {
                auto v = diff.values_mut();
                for (auto& x : v) x -= 1.0;
            }
            dev = std::max(dev, spatial_norm(diff, kInfinity));
        }
        report.rho_deviation_inf = std::max(report.rho_deviation_inf, dev);
        const VectorField grad_rho = gradient(s.total_density());
        report.grad_rho_l3 = std::max(report.grad_rho_l3, spatial_norm(grad_rho, 3.0));
        report.grad_rho_l6 = std::max(report.grad_rho_l6, spatial_norm(grad_rho, 6.0));
    }

    const double den = std::sqrt(report.tu_W21_6_4_1.value * report.u_W21_2_43_1.value);
    report.lemma4_ratio = den > 1e-300 ? report.grad_u_integral / den : 0.0;
    return report;
}

bool Theorem1Report::finite() const {
    for (double v : {u_W21_2_43_1.value, u_W21_54_54_1.value, tu_W21_6_4_1.value,
                     tu_W21_2_4_1.value, grad_u_integral, rho_deviation_inf, grad_rho_l3,
                     grad_rho_l6}) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

double Theorem1Report::total() const {
    return u_W21_2_43_1.value + u_W21_54_54_1.value + tu_W21_6_4_1.value + tu_W21_2_4_1.value +
           grad_u_integral + rho_deviation_inf + grad_rho_l3 + grad_rho_l6;
}

double lemma4_embedding_check(const Trajectory& traj) {
    const Theorem1Report report = theorem1_report(traj);
    const double den = std::sqrt(report.tu_W21_6_4_1.value * report.u_W21_2_43_1.value);
    require(den > 1e-300, "lemma4 check: degenerate denominator");
    return report.grad_u_integral / den;
}

}  // namespace mixflow
