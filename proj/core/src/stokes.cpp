#include "mixflow/stokes.hpp"

#include <cmath>

#include "mixflow/util.hpp"

namespace mixflow {

FlowState FlowState::rest(const GridPtr& grid) {
    return FlowState{VectorField(grid), ScalarField(grid), 0.0};
}

FlowState stokes_implicit_step(const VectorField& u, const VectorField& f, double nu_bar,
                               double dt) {
    require(dt > 0.0, "stokes step: dt must be positive");
    require(nu_bar > 0.0, "stokes step: viscosity must be positive");
    require(f.finite(), "stokes step: forcing must be finite");
    const Grid& g = u.grid();
    require(g.same_layout(f.grid()), "stokes step: forcing grid mismatch");
    const int d = g.dim();

    FlowState next{VectorField(u.grid_ptr()), ScalarField(u.grid_ptr()), 0.0};
    std::vector<std::span<const std::complex<double>>> uc, fc;
    for (int c = 0; c < d; ++c) uc.push_back(u[c].spectral());
    for (int c = 0; c < d; ++c) fc.push_back(f[c].spectral());
    std::vector<std::span<std::complex<double>>> nc;
    for (int c = 0; c < d; ++c) nc.push_back(next.u[c].spectral_mut());
    auto pc = next.pi.spectral_mut();

    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const auto j = g.unflatten(flat);
        double k[3] = {0.0, 0.0, 0.0};
        double ksq = 0.0;
        for (int a = 0; a < d; ++a) {
            k[a] = g.wavenumber_of(j[static_cast<std::size_t>(a)]);
            ksq += k[a] * k[a];
        }
        std::complex<double> kdotf = 0.0;
        for (int a = 0; a < d; ++a) kdotf += k[a] * fc[static_cast<std::size_t>(a)][flat];
        const double damp = 1.0 / (1.0 + nu_bar * ksq * dt);
        if (ksq == 0.0) {
            for (int c = 0; c < d; ++c) {
                nc[static_cast<std::size_t>(c)][flat] = uc[static_cast<std::size_t>(c)][flat] +
                                                        dt * fc[static_cast<std::size_t>(c)][flat];
            }
            pc[flat] = 0.0;
            continue;
        }
        for (int c = 0; c < d; ++c) {
            const std::complex<double> pf =
                fc[static_cast<std::size_t>(c)][flat] - k[c] * kdotf / ksq;
            nc[static_cast<std::size_t>(c)][flat] =
                (uc[static_cast<std::size_t>(c)][flat] + dt * pf) * damp;
        }
        // grad pi = (I - P) f  =>  pi_hat = -i (k . f_hat)/|k|^2
        pc[flat] = std::complex<double>(0.0, -1.0) * kdotf / ksq;
    }
    return next;
}

ForcingParts momentum_forcing(const SpeciesState& coeff_species, const SpeciesState& visc_species,
                              const ViscosityModel& vmodel, const VectorField& u,
                              const VectorField& w, const VectorField* u_t) {
    const Grid& g = u.grid();
    const GridPtr& gp = u.grid_ptr();
    const int d = g.dim();
    const std::size_t size = g.size();

    ForcingParts parts{VectorField(gp)};

    // F1 = (1 - rho) u_t
    const ScalarField rho = coeff_species.total_density();
    if (u_t != nullptr) {
        VectorField f1(gp);
        auto rv = rho.values();
        for (int c = 0; c < d; ++c) {
            auto dst = f1[c].values_mut();
            auto ut = (*u_t)[c].values();
            for (std::size_t i = 0; i < size; ++i) dst[i] = (1.0 - rv[i]) * ut[i];
        }
        f1.dealias();
        parts.norm_density_defect = spatial_norm(f1, 2.0);
        parts.total += f1;
    }

    // F2 = -rho * skew(w, u); skew form keeps the discrete energy pairing clean
    {
        VectorField conv(gp);
        for (int c = 0; c < d; ++c) {
            ScalarField adv = convect(w, u[c]);  // w . grad u_c
            ScalarField div_form(gp);
            for (int a = 0; a < d; ++a) {
                div_form += derivative(multiply_dealiased(w[a], u[c]), a);
            }
            div_form.dealias();
            adv += div_form;
            adv *= 0.5;
            conv[c] = std::move(adv);
        }
        VectorField f2(gp);
        auto rv = rho.values();
        for (int c = 0; c < d; ++c) {
            auto dst = f2[c].values_mut();
            auto cv = conv[c].values();
            for (std::size_t i = 0; i < size; ++i) dst[i] = -rv[i] * cv[i];
        }
        f2.dealias();
        parts.norm_convection = spatial_norm(f2, 2.0);
        parts.total += f2;
    }

    // F3 = (nu(rho) - nu_bar) Lap u
    {
        const ScalarField nu = viscosity_field(vmodel, visc_species);
        VectorField f3(gp);
        auto nv = nu.values();
        for (int c = 0; c < d; ++c) {
            ScalarField lap = laplacian(u[c]);
            auto dst = f3[c].values_mut();
            auto lv = lap.values();
            for (std::size_t i = 0; i < size; ++i) dst[i] = (nv[i] - vmodel.nu_bar) * lv[i];
        }
        f3.dealias();
        parts.norm_viscosity_defect = spatial_norm(f3, 2.0);
        parts.total += f3;
    }

    // F4 = sum_i dnu/drho_i grad rho_i : D(u), the full chain rule over species
    if (!vmodel.slope.empty()) {
        const int count = visc_species.species_count();
        // D(u)_{ac} = d_a u_c + d_c u_a
        std::vector<ScalarField> du;  // d_a u_c at index a*d+c
        du.reserve(static_cast<std::size_t>(d * d));
        for (int a = 0; a < d; ++a) {
            for (int c = 0; c < d; ++c) du.push_back(derivative(u[c], a));
        }
        // sum_i dnu_i * grad rho_i, assembled pointwise component by component
        std::vector<std::span<const double>> comps;
        for (int i = 0; i < count; ++i) comps.push_back(visc_species.component(i).values());
        std::vector<std::vector<double>> grad_nu(static_cast<std::size_t>(d),
                                                 std::vector<double>(size, 0.0));
        std::vector<double> rho_point(static_cast<std::size_t>(count));
        std::vector<VectorField> grads;
        grads.reserve(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i) {
            grads.push_back(gradient(visc_species.component(i)));
        }
        for (std::size_t x = 0; x < size; ++x) {
            for (int i = 0; i < count; ++i) rho_point[static_cast<std::size_t>(i)] = comps[static_cast<std::size_t>(i)][x];
            const std::vector<double> dnu = vmodel.gradient(rho_point);
            for (int a = 0; a < d; ++a) {
                double acc = 0.0;
                for (int i = 0; i < count; ++i) {
                    if (dnu[static_cast<std::size_t>(i)] == 0.0) continue;
                    acc += dnu[static_cast<std::size_t>(i)] * grads[static_cast<std::size_t>(i)][a].values()[x];
                }
                grad_nu[static_cast<std::size_t>(a)][x] = acc;
            }
        }
        VectorField f4(gp);
        for (int c = 0; c < d; ++c) {
            auto dst = f4[c].values_mut();
            for (int a = 0; a < d; ++a) {
                auto dac = du[static_cast<std::size_t>(a * d + c)].values();
                auto dca = du[static_cast<std::size_t>(c * d + a)].values();
                const auto& gn = grad_nu[static_cast<std::size_t>(a)];
                for (std::size_t i = 0; i < size; ++i) dst[i] += gn[i] * (dac[i] + dca[i]);
            }
        }
        f4.dealias();
        parts.norm_viscosity_gradient = spatial_norm(f4, 2.0);
        parts.total += f4;
    }

    parts.total.dealias();
    return parts;
}

namespace {

FlowState guarded_implicit_step(const FlowState& state, const VectorField& forcing,
                                double nu_bar, double dt) {
    FlowState next = stokes_implicit_step(state.u, forcing, nu_bar, dt);
    next.t = state.t + dt;
    const double before = spatial_norm(state.u, kInfinity);
    const double after = spatial_norm(next.u, kInfinity);
    if (!next.u.finite() || (before > 0.0 && after > 10.0 * std::max(before, 1e-12))) {
        throw GuardAbort("momentum step: velocity grew more than tenfold");
    }
    return next;
}

}  // namespace

FlowState nonlinear_momentum_step(const FlowState& state, const MomentumStepInput& input,
                                  double dt) {
    const VectorField& w = input.transport_velocity ? *input.transport_velocity : state.u;
    const ForcingParts forcing = momentum_forcing(input.coeff_species, input.visc_species,
                                                  input.vmodel, state.u, w, input.u_t);
    return guarded_implicit_step(state, forcing.total, input.vmodel.nu_bar, dt);
}

FlowState nonlinear_momentum_step_extrapolated(const FlowState& state,
                                               const MomentumStepInput& input, double dt,
                                               std::optional<VectorField>& forcing_memory) {
    const VectorField& w = input.transport_velocity ? *input.transport_velocity : state.u;
    ForcingParts forcing = momentum_forcing(input.coeff_species, input.visc_species, input.vmodel,
                                            state.u, w, input.u_t);
    VectorField applied = forcing.total;
    if (forcing_memory.has_value()) {
        applied *= 1.5;
        VectorField old = std::move(*forcing_memory);
        old *= 0.5;
        applied -= old;
    }
    forcing_memory = std::move(forcing.total);
    return guarded_implicit_step(state, applied, input.vmodel.nu_bar, dt);
}

void StokesProbeConfig::validate() const {
    require(dim == 2 || dim == 3, "stokes probe: dim must be 2 or 3");
    require(dt > 0.0 && nu > 0.0, "stokes probe: dt and nu must be positive");
    require(!horizons.empty(), "stokes probe: no horizons");
    for (std::size_t i = 1; i < horizons.size(); ++i) {
        require(horizons[i] > horizons[i - 1], "stokes probe: horizons must increase");
    }
    require(!forcing_modes.empty() || !initial_modes.empty(), "stokes probe: zero data");
}

VectorField realize_modes(const GridPtr& grid, const std::vector<ProbeMode>& modes) {
    VectorField v(grid);
    const Grid& g = *grid;
    for (const auto& mode : modes) {
        std::array<int, 3> slot = {0, 0, 0};
        for (int dcomp = 0; dcomp < g.dim(); ++dcomp) {
            int idx = mode.index[static_cast<std::size_t>(dcomp)];
            require(std::abs(idx) < g.n() / 2, "probe mode: index beyond Nyquist");
            slot[static_cast<std::size_t>(dcomp)] = idx >= 0 ? idx : idx + g.n();
        }
        const std::size_t flat = g.flatten(slot);
        const std::size_t conj = g.conjugate_slot(flat);
        for (int c = 0; c < g.dim(); ++c) {
            auto coefs = v[c].spectral_mut();
            const double amp = 0.5 * mode.amplitude[static_cast<std::size_t>(c)];
            coefs[flat] += amp;
            coefs[conj] += amp;  // cosine profile, real field
        }
    }
    return leray_project(v);
}

double profile_value(TimeProfile profile, double rate, double t) {
    switch (profile) {
        case TimeProfile::constant: return 1.0;
        case TimeProfile::indicator_unit: return t < 1.0 ? 1.0 : 0.0;
        case TimeProfile::exponential: return std::exp(-rate * t);
    }
    return 0.0;
}

std::vector<RegularityRatio> maximal_regularity_ratio(const StokesProbeConfig& probe) {
    probe.validate();
    const GridPtr grid = make_grid(probe.dim, probe.extent, probe.points_per_axis);
    const VectorField u0 = realize_modes(grid, probe.initial_modes);
    const VectorField f_shape = realize_modes(grid, probe.forcing_modes);
    const BesovIndex trace_idx{2.0 - 2.0 / probe.q, probe.p, probe.r};
    const double u0_besov = besov_norm(u0, trace_idx, Homogeneity::homogeneous).value;

    std::vector<RegularityRatio> ladder;
    for (double horizon : probe.horizons) {
        Trajectory traj;
        std::vector<double> f_stamps;
        std::vector<double> f_norms;
        VectorField u = u0;
        VectorField u_prev = u0;
        double t = 0.0;
        traj.push_sample({t, u, VectorField(grid), false, std::nullopt});
        f_stamps.push_back(t);
        f_norms.push_back(profile_value(probe.forcing_profile, probe.profile_rate, t) *
                          spatial_norm(f_shape, probe.p));
        const auto steps = static_cast<std::size_t>(std::llround(horizon / probe.dt));
        // keep at most ~400 stored samples per horizon; the forcing norm
        // series stays at full step resolution
        const std::size_t cadence = std::max<std::size_t>(1, steps / 400);
        for (std::size_t m = 0; m < steps; ++m) {
            VectorField f = f_shape;
            f *= profile_value(probe.forcing_profile, probe.profile_rate, t);
            FlowState next = stokes_implicit_step(u, f, probe.nu, probe.dt);
            u_prev = u;
            u = next.u;
            t += probe.dt;
            if ((m + 1) % cadence == 0 || m + 1 == steps) {
                VectorField ut = u;
                ut -= u_prev;
                ut *= 1.0 / probe.dt;
                traj.push_sample({t, u, std::move(ut), true, std::nullopt});
            }
            f_stamps.push_back(t);
            f_norms.push_back(profile_value(probe.forcing_profile, probe.profile_rate, t) *
                              spatial_norm(f_shape, probe.p));
        }

        const W21Result w21 = w21_norm(traj, probe.p, probe.q, probe.r);
        WeightedSamples f_samples;
        f_samples.values = f_norms;
        f_samples.weights = time_cells(f_stamps);
        const double f_norm = lorentz_norm(f_samples, LorentzIndex{probe.q, probe.r});

        RegularityRatio point;
        point.horizon = horizon;
        point.numerator_trace = w21.trace_sup;
        point.numerator_dt = w21.dt_part;
        point.numerator_hessian = probe.nu * w21.hessian_part;
        point.denominator_forcing = f_norm;
        point.denominator_initial = u0_besov;
        const double den = f_norm + u0_besov;
        require(den > 1e-14, "maximal regularity ratio: degenerate denominator");
        point.ratio = (point.numerator_trace + point.numerator_dt + point.numerator_hessian) / den;
        ladder.push_back(point);
    }
    return ladder;
}

double embedding_probe(const Trajectory& traj, double s, double m, double q, double r, double p,
                       EmbeddingTarget which) {
    require(!traj.samples().empty(), "embedding probe: empty trajectory");
    const double d = traj.samples().front().u.grid().dim();
    const double lhs = which == EmbeddingTarget::velocity ? d / (2.0 * m) + 1.0 / s
                                                          : d / m + 2.0 / s;
    const double rhs = which == EmbeddingTarget::velocity ? 1.0 / q + d / (2.0 * p) - 1.0
                                                          : 2.0 / q + d / p - 1.0;
    require(std::abs(lhs - rhs) <= 1e-12, "embedding probe: exponent relation violated");

    const FieldSelector selector = which == EmbeddingTarget::velocity
                                       ? FieldSelector::velocity
                                       : FieldSelector::velocity_gradient;
    const double numerator = spacetime_lorentz_norm(traj, selector, s, r, m).value;
    const double denominator = w21_norm(traj, p, q, r).value;
    if (numerator == 0.0 && denominator == 0.0) return 0.0;  // zero trajectory
    require(denominator > 1e-300, "embedding probe: degenerate denominator");
    return numerator / denominator;
}

}  // namespace mixflow
