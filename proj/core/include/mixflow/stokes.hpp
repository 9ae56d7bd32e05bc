#pragma once

#include <array>
#include <optional>

#include "mixflow/trajectory.hpp"
#include "mixflow/transport.hpp"

namespace mixflow {

/// Raised when a step trips the blow-up or NaN guard; maps to exit code 2.
struct GuardAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Velocity (divergence-free) and zero-mean diagnostic pressure at one time.
struct FlowState {
    VectorField u;
    ScalarField pi;
    double t = 0.0;

    static FlowState rest(const GridPtr& grid);
};

/// One unconditionally stable implicit step of u_t - nu Lap u + grad pi = f:
/// per mode u <- (u + dt P f)/(1 + nu |k|^2 dt), P the Leray projector; the
/// pressure is recovered from the projected-out component of f.
FlowState stokes_implicit_step(const VectorField& u, const VectorField& f, double nu_bar,
                               double dt);

/// The perturbation forcing
///   F = (1-rho) u_t - rho w.grad u + (nu(rho)-nu_bar) Lap u
///       + sum_i dnu/drho_i grad rho_i : D(u),      D(u) = grad u + (grad u)^T
/// with spectral derivatives, dealiased products, and the convection term
/// assembled in skew-symmetric form. `u_t` may be null on the first step.
struct ForcingParts {
    VectorField total;
    double norm_density_defect = 0.0;  // ||(1-rho) u_t||_2
    double norm_convection = 0.0;      // ||rho w.grad u||_2
    double norm_viscosity_defect = 0.0;
    double norm_viscosity_gradient = 0.0;
};
ForcingParts momentum_forcing(const SpeciesState& coeff_species, const SpeciesState& visc_species,
                              const ViscosityModel& vmodel, const VectorField& u,
                              const VectorField& w, const VectorField* u_t);

/// One IMEX step of u_t - nu_bar Lap u + grad p = F: F explicit from
/// momentum_forcing, nu_bar-diffusion implicit. Throws GuardAbort when
/// ||u||_inf grows more than tenfold in one step.
struct MomentumStepInput {
    const SpeciesState& coeff_species;          // rho multiplying u_t and convection
    const SpeciesState& visc_species;           // state feeding nu(.)
    const ViscosityModel& vmodel;
    const VectorField* transport_velocity = nullptr;  // defaults to the state's own u
    const VectorField* u_t = nullptr;                 // previous backward difference
};
FlowState nonlinear_momentum_step(const FlowState& state, const MomentumStepInput& input,
                                  double dt);

/// Second-order variant: the explicit forcing is extrapolated over the two
/// latest levels, 3/2 F^n - 1/2 F^{n-1}. `forcing_memory` carries F^{n-1} in
/// and F^n out; an empty memory falls back to the plain step.
FlowState nonlinear_momentum_step_extrapolated(const FlowState& state,
                                               const MomentumStepInput& input, double dt,
                                               std::optional<VectorField>& forcing_memory);

/// Deterministic single-mode recipes for linear Stokes probes.
struct ProbeMode {
    std::array<int, 3> index = {1, 0, 0};
    std::array<double, 3> amplitude = {0.0, 1.0, 0.0};
};
enum class TimeProfile { constant, indicator_unit, exponential };

struct StokesProbeConfig {
    int dim = 3;
    int points_per_axis = 16;
    double extent = 2.0 * 3.14159265358979323846;
    double nu = 1.0;
    double dt = 0.005;
    std::vector<ProbeMode> forcing_modes;
    TimeProfile forcing_profile = TimeProfile::indicator_unit;
    double profile_rate = 1.0;  // decay rate for the exponential profile
    std::vector<ProbeMode> initial_modes;
    double p = 2.0;
    double q = 4.0 / 3.0;
    double r = 1.0;
    std::vector<double> horizons = {1.0, 2.0, 4.0, 8.0};

    void validate() const;
};

/// R(T) = [||u||_{L_inf B} + ||u_t||_{L_{q,r}L_p} + nu ||grad^2 u||_{L_{q,r}L_p}]
///        / [||f||_{L_{q,r}L_p} + ||u_0||_{B^{2-2/q}_{p,r}}]
/// for every horizon in the ladder. The Theorem's claim is that these ratios
/// do not drift with T.
struct RegularityRatio {
    double horizon = 0.0;
    double ratio = 0.0;
    double numerator_trace = 0.0;
    double numerator_dt = 0.0;
    double numerator_hessian = 0.0;
    double denominator_forcing = 0.0;
    double denominator_initial = 0.0;
};
std::vector<RegularityRatio> maximal_regularity_ratio(const StokesProbeConfig& probe);

/// Fields build-able from probe recipes (also used by tests).
VectorField realize_modes(const GridPtr& grid, const std::vector<ProbeMode>& modes);
double profile_value(TimeProfile profile, double rate, double t);

enum class EmbeddingTarget { velocity, gradient };

/// || u ||_{L_{s,r}(L_m)} (or the gradient variant) divided by the
/// maximal-regularity norm at (p,q,r); requires the scaling relation
///   d/(2m) + 1/s = 1/q + d/(2p) - 1     (velocity)
///   d/m   + 2/s = 2/q + d/p   - 1       (gradient)
/// to hold to 1e-12.
double embedding_probe(const Trajectory& traj, double s, double m, double q, double r, double p,
                       EmbeddingTarget which);

}  // namespace mixflow
