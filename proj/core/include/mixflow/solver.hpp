#pragma once

#include <cstdint>
#include <string>

#include "mixflow/stokes.hpp"

namespace mixflow {

/// Synthetic initial data: random band-limited fields scaled to a target
/// amplitude, reproducible from the seed.
struct InitialData {
    enum class VelocityProfile { random_solenoidal, taylor_green };
    enum class DilutantMode {
        unit,        // w = 1, total density 1 + sum a + sum b
        complement,  // w = 1 - sum a - sum b, total density exactly 1
    };

    double u_amplitude = 0.05;
    int u_modes = 2;
    VelocityProfile u_profile = VelocityProfile::random_solenoidal;
    double a_amplitude = 0.05;
    double b_amplitude = 0.0;
    int species_modes = 2;
    DilutantMode w_mode = DilutantMode::unit;
    std::uint64_t seed = 1;
};

struct RunConfig {
    int dim = 3;
    double extent = 2.0 * 3.14159265358979323846;
    int points_per_axis = 32;

    ReactionModel model = ReactionModel::toymodel();
    ViscosityModel vmodel{1.0, {0.05, 0.05, 0.05, 0.05}, 0.1};
    InitialData initial;

    double dt = 0.01;
    double t_max = 2.0;
    int snapshot_every = 5;

    TransportConfig transport;
    bool couple_species = true;  // off: species frozen, pure Navier-Stokes path
    bool track_b_decomposition = true;
    bool record_grad_power = true;

    int picard_max_iterations = 12;
    double picard_tolerance = 1e-9;
    double picard_segment = 0.5;

    void validate() const;
    GridPtr make_run_grid() const;
};

SpeciesState build_initial_species(const GridPtr& grid, const ReactionModel& model,
                                   const InitialData& init);
VectorField build_initial_velocity(const GridPtr& grid, const InitialData& init);

struct SimulateResult {
    Trajectory trajectory;
    bool completed = false;
    std::string guard_reason;
};

/// March the coupled system over [0, t_max]: one transport-reaction step with
/// the start-of-step velocity, then one IMEX momentum step seeing the fresh
/// species. Guard trips abort cleanly with the partial trajectory.
SimulateResult simulate(const RunConfig& config);

/// Aligned difference series between two iterates; the substrate of the
/// contraction metric.
struct DifferenceSeries {
    std::vector<double> stamps;
    std::vector<double> species_l2;  // || delta rho_vec (t) ||_{L_2}
    std::vector<double> u_l2;        // || delta u (t) ||_{L_2}
    std::vector<double> grad_u_l2;   // || grad delta u (t) ||_{L_2}
};

/// ||t^{-1/2} delta rho||_{L_inf(L_2)} + ||delta u||_{L_inf(L_2)}
///   + ||grad delta u||_{L_2(0,T;L_2)},
/// the weighted term evaluated at positive stamps only and the time integral
/// by the trapezoid rule.
double contraction_metric(const DifferenceSeries& series);

struct PicardReport {
    std::vector<double> metrics;  // metric of successive differences, per iteration
    bool converged = false;
    int iterations = 0;
    /// Set when the contraction ratio has not dropped to 1/2 by iteration 3.
    bool slow_contraction_flag = false;
    std::vector<double> ratios() const;
};

/// The decoupled successive-approximation scheme: from u^n, solve species
/// transport with frozen u^n, then the linearized momentum equation with
/// coefficients rho^{n+1}, transport velocity u^n and viscosity nu(rho^n).
/// Starts from u^0 = 0.
struct PicardResult {
    Trajectory trajectory;
    PicardReport report;
};
PicardResult picard_segment(const RunConfig& config, double segment_horizon);

/// Global runs restart the iteration from each segment's end state; the glued
/// trajectory carries absolute stamps.
struct PicardChainResult {
    Trajectory trajectory;
    std::vector<PicardReport> segment_reports;
    bool all_converged = false;
};
PicardChainResult picard_chain(const RunConfig& config, double segment_horizon, int segments);

struct Theorem1Report {
    W21Result u_W21_2_43_1;    // u in W^{2,1}_{2,(4/3,1)}
    W21Result u_W21_54_54_1;   // u in W^{2,1}_{5/4,(5/4,1)}
    W21Result tu_W21_6_4_1;    // tu in W^{2,1}_{6,(4,1)}
    W21Result tu_W21_2_4_1;    // tu in W^{2,1}_{2,(4,1)}
    double grad_u_integral = 0.0;       // int_0^T ||grad u||_inf dt
    double grad_u_integral_tail = 0.0;  // last-quarter share of the integral
    double rho_deviation_inf = 0.0;     // sup_t max_i ||rho_i - e1_i||_inf
    double grad_rho_l3 = 0.0;           // sup_t ||grad rho||_{L_3}
    double grad_rho_l6 = 0.0;
    double lemma4_ratio = 0.0;
    double horizon = 0.0;

    bool finite() const;
    /// Sum of every left-hand-side quantity; the scalar that must shrink
    /// with the data.
    double total() const;
};

Theorem1Report theorem1_report(const Trajectory& traj);

/// int ||grad u||_inf dt / (||tu||^{1/2}_{W_{6,(4,1)}} ||u||^{1/2}_{W_{2,(4/3,1)}}).
double lemma4_embedding_check(const Trajectory& traj);

}  // namespace mixflow
