#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mixflow/besov.hpp"
#include "mixflow/lorentz.hpp"
#include "mixflow/reactions.hpp"

namespace mixflow {

/// One stored time level: velocity, its backward time difference, and
/// (for coupled runs) the species state.
struct TrajectorySample {
    double t = 0.0;
    VectorField u;
    VectorField u_t;
    bool has_ut = false;
    std::optional<SpeciesState> species;
};

/// Cheap scalars recorded at every step of a run.
struct StepScalars {
    double t = 0.0;
    double grad_u_inf = 0.0;
    double u_inf = 0.0;
    double u_l2 = 0.0;
    double u_l3 = 0.0;
    double energy = 0.0;  // int rho |u|^2 / 2
    double min_species = 0.0;
    double clamp_mass = 0.0;
    double reacting_mass = 0.0;  // int (sum a + sum b)
    double sup_w = 0.0;
    std::vector<double> sup_a;
    std::vector<double> sup_b;
    double grad_power_p3 = 0.0;
    double grad_power_p6 = 0.0;
    double b_identity_error = 0.0;
};

/// Time-stamped snapshot sequence plus per-step diagnostics; the substrate
/// every Lorentz-in-time norm is computed from.
class Trajectory {
  public:
    void push_sample(TrajectorySample sample);
    void push_step(StepScalars row);

    const std::vector<TrajectorySample>& samples() const { return samples_; }
    const std::vector<StepScalars>& steps() const { return steps_; }
    std::vector<StepScalars>& steps_mut() { return steps_; }

    bool empty() const { return samples_.empty(); }
    double horizon() const { return samples_.empty() ? 0.0 : samples_.back().t; }

    /// Trapezoid integral of ||grad u||_inf over the per-step records, plus
    /// the contribution of the last quarter of the horizon.
    struct GradUIntegral {
        double total = 0.0;
        double last_quarter = 0.0;
    };
    GradUIntegral grad_u_inf_integral() const;

  private:
    std::vector<TrajectorySample> samples_;
    std::vector<StepScalars> steps_;
};

/// Midpoint time cells around sorted stamps; cells tile [t_0, t_N] exactly.
std::vector<double> time_cells(const std::vector<double>& stamps);

enum class FieldSelector {
    velocity,
    velocity_time_derivative,
    velocity_gradient,
    velocity_second_gradient,
};

enum class TimeWeighting {
    none,    // z = u
    linear,  // z = t u, with (tu)_t = u + t u_t
};

/// L_{q,r}(0,T; L_p) of the selected field: builds WeightedSamples from
/// ||field(t_i)||_p with midpoint time cells and applies the Lorentz norm.
NormReport spacetime_lorentz_norm(const Trajectory& traj, FieldSelector selector, double q,
                                  double r, double p, TimeWeighting weighting = TimeWeighting::none);

/// Same, but the per-sample value comes from a caller-supplied map
/// (t, sample) -> nonnegative scalar.
NormReport spacetime_lorentz_norm(
    const Trajectory& traj, const std::function<double(const TrajectorySample&)>& value, double q,
    double r, const std::string& name);

struct W21Result {
    double value = 0.0;      // trace_sup + dt_part + hessian_part
    double trace_sup = 0.0;  // sup_t of the homogeneous Besov (2-2/q, p, r) norm
    double dt_part = 0.0;    // L_{q,r}(L_p) of d_t z
    double hessian_part = 0.0;  // L_{q,r}(L_p) of |nabla^2 z|
    double tail_value = 0.0;    // ||d_t z||_p at the final stored sample
    double horizon = 0.0;
};

/// Norm of the regularity class: sup_t ||z||_{B^{2-2/q}_{p,r}} +
/// ||d_t z||_{L_{q,r}(L_p)} + ||nabla^2 z||_{L_{q,r}(L_p)}, with z = u or tu.
W21Result w21_norm(const Trajectory& traj, double p, double q, double r,
                   TimeWeighting weighting = TimeWeighting::none);

}  // namespace mixflow
