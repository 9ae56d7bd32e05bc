#pragma once

#include <vector>

#include "mixflow/reactions.hpp"
#include "mixflow/trajectory.hpp"

namespace mixflow {

enum class Interpolation { linear, clamped_cubic };

struct TransportConfig {
    Interpolation interpolation = Interpolation::linear;
    /// Restore each advected field's integral after the interpolation gather.
    /// Off, the gather is a pure convex combination and preserves the sample
    /// range exactly; on, the integral of every transported scalar is exact.
    bool conserve_mass = true;
    double positivity_tolerance = 1e-8;
    double reaction_rtol = 1e-10;
    double reaction_atol = 1e-13;
    int max_reaction_substeps = 10000;

    void validate() const;
};

/// Backward characteristic map x -> x - dt u(x*) (two-stage midpoint foot
/// point), reusable across every field advected in one step.
class SemiLagrangianMap {
  public:
    SemiLagrangianMap(const VectorField& u, double dt, const TransportConfig& cfg);
    ScalarField apply(const ScalarField& f) const;

  private:
    GridPtr grid_;
    TransportConfig cfg_;
    std::vector<double> foot_;  // dim coordinates per point
};

/// Unconditionally stable scalar advection f(x) <- f(x - dt u); with linear
/// interpolation the result is a convex combination of neighbor samples, so
/// min f <= result <= max f pointwise.
ScalarField advect_semilagrangian(const ScalarField& f, const VectorField& u, double dt,
                                  const TransportConfig& cfg = {});

struct TransportStepResult {
    SpeciesState species;
    /// Integral of the negative part clamped away, summed over species.
    double clamp_mass = 0.0;
    /// Largest reaction substep count used at any point.
    int max_substeps_used = 0;
};

/// One Strang step of the species subsystem: half reaction, full advection,
/// half reaction. Throws when the clamp mass exceeds
/// positivity_tolerance * (reacting mass at entry).
TransportStepResult transport_react_step(const SpeciesState& species, const ReactionModel& model,
                                         const VectorField& u, double dt,
                                         const TransportConfig& cfg);

/// Splitting b_j = b_j^ini + b_j^zero with B = sum_j b_j^zero: b^ini obeys
/// pure transport from b_j(0), B obeys transport forced by sum_i omega_i with
/// B(0) = 0, and in the continuum b_j^zero = theta_j B exactly.
struct BDecomposition {
    std::vector<ScalarField> b_ini;
    std::vector<ScalarField> b_zero;
    ScalarField big_b;

    static BDecomposition initial(const SpeciesState& species);
    /// max_j ||b_j^zero - theta_j B||_inf.
    double identity_error(const ReactionModel& model) const;
};

/// Advance the decomposition one step alongside the species step that took
/// `before` to `after`: b^ini is advected, B gets trapezoidal reaction
/// forcing around the advection, b^zero is re-derived as b_j(after) - b^ini.
BDecomposition evolve_b_decomposition(const BDecomposition& decomp, const ReactionModel& model,
                                      const SpeciesState& before, const SpeciesState& after,
                                      const VectorField& u, double dt, const TransportConfig& cfg);

/// sum_m || grad(a_m^{1-alpha}) ||_{L_p}^p, the Gronwall functional of the
/// gradient estimate; power taken pointwise before spectral differentiation.
enum class GradPowerScope { reactants, all_species };
double grad_power_norm(const SpeciesState& species, double p, double alpha,
                       GradPowerScope scope = GradPowerScope::reactants);

struct SpeciesBound {
    std::string name;
    double observed = 0.0;  // sup over time
    double bound = 0.0;     // admissible value
    double margin() const { return bound - observed; }
    bool holds(double rel_tol) const { return observed <= bound * (1.0 + rel_tol) + 1e-300; }
};

struct SpeciesInvariantReport {
    double min_species = 0.0;
    double total_clamp_mass = 0.0;
    double initial_reacting_mass = 0.0;
    double max_conservation_error = 0.0;  // |m(t) - m(0)|, absolute
    SpeciesBound w_bound;
    std::vector<SpeciesBound> a_bounds;
    std::vector<SpeciesBound> b_bounds;
    bool all_bounds_hold(double rel_tol) const;
};

/// Maximum-principle audit of a stored run: nonnegativity, the sup-norm
/// bounds on w, a_i and b_j, and conservation of int(sum a + sum b).
SpeciesInvariantReport species_invariant_report(const Trajectory& traj,
                                                const ReactionModel& model);

}  // namespace mixflow
