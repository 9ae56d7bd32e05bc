#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "mixflow/field.hpp"
#include "mixflow/field_ops.hpp"

namespace mixflow {

/// One monomial c * prod_i a_i^{e_i} of a production polynomial.
struct OmegaTerm {
    double coefficient = 0.0;
    std::vector<int> exponents;
};

/// A single reaction turning k reactants into l products: rates omega_m are
/// polynomials in the reactant vector with nonnegative coefficients, and every
/// term of omega_m carries a positive power of a_m so the rate vanishes with
/// its own reactant. Product j receives the fixed fraction theta_j of the
/// total production.
///
/// Arbitrary rate hooks are accepted through with_hooks(); they must be pure
/// and thread-safe, and the sign/vanishing guarantees then rest on the caller
/// (the built-in invariant checks become advisory).
class ReactionModel {
  public:
    using RateHook = std::function<std::vector<double>(const std::vector<double>&)>;
    using JacobianHook =
        std::function<std::vector<std::vector<double>>(const std::vector<double>&)>;

    ReactionModel(int reactants, int products, std::vector<double> theta,
                  std::vector<std::vector<OmegaTerm>> omega_terms,
                  std::map<double, double> alpha_table);

    static ReactionModel with_hooks(int reactants, int products, std::vector<double> theta,
                                    RateHook rates, JacobianHook jacobian,
                                    std::map<double, double> alpha_table = {});
    bool has_hooks() const { return static_cast<bool>(rate_hook_); }

    int reactant_count() const { return k_; }
    int product_count() const { return l_; }
    int species_count() const { return 1 + k_ + l_; }
    const std::vector<double>& theta() const { return theta_; }

    /// alpha_p for the structural condition; defaults to 2/p when the table
    /// has no entry for this p.
    double alpha(double p) const;
    bool alpha_is_tabulated(double p) const;

    /// omega_m(a) for all m; inputs must be componentwise >= -1e-12 (clamped).
    std::vector<double> production_rates(const std::vector<double>& a) const;
    /// d omega_m / d a_i evaluated analytically from the polynomial.
    std::vector<std::vector<double>> production_jacobian(const std::vector<double>& a) const;

    const std::vector<std::vector<OmegaTerm>>& omega_terms() const { return omega_terms_; }

    /// The worked two-reactant example: omega_1 = a1^2 a2, omega_2 = a2^2 a1,
    /// one product, alpha_p = 2/p.
    static ReactionModel toymodel();
    /// Inert mixture: rates identically zero.
    static ReactionModel inert(int reactants, int products);

  private:
    int k_;
    int l_;
    std::vector<double> theta_;
    std::vector<std::vector<OmegaTerm>> omega_terms_;
    std::map<double, double> alpha_table_;
    RateHook rate_hook_;
    JacobianHook jacobian_hook_;
};

/// Affine viscosity nu(rho) = nu_bar + slope . (rho - e1), clamped at a
/// positive floor. Lipschitz in rho with constant sum|slope_i|.
struct ViscosityModel {
    double nu_bar = 1.0;
    std::vector<double> slope;  // one entry per species (w, a..., b...)
    double floor = 0.1;

    void validate(int species_count) const;
    double evaluate(const std::vector<double>& rho) const;
    /// d nu / d rho_i; zero where the floor clamp is active.
    std::vector<double> gradient(const std::vector<double>& rho) const;
    double lipschitz_constant() const;

    static ViscosityModel constant(double nu_value);
};

/// Mixture state on one grid: dilutant w, reactants a_1..a_k, products
/// b_1..b_l. The reference state is e1 = (1,0,...,0).
struct SpeciesState {
    ScalarField w;
    std::vector<ScalarField> a;
    std::vector<ScalarField> b;

    SpeciesState(GridPtr grid, const ReactionModel& model);

    const Grid& grid() const { return w.grid(); }
    const GridPtr& grid_ptr() const { return w.grid_ptr(); }
    int species_count() const { return 1 + static_cast<int>(a.size()) + static_cast<int>(b.size()); }

    /// Species field by flat index: 0 -> w, 1..k -> a, k+1..k+l -> b.
    const ScalarField& component(int i) const;
    ScalarField& component(int i);

    /// Total density rho = w + sum a + sum b.
    ScalarField total_density() const;
    /// min over all species samples.
    double min_value() const;
    bool finite() const;

    /// Uniform state e1: w = 1, all a and b = 0.
    static SpeciesState reference(GridPtr grid, const ReactionModel& model);
};

/// Pointwise right-hand side of the species subsystem: dw = 0, da_i =
/// -omega_i, db_j = theta_j sum_i omega_i.
struct SpeciesRhs {
    double dw;
    std::vector<double> da;
    std::vector<double> db;
};
SpeciesRhs species_rhs(const ReactionModel& model, double w, const std::vector<double>& a,
                       const std::vector<double>& b);

/// The Young-gap function g(beta,zeta) = (2-alpha) beta zeta^p +
/// (2-alpha)/beta - zeta^{p-1} - zeta. With alpha = 2/p it is nonnegative
/// for density ratios beta near 1 (about [0.10, 9.6] at p = 3, [0.26, 3.8]
/// at p = 6) and genuinely negative outside that window; the check-structure
/// scan reports the measured minimum either way.
double young_gap(double beta, double zeta, double p, double alpha);

struct StructuralFormResult {
    ScalarField form;       // pointwise value, masked points set to 0
    double masked_fraction = 0.0;
};

/// The structural sum
///   S_{p,j}(x) = sum_m a_m^{-(p-1)alpha} |d_j a_m|^{p-2} d_j a_m
///                 * d_j(omega_m(a) a_m^{-alpha})
/// with spectral gradients and the derivative expanded by the chain rule.
/// Points where any a_m <= eps_floor are masked.
StructuralFormResult structural_form_field(const ReactionModel& model, const SpeciesState& species,
                                           double p, int direction, double eps_floor = -1.0);

/// nu(rho) evaluated pointwise over a species state.
ScalarField viscosity_field(const ViscosityModel& vmodel, const SpeciesState& species);

/// Parse / serialize the plain-text model description format.
ReactionModel load_reaction_model(const std::string& path);
ViscosityModel load_viscosity_model(const std::string& path, int species_count);
void save_model(const std::string& path, const ReactionModel& model, const ViscosityModel& vmodel);

}  // namespace mixflow
