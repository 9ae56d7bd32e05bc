#include "mixflow/transport.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "mixflow/util.hpp"

namespace mixflow {

void TransportConfig::validate() const {
    require(positivity_tolerance > 0.0, "transport config: positivity tolerance must be > 0");
    require(reaction_rtol > 0.0 && reaction_atol > 0.0, "transport config: reaction tolerances must be > 0");
    require(max_reaction_substeps > 0, "transport config: substep cap must be > 0");
}

namespace {

double wrap(double x, double extent) {
    x = std::fmod(x, extent);
    return x < 0.0 ? x + extent : x;
}

int wrap_index(int i, int n) {
    i %= n;
    return i < 0 ? i + n : i;
}

// Snapping fractions within 1e-12 of a node makes node-aligned foot points
// (u = 0, grid-multiple shifts) gather exactly one sample.
void locate(const Grid& g, double pos, int& base, double& frac) {
    const double s = wrap(pos, g.extent()) / g.spacing();
    int b = static_cast<int>(std::floor(s));
    double f = s - b;
    if (f > 1.0 - 1e-12) {
        ++b;
        f = 0.0;
    } else if (f < 1e-12) {
        f = 0.0;
    }
    base = wrap_index(b, g.n());
    frac = f;
}

double gather_linear(const Grid& g, std::span<const double> v, const double* pos) {
    const int n = g.n();
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim(); ++d) locate(g, pos[d], base[d], frac[d]);
    double acc = 0.0;
    const int corners = 1 << g.dim();
    for (int c = 0; c < corners; ++c) {
        double weight = 1.0;
        std::array<int, 3> j = {0, 0, 0};
        for (int d = 0; d < g.dim(); ++d) {
            const int off = (c >> d) & 1;
            weight *= off ? frac[d] : 1.0 - frac[d];
            j[static_cast<std::size_t>(d)] = wrap_index(base[d] + off, n);
        }
        acc += weight * v[g.flatten(j)];
    }
    return acc;
}

double catmull_rom(double fm1, double f0, double f1, double f2, double t) {
    const double a = -0.5 * fm1 + 1.5 * f0 - 1.5 * f1 + 0.5 * f2;
    const double b = fm1 - 2.5 * f0 + 2.0 * f1 - 0.5 * f2;
    const double c = -0.5 * fm1 + 0.5 * f1;
    return ((a * t + b) * t + c) * t + f0;
}

double gather_cubic_clamped(const Grid& g, std::span<const double> v, const double* pos) {
    const int n = g.n();
    int base[3] = {0, 0, 0};
    double frac[3] = {0.0, 0.0, 0.0};
    for (int d = 0; d < g.dim(); ++d) locate(g, pos[d], base[d], frac[d]);
    // separable Catmull-Rom, innermost axis first
    double line[4][4];  // enough scratch for dim 3
    double plane[4];
    double out;
    if (g.dim() == 2) {
        for (int jy = 0; jy < 4; ++jy) {
            double f[4];
            for (int jx = 0; jx < 4; ++jx) {
                std::array<int, 3> idx = {wrap_index(base[0] + jx - 1, n),
                                          wrap_index(base[1] + jy - 1, n), 0};
                f[jx] = v[g.flatten(idx)];
            }
            plane[jy] = catmull_rom(f[0], f[1], f[2], f[3], frac[0]);
        }
        out = catmull_rom(plane[0], plane[1], plane[2], plane[3], frac[1]);
    } else {
        for (int jz = 0; jz < 4; ++jz) {
            for (int jy = 0; jy < 4; ++jy) {
                double f[4];
                for (int jx = 0; jx < 4; ++jx) {
                    std::array<int, 3> idx = {wrap_index(base[0] + jx - 1, n),
                                              wrap_index(base[1] + jy - 1, n),
                                              wrap_index(base[2] + jz - 1, n)};
                    f[jx] = v[g.flatten(idx)];
                }
                line[jz][jy] = catmull_rom(f[0], f[1], f[2], f[3], frac[0]);
            }
            plane[jz] = catmull_rom(line[jz][0], line[jz][1], line[jz][2], line[jz][3], frac[1]);
        }
        out = catmull_rom(plane[0], plane[1], plane[2], plane[3], frac[2]);
    }
    // clamp to the linear cell's range to keep the scheme monotone
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    const int corners = 1 << g.dim();
    for (int c = 0; c < corners; ++c) {
        std::array<int, 3> j = {0, 0, 0};
        for (int d = 0; d < g.dim(); ++d) {
            j[static_cast<std::size_t>(d)] = wrap_index(base[d] + ((c >> d) & 1), n);
        }
        const double f = v[g.flatten(j)];
        lo = std::min(lo, f);
        hi = std::max(hi, f);
    }
    return std::clamp(out, lo, hi);
}

}  // namespace

SemiLagrangianMap::SemiLagrangianMap(const VectorField& u, double dt, const TransportConfig& cfg)
    : grid_(u.grid_ptr()), cfg_(cfg) {
    cfg.validate();
    require(u.finite(), "advect: velocity must be finite");
    const Grid& g = *grid_;
    const int d = g.dim();
    std::vector<std::span<const double>> uv;
    for (int c = 0; c < d; ++c) uv.push_back(u[c].values());

    foot_.resize(g.size() * static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto x = g.point(i);
        // half step with the nodal velocity, full step with the midpoint value
        double mid[3];
        for (int c = 0; c < d; ++c) mid[c] = x[static_cast<std::size_t>(c)] - 0.5 * dt * uv[static_cast<std::size_t>(c)][i];
        double* foot = &foot_[i * static_cast<std::size_t>(d)];
        for (int c = 0; c < d; ++c) {
            const double u_mid = gather_linear(g, uv[static_cast<std::size_t>(c)], mid);
            foot[c] = x[static_cast<std::size_t>(c)] - dt * u_mid;
        }
    }
}

ScalarField SemiLagrangianMap::apply(const ScalarField& f) const {
    const Grid& g = *grid_;
    require(g.same_layout(f.grid()), "advect: field grid mismatch");
    const int d = g.dim();
    auto src = f.values();
    ScalarField out(f.grid_ptr());
    auto dst = out.values_mut();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double* foot = &foot_[i * static_cast<std::size_t>(d)];
        dst[i] = cfg_.interpolation == Interpolation::linear
                     ? gather_linear(g, src, foot)
                     : gather_cubic_clamped(g, src, foot);
    }
    if (cfg_.conserve_mass) {
        KahanSum in_sum, out_sum;
        for (double v : src) in_sum.add(v);
        for (double v : dst) out_sum.add(v);
        const double m_in = in_sum.value();
        const double m_out = out_sum.value();
        if (m_in > 0.0 && m_out > 0.0) {
            const double scale = m_in / m_out;
            for (auto& v : dst) v *= scale;
        }
    }
    return out;
}

ScalarField advect_semilagrangian(const ScalarField& f, const VectorField& u, double dt,
                                  const TransportConfig& cfg) {
    return SemiLagrangianMap(u, dt, cfg).apply(f);
}

namespace {

/// Bogacki-Shampine 2(3) pair on the pointwise reaction system
/// y = (a_1..a_k, b_1..b_l); rejects steps that drive a reactant negative.
class ReactionIntegrator {
  public:
    ReactionIntegrator(const ReactionModel& model, const TransportConfig& cfg)
        : model_(model), cfg_(cfg), k_(model.reactant_count()), l_(model.product_count()) {}

    /// Integrates over [0, horizon]; returns substeps used.
    int integrate(std::vector<double>& y, double horizon) {
        if (horizon <= 0.0) return 0;
        double t = 0.0;
        double h = horizon;
        int steps = 0;
        rhs(y, k1_);
        while (t < horizon) {
            h = std::min(h, horizon - t);
            stage(y, k1_, 0.5 * h, ytmp_);
            rhs(ytmp_, k2_);
            stage(y, k2_, 0.75 * h, ytmp_);
            rhs(ytmp_, k3_);
            y3_.resize(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) {
                y3_[i] = y[i] + h * (2.0 / 9.0 * k1_[i] + 1.0 / 3.0 * k2_[i] + 4.0 / 9.0 * k3_[i]);
            }
            bool negative = false;
            for (int i = 0; i < k_; ++i) {
                if (y3_[static_cast<std::size_t>(i)] < -cfg_.reaction_atol) negative = true;
            }
            double err = 0.0;
            if (!negative) {
                rhs(y3_, k4_);
                for (std::size_t i = 0; i < y.size(); ++i) {
                    const double e = h * (-5.0 / 72.0 * k1_[i] + 1.0 / 12.0 * k2_[i] +
                                          1.0 / 9.0 * k3_[i] - 1.0 / 8.0 * k4_[i]);
                    const double scale = cfg_.reaction_atol + cfg_.reaction_rtol * std::abs(y3_[i]);
                    err = std::max(err, std::abs(e) / scale);
                }
            }
            if (negative || err > 1.0) {
                h *= negative ? 0.5 : std::max(0.2, 0.9 * std::pow(std::max(err, 1e-300), -1.0 / 3.0));
                require(++steps < cfg_.max_reaction_substeps, "reaction integrator: substep cap hit");
                continue;
            }
            t += h;
            y.swap(y3_);
            for (int i = 0; i < k_ + l_; ++i) {
                if (y[static_cast<std::size_t>(i)] < 0.0) y[static_cast<std::size_t>(i)] = 0.0;
            }
            k1_.swap(k4_);  // FSAL
            if (err > 0.0) h *= std::min(2.0, std::max(0.2, 0.9 * std::pow(err, -1.0 / 3.0)));
            else h *= 2.0;
            require(++steps < cfg_.max_reaction_substeps, "reaction integrator: substep cap hit");
        }
        return steps;
    }

  private:
    void rhs(const std::vector<double>& y, std::vector<double>& dy) {
        a_.assign(y.begin(), y.begin() + k_);
        for (auto& v : a_) v = std::max(v, 0.0);
        const std::vector<double> omega = model_.production_rates(a_);
        dy.resize(y.size());
        double total = 0.0;
        for (int i = 0; i < k_; ++i) {
            dy[static_cast<std::size_t>(i)] = -omega[static_cast<std::size_t>(i)];
            total += omega[static_cast<std::size_t>(i)];
        }
        for (int j = 0; j < l_; ++j) {
            dy[static_cast<std::size_t>(k_ + j)] = model_.theta()[static_cast<std::size_t>(j)] * total;
        }
    }

    void stage(const std::vector<double>& y, const std::vector<double>& k, double h,
               std::vector<double>& out) {
        out.resize(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
    }

    const ReactionModel& model_;
    const TransportConfig& cfg_;
    int k_;
    int l_;
    std::vector<double> a_, k1_, k2_, k3_, k4_, ytmp_, y3_;
};

/// Half-step reaction sweep over every grid point.
int react_half(SpeciesState& species, const ReactionModel& model, double half_dt,
               const TransportConfig& cfg) {
    const int k = model.reactant_count();
    const int l = model.product_count();
    const std::size_t size = species.grid().size();
    std::vector<std::span<double>> fields;
    for (auto& f : species.a) fields.push_back(f.values_mut());
    for (auto& f : species.b) fields.push_back(f.values_mut());

    ReactionIntegrator integ(model, cfg);
    std::vector<double> y(static_cast<std::size_t>(k + l));
    int max_steps = 0;
    for (std::size_t x = 0; x < size; ++x) {
        for (int i = 0; i < k + l; ++i) y[static_cast<std::size_t>(i)] = fields[static_cast<std::size_t>(i)][x];
        max_steps = std::max(max_steps, integ.integrate(y, half_dt));
        for (int i = 0; i < k + l; ++i) fields[static_cast<std::size_t>(i)][x] = y[static_cast<std::size_t>(i)];
    }
    return max_steps;
}

double clamp_negative(SpeciesState& species) {
    KahanSum clamped;
    for (int i = 0; i < species.species_count(); ++i) {
        auto v = species.component(i).values_mut();
        for (auto& x : v) {
            if (x < 0.0) {
                clamped.add(-x);
                x = 0.0;
            }
        }
    }
    return clamped.value() * species.grid().cell_volume();
}

double reacting_mass(const SpeciesState& species) {
    KahanSum acc;
    for (const auto& f : species.a) {
        for (double v : f.values()) acc.add(v);
    }
    for (const auto& f : species.b) {
        for (double v : f.values()) acc.add(v);
    }
    return acc.value() * species.grid().cell_volume();
}

}  // namespace

TransportStepResult transport_react_step(const SpeciesState& species, const ReactionModel& model,
                                         const VectorField& u, double dt,
                                         const TransportConfig& cfg) {
    cfg.validate();
    require(dt > 0.0, "transport step: dt must be positive");
    require(species.min_value() >= -cfg.positivity_tolerance,
            "transport step: species must be nonnegative");
    require(species.grid().same_layout(u.grid()), "transport step: velocity grid mismatch");

    const double mass_at_entry = reacting_mass(species);

    TransportStepResult result{species, 0.0, 0};
    SpeciesState& s = result.species;
    result.max_substeps_used = std::max(result.max_substeps_used,
                                        react_half(s, model, 0.5 * dt, cfg));
    {
        SemiLagrangianMap map(u, dt, cfg);
        s.w = map.apply(s.w);
        for (auto& f : s.a) f = map.apply(f);
        for (auto& f : s.b) f = map.apply(f);
    }
    result.max_substeps_used = std::max(result.max_substeps_used,
                                        react_half(s, model, 0.5 * dt, cfg));
    result.clamp_mass = clamp_negative(s);

    const double budget = cfg.positivity_tolerance * std::max(mass_at_entry, 1e-300);
    if (result.clamp_mass > budget) {
        throw std::runtime_error("transport step: clamp mass exceeds positivity budget");
    }
    return result;
}

BDecomposition BDecomposition::initial(const SpeciesState& species) {
    BDecomposition d{species.b, {}, ScalarField(species.grid_ptr())};
    d.b_zero.reserve(species.b.size());
    for (std::size_t j = 0; j < species.b.size(); ++j) d.b_zero.emplace_back(species.grid_ptr());
    return d;
}

double BDecomposition::identity_error(const ReactionModel& model) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < b_zero.size(); ++j) {
        ScalarField diff = b_zero[j];
        ScalarField scaled = big_b;
        scaled *= model.theta()[j];
        diff -= scaled;
        worst = std::max(worst, spatial_norm(diff, kInfinity));
    }
    return worst;
}

namespace {

ScalarField total_production(const SpeciesState& species, const ReactionModel& model) {
    const int k = model.reactant_count();
    ScalarField out(species.grid_ptr());
    auto dst = out.values_mut();
    std::vector<std::span<const double>> av;
    for (const auto& f : species.a) av.push_back(f.values());
    std::vector<double> a(static_cast<std::size_t>(k));
    for (std::size_t x = 0; x < dst.size(); ++x) {
        for (int i = 0; i < k; ++i) a[static_cast<std::size_t>(i)] = std::max(av[static_cast<std::size_t>(i)][x], 0.0);
        const auto omega = model.production_rates(a);
        double total = 0.0;
        for (double o : omega) total += o;
        dst[x] = total;
    }
    return out;
}

}  // namespace

BDecomposition evolve_b_decomposition(const BDecomposition& decomp, const ReactionModel& model,
                                      const SpeciesState& before, const SpeciesState& after,
                                      const VectorField& u, double dt, const TransportConfig& cfg) {
    require(decomp.b_ini.size() == before.b.size(), "b decomposition: product count mismatch");
    BDecomposition out = decomp;
    SemiLagrangianMap map(u, dt, cfg);

    for (auto& f : out.b_ini) f = map.apply(f);

    // trapezoidal forcing around the advection mirrors the Strang species step
    {
        ScalarField half = total_production(before, model);
        half *= 0.5 * dt;
        out.big_b += half;
        out.big_b = map.apply(out.big_b);
        ScalarField half_after = total_production(after, model);
        half_after *= 0.5 * dt;
        out.big_b += half_after;
    }

    for (std::size_t j = 0; j < out.b_zero.size(); ++j) {
        out.b_zero[j] = after.b[j] - out.b_ini[j];
    }
    return out;
}

double grad_power_norm(const SpeciesState& species, double p, double alpha, GradPowerScope scope) {
    require(p >= 1.0, "grad_power_norm: p must be >= 1");
    require(alpha > 0.0 && alpha < 1.0, "grad_power_norm: alpha must lie in (0,1)");
    const double expo = 1.0 - alpha;
    KahanSum acc;
    auto add_field = [&](const ScalarField& f) {
        ScalarField powered = map_values(f, [&](double v) { return std::pow(std::max(v, 0.0), expo); });
        const double norm = spatial_norm(gradient(powered), p);
        acc.add(std::pow(norm, p));
    };
    for (const auto& f : species.a) add_field(f);
    if (scope == GradPowerScope::all_species) {
        add_field(species.w);
        for (const auto& f : species.b) add_field(f);
    }
    return acc.value();
}

bool SpeciesInvariantReport::all_bounds_hold(double rel_tol) const {
    if (!w_bound.holds(rel_tol)) return false;
    for (const auto& b : a_bounds) {
        if (!b.holds(rel_tol)) return false;
    }
    for (const auto& b : b_bounds) {
        if (!b.holds(rel_tol)) return false;
    }
    return true;
}

SpeciesInvariantReport species_invariant_report(const Trajectory& traj, const ReactionModel& model) {
    const auto& samples = traj.samples();
    require(!samples.empty() && samples.front().species.has_value(),
            "invariant report: trajectory carries no species states");
    const SpeciesState& initial = *samples.front().species;

    SpeciesInvariantReport report;
    report.w_bound.name = "w";
    report.w_bound.bound = spatial_norm(initial.w, kInfinity);
    ScalarField a_sum(initial.grid_ptr());
    for (std::size_t i = 0; i < initial.a.size(); ++i) {
        SpeciesBound bound;
        bound.name = "a" + std::to_string(i + 1);
        bound.bound = spatial_norm(initial.a[i], kInfinity);
        report.a_bounds.push_back(bound);
        a_sum += initial.a[i];
    }
    const double a_sum_sup = spatial_norm(a_sum, kInfinity);
    for (std::size_t j = 0; j < initial.b.size(); ++j) {
        SpeciesBound bound;
        bound.name = "b" + std::to_string(j + 1);
        bound.bound = spatial_norm(initial.b[j], kInfinity) + model.theta()[j] * a_sum_sup;
        report.b_bounds.push_back(bound);
    }

    report.min_species = std::numeric_limits<double>::infinity();
    double m0 = 0.0;
    {
        KahanSum acc;
        for (const auto& f : initial.a) acc.add(spatial_norm(f, 1.0));
        for (const auto& f : initial.b) acc.add(spatial_norm(f, 1.0));
        m0 = acc.value();  // fields are nonnegative, so the L_1 norm is the mass
    }
    report.initial_reacting_mass = m0;

    const bool use_steps = !traj.steps().empty();
    if (use_steps) {
        for (const auto& row : traj.steps()) {
            report.min_species = std::min(report.min_species, row.min_species);
            report.total_clamp_mass += row.clamp_mass;
            report.w_bound.observed = std::max(report.w_bound.observed, row.sup_w);
            for (std::size_t i = 0; i < report.a_bounds.size() && i < row.sup_a.size(); ++i) {
                report.a_bounds[i].observed = std::max(report.a_bounds[i].observed, row.sup_a[i]);
            }
            for (std::size_t j = 0; j < report.b_bounds.size() && j < row.sup_b.size(); ++j) {
                report.b_bounds[j].observed = std::max(report.b_bounds[j].observed, row.sup_b[j]);
            }
            report.max_conservation_error =
                std::max(report.max_conservation_error, std::abs(row.reacting_mass - m0));
        }
    } else {
        for (const auto& sample : samples) {
            if (!sample.species) continue;
            const SpeciesState& s = *sample.species;
            report.min_species = std::min(report.min_species, s.min_value());
            report.w_bound.observed =
                std::max(report.w_bound.observed, spatial_norm(s.w, kInfinity));
            for (std::size_t i = 0; i < s.a.size(); ++i) {
                report.a_bounds[i].observed =
                    std::max(report.a_bounds[i].observed, spatial_norm(s.a[i], kInfinity));
            }
            for (std::size_t j = 0; j < s.b.size(); ++j) {
                report.b_bounds[j].observed =
                    std::max(report.b_bounds[j].observed, spatial_norm(s.b[j], kInfinity));
            }
            KahanSum acc;
            for (const auto& f : s.a) acc.add(spatial_norm(f, 1.0));
            for (const auto& f : s.b) acc.add(spatial_norm(f, 1.0));
            report.max_conservation_error =
                std::max(report.max_conservation_error, std::abs(acc.value() - m0));
        }
    }
    return report;
}

}  // namespace mixflow
