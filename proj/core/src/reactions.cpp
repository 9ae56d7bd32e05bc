#include "mixflow/reactions.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mixflow/util.hpp"

namespace mixflow {

namespace {
constexpr double kNegativityTolerance = 1e-12;

double clamp_nonnegative(double x, const char* what) {
    require(x >= -kNegativityTolerance, std::string(what) + ": negative beyond tolerance");
    return x < 0.0 ? 0.0 : x;
}
}  // namespace

ReactionModel::ReactionModel(int reactants, int products, std::vector<double> theta,
                             std::vector<std::vector<OmegaTerm>> omega_terms,
                             std::map<double, double> alpha_table)
    : k_(reactants), l_(products), theta_(std::move(theta)),
      omega_terms_(std::move(omega_terms)), alpha_table_(std::move(alpha_table)) {
    require(k_ >= 1, "reaction model: needs at least one reactant");
    require(l_ >= 1, "reaction model: needs at least one product");
    require(static_cast<int>(theta_.size()) == l_, "reaction model: theta length != product count");
    double theta_sum = 0.0;
    for (double t : theta_) {
        require(t >= 0.0, "reaction model: theta entries must be nonnegative");
        theta_sum += t;
    }
    require(std::abs(theta_sum - 1.0) <= 1e-12, "reaction model: theta must sum to 1");
    require(static_cast<int>(omega_terms_.size()) == k_,
            "reaction model: need one omega polynomial per reactant");
    for (int m = 0; m < k_; ++m) {
        for (const auto& term : omega_terms_[static_cast<std::size_t>(m)]) {
            require(term.coefficient >= 0.0, "reaction model: omega coefficients must be >= 0");
            require(static_cast<int>(term.exponents.size()) == k_,
                    "reaction model: exponent vector length != reactant count");
            for (int e : term.exponents) require(e >= 0, "reaction model: exponents must be >= 0");
            require(term.exponents[static_cast<std::size_t>(m)] >= 1,
                    "reaction model: omega_m must carry a positive power of a_m");
        }
    }
    for (const auto& [p, alpha] : alpha_table_) {
        require(p >= 2.0, "reaction model: alpha table keys are exponents p >= 2");
        require(alpha > 0.0 && alpha < 1.0, "reaction model: alpha must lie in (0,1)");
    }
}

double ReactionModel::alpha(double p) const {
    auto it = alpha_table_.find(p);
    if (it != alpha_table_.end()) return it->second;
    return 2.0 / p;
}

bool ReactionModel::alpha_is_tabulated(double p) const {
    return alpha_table_.find(p) != alpha_table_.end();
}

std::vector<double> ReactionModel::production_rates(const std::vector<double>& a) const {
    require(static_cast<int>(a.size()) == k_, "production_rates: reactant vector length mismatch");
    std::vector<double> ac(a);
    for (auto& x : ac) x = clamp_nonnegative(x, "production_rates");
    if (rate_hook_) {
        std::vector<double> omega = rate_hook_(ac);
        require(static_cast<int>(omega.size()) == k_, "rate hook: wrong rate count");
        return omega;
    }
    std::vector<double> omega(static_cast<std::size_t>(k_), 0.0);
    for (int m = 0; m < k_; ++m) {
        double total = 0.0;
        for (const auto& term : omega_terms_[static_cast<std::size_t>(m)]) {
            double value = term.coefficient;
            for (int i = 0; i < k_; ++i) {
                const int e = term.exponents[static_cast<std::size_t>(i)];
                for (int rep = 0; rep < e; ++rep) value *= ac[static_cast<std::size_t>(i)];
            }
            total += value;
        }
        omega[static_cast<std::size_t>(m)] = total;
    }
    return omega;
}

std::vector<std::vector<double>> ReactionModel::production_jacobian(const std::vector<double>& a) const {
    require(static_cast<int>(a.size()) == k_, "production_jacobian: reactant vector length mismatch");
    std::vector<double> ac(a);
    for (auto& x : ac) x = clamp_nonnegative(x, "production_jacobian");
    if (jacobian_hook_) {
        auto jac = jacobian_hook_(ac);
        require(static_cast<int>(jac.size()) == k_, "jacobian hook: wrong row count");
        return jac;
    }
    std::vector<std::vector<double>> jac(static_cast<std::size_t>(k_),
                                         std::vector<double>(static_cast<std::size_t>(k_), 0.0));
    for (int m = 0; m < k_; ++m) {
        for (const auto& term : omega_terms_[static_cast<std::size_t>(m)]) {
            for (int i = 0; i < k_; ++i) {
                const int ei = term.exponents[static_cast<std::size_t>(i)];
                if (ei == 0) continue;
                double value = term.coefficient * ei;
                for (int j = 0; j < k_; ++j) {
                    const int e = term.exponents[static_cast<std::size_t>(j)] - (j == i ? 1 : 0);
                    for (int rep = 0; rep < e; ++rep) value *= ac[static_cast<std::size_t>(j)];
                }
                jac[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] += value;
            }
        }
    }
    return jac;
}

ReactionModel ReactionModel::with_hooks(int reactants, int products, std::vector<double> theta,
                                        RateHook rates, JacobianHook jacobian,
                                        std::map<double, double> alpha_table) {
    require(static_cast<bool>(rates), "rate hook: empty callable");
    // a trivial placeholder polynomial keeps the structural validation alive;
    // the hooks take precedence at evaluation time
    std::vector<std::vector<OmegaTerm>> terms(static_cast<std::size_t>(reactants));
    ReactionModel model(reactants, products, std::move(theta), std::move(terms),
                        std::move(alpha_table));
    model.rate_hook_ = std::move(rates);
    model.jacobian_hook_ = std::move(jacobian);
    return model;
}

ReactionModel ReactionModel::toymodel() {
    std::vector<std::vector<OmegaTerm>> terms(2);
    terms[0] = {OmegaTerm{1.0, {2, 1}}};
    terms[1] = {OmegaTerm{1.0, {1, 2}}};
    return ReactionModel(2, 1, {1.0}, std::move(terms), {{3.0, 2.0 / 3.0}, {6.0, 1.0 / 3.0}});
}

ReactionModel ReactionModel::inert(int reactants, int products) {
    std::vector<std::vector<OmegaTerm>> terms(static_cast<std::size_t>(reactants));
    std::vector<double> theta(static_cast<std::size_t>(products), 0.0);
    theta[0] = 1.0;
    return ReactionModel(reactants, products, std::move(theta), std::move(terms), {});
}

void ViscosityModel::validate(int species_count) const {
    require(nu_bar > 0.0, "viscosity: nu_bar must be positive");
    require(floor > 0.0, "viscosity: floor must be positive");
    require(slope.empty() || static_cast<int>(slope.size()) == species_count,
            "viscosity: slope length must equal species count");
}

double ViscosityModel::evaluate(const std::vector<double>& rho) const {
    double nu = nu_bar;
    if (!slope.empty()) {
        require(rho.size() == slope.size(), "viscosity: state length mismatch");
        for (std::size_t i = 0; i < slope.size(); ++i) {
            const double ref = (i == 0) ? 1.0 : 0.0;
            nu += slope[i] * (rho[i] - ref);
        }
    }
    return std::max(nu, floor);
}

std::vector<double> ViscosityModel::gradient(const std::vector<double>& rho) const {
    std::vector<double> g(rho.size(), 0.0);
    if (slope.empty()) return g;
    double nu = nu_bar;
    for (std::size_t i = 0; i < slope.size(); ++i) {
        const double ref = (i == 0) ? 1.0 : 0.0;
        nu += slope[i] * (rho[i] - ref);
    }
    if (nu <= floor) return g;  // clamp active
    for (std::size_t i = 0; i < slope.size(); ++i) g[i] = slope[i];
    return g;
}

double ViscosityModel::lipschitz_constant() const {
    double sum = 0.0;
    for (double s : slope) sum += std::abs(s);
    return sum;
}

ViscosityModel ViscosityModel::constant(double nu_value) {
    ViscosityModel m;
    m.nu_bar = nu_value;
    m.slope.clear();
    m.floor = nu_value > 0.0 ? nu_value * 1e-3 : 1e-3;
    return m;
}

SpeciesState::SpeciesState(GridPtr grid, const ReactionModel& model) : w(grid) {
    a.reserve(static_cast<std::size_t>(model.reactant_count()));
    b.reserve(static_cast<std::size_t>(model.product_count()));
    for (int i = 0; i < model.reactant_count(); ++i) a.emplace_back(grid);
    for (int j = 0; j < model.product_count(); ++j) b.emplace_back(grid);
}

const ScalarField& SpeciesState::component(int i) const {
    if (i == 0) return w;
    const int k = static_cast<int>(a.size());
    if (i <= k) return a[static_cast<std::size_t>(i - 1)];
    return b[static_cast<std::size_t>(i - 1 - k)];
}

ScalarField& SpeciesState::component(int i) {
    return const_cast<ScalarField&>(static_cast<const SpeciesState*>(this)->component(i));
}

ScalarField SpeciesState::total_density() const {
    ScalarField rho = w;
    for (const auto& f : a) rho += f;
    for (const auto& f : b) rho += f;
    return rho;
}

double SpeciesState::min_value() const {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < species_count(); ++i) {
        for (double v : component(i).values()) m = std::min(m, v);
    }
    return m;
}

bool SpeciesState::finite() const {
    for (int i = 0; i < species_count(); ++i) {
        if (!component(i).finite()) return false;
    }
    return true;
}

SpeciesState SpeciesState::reference(GridPtr grid, const ReactionModel& model) {
    SpeciesState s(std::move(grid), model);
    auto wv = s.w.values_mut();
    for (auto& v : wv) v = 1.0;
    return s;
}

SpeciesRhs species_rhs(const ReactionModel& model, double w, const std::vector<double>& a,
                       const std::vector<double>& b) {
    (void)w;
    require(static_cast<int>(b.size()) == model.product_count(), "species_rhs: product vector length mismatch");
    const std::vector<double> omega = model.production_rates(a);
    SpeciesRhs rhs;
    rhs.dw = 0.0;
    rhs.da.resize(a.size());
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        rhs.da[i] = -omega[i];
        total += omega[i];
    }
    rhs.db.resize(b.size());
    for (std::size_t j = 0; j < b.size(); ++j) rhs.db[j] = model.theta()[j] * total;
    return rhs;
}

double young_gap(double beta, double zeta, double p, double alpha) {
    require(beta > 0.0 && zeta > 0.0, "young_gap: beta and zeta must be positive");
    require(p >= 2.0, "young_gap: p must be >= 2");
    require(alpha > 0.0 && alpha < 1.0, "young_gap: alpha must lie in (0,1)");
    return (2.0 - alpha) * beta * std::pow(zeta, p) + (2.0 - alpha) / beta -
           std::pow(zeta, p - 1.0) - zeta;
}

StructuralFormResult structural_form_field(const ReactionModel& model, const SpeciesState& species,
                                           double p, int direction, double eps_floor) {
    const double alpha = model.alpha(p);
    require(alpha > 0.0 && alpha < 1.0, "structural form: alpha must lie in (0,1)");
    require(direction >= 0 && direction < species.grid().dim(), "structural form: bad direction");
    const int k = model.reactant_count();
    const std::size_t size = species.grid().size();

    if (eps_floor < 0.0) {
        double max_a = 0.0;
        for (const auto& f : species.a) {
            for (double v : f.values()) max_a = std::max(max_a, std::abs(v));
        }
        eps_floor = 1e-8 * max_a;
    }

    // spectral d_j a_m for every reactant
    std::vector<std::vector<double>> da(static_cast<std::size_t>(k));
    std::vector<std::span<const double>> av(static_cast<std::size_t>(k));
    std::vector<ScalarField> da_fields;
    da_fields.reserve(static_cast<std::size_t>(k));
    for (int m = 0; m < k; ++m) {
        da_fields.push_back(derivative(species.a[static_cast<std::size_t>(m)], direction));
        da[static_cast<std::size_t>(m)].assign(da_fields.back().values().begin(),
                                               da_fields.back().values().end());
        av[static_cast<std::size_t>(m)] = species.a[static_cast<std::size_t>(m)].values();
    }

    StructuralFormResult result{ScalarField(species.grid_ptr()), 0.0};
    auto out = result.form.values_mut();
    std::size_t masked = 0;
    std::vector<double> apoint(static_cast<std::size_t>(k));
    for (std::size_t x = 0; x < size; ++x) {
        bool mask = false;
        for (int m = 0; m < k; ++m) {
            apoint[static_cast<std::size_t>(m)] = av[static_cast<std::size_t>(m)][x];
            if (apoint[static_cast<std::size_t>(m)] <= eps_floor) mask = true;
        }
        if (mask) {
            out[x] = 0.0;
            ++masked;
            continue;
        }
        const std::vector<double> omega = model.production_rates(apoint);
        const std::vector<std::vector<double>> jac = model.production_jacobian(apoint);
        double sum = 0.0;
        for (int m = 0; m < k; ++m) {
            const double am = apoint[static_cast<std::size_t>(m)];
            const double dam = da[static_cast<std::size_t>(m)][x];
            // d_j(omega_m a_m^{-alpha}) by the chain rule
            double dgm = -alpha * omega[static_cast<std::size_t>(m)] * std::pow(am, -alpha - 1.0) * dam;
            for (int i = 0; i < k; ++i) {
                dgm += jac[static_cast<std::size_t>(m)][static_cast<std::size_t>(i)] *
                       std::pow(am, -alpha) * da[static_cast<std::size_t>(i)][x];
            }
            const double weight = std::pow(am, -(p - 1.0) * alpha) *
                                  std::pow(std::abs(dam), p - 2.0) * dam;
            sum += weight * dgm;
        }
        out[x] = sum;
    }
    result.masked_fraction = static_cast<double>(masked) / static_cast<double>(size);
    return result;
}

ScalarField viscosity_field(const ViscosityModel& vmodel, const SpeciesState& species) {
    const int count = species.species_count();
    vmodel.validate(count);
    ScalarField nu(species.grid_ptr());
    auto out = nu.values_mut();
    std::vector<std::span<const double>> comps;
    comps.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) comps.push_back(species.component(i).values());
    std::vector<double> rho(static_cast<std::size_t>(count));
    for (std::size_t x = 0; x < out.size(); ++x) {
        for (int i = 0; i < count; ++i) rho[static_cast<std::size_t>(i)] = comps[static_cast<std::size_t>(i)][x];
        out[x] = vmodel.evaluate(rho);
    }
    return nu;
}

// ---------------------------------------------------------------------------
// model description file
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, std::vector<std::string>> read_kv_lines(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "model file: cannot open " + path);
    std::map<std::string, std::vector<std::string>> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos,
                "model file: line " + std::to_string(lineno) + " has no '='");
        kv[trim(line.substr(0, eq))].push_back(trim(line.substr(eq + 1)));
    }
    return kv;
}

std::vector<double> parse_number_list(const std::string& text) {
    std::istringstream in(text);
    std::vector<double> out;
    double x;
    while (in >> x) out.push_back(x);
    return out;
}

}  // namespace

ReactionModel load_reaction_model(const std::string& path) {
    auto kv = read_kv_lines(path);
    auto single = [&](const std::string& key) -> std::string {
        auto it = kv.find(key);
        require(it != kv.end(), "model file: missing key '" + key + "'");
        require(it->second.size() == 1, "model file: duplicate key '" + key + "'");
        return it->second.front();
    };
    const int k = static_cast<int>(std::stod(single("reactants")));
    const int l = static_cast<int>(std::stod(single("products")));
    const std::vector<double> theta = parse_number_list(single("theta"));

    std::vector<std::vector<OmegaTerm>> terms(static_cast<std::size_t>(std::max(k, 0)));
    for (int m = 1; m <= k; ++m) {
        const std::string key = "omega." + std::to_string(m);
        auto it = kv.find(key);
        if (it == kv.end()) continue;  // inert reactant
        for (const auto& text : it->second) {
            const std::vector<double> nums = parse_number_list(text);
            require(static_cast<int>(nums.size()) == k + 1,
                    "model file: " + key + " wants 'coefficient e_1 .. e_k'");
            OmegaTerm term;
            term.coefficient = nums[0];
            for (int i = 1; i <= k; ++i) {
                term.exponents.push_back(static_cast<int>(nums[static_cast<std::size_t>(i)]));
            }
            terms[static_cast<std::size_t>(m - 1)].push_back(std::move(term));
        }
    }

    std::map<double, double> alpha_table;
    for (const auto& [key, values] : kv) {
        if (key.rfind("alpha.", 0) == 0) {
            require(values.size() == 1, "model file: duplicate key '" + key + "'");
            alpha_table[std::stod(key.substr(6))] = std::stod(values.front());
        }
    }
    return ReactionModel(k, l, theta, std::move(terms), std::move(alpha_table));
}

ViscosityModel load_viscosity_model(const std::string& path, int species_count) {
    auto kv = read_kv_lines(path);
    ViscosityModel v;
    if (auto it = kv.find("viscosity.nu_bar"); it != kv.end()) v.nu_bar = std::stod(it->second.front());
    if (auto it = kv.find("viscosity.floor"); it != kv.end()) v.floor = std::stod(it->second.front());
    if (auto it = kv.find("viscosity.slope"); it != kv.end()) v.slope = parse_number_list(it->second.front());
    v.validate(species_count);
    return v;
}

void save_model(const std::string& path, const ReactionModel& model, const ViscosityModel& vmodel) {
    std::ofstream out(path);
    require(out.good(), "model file: cannot write " + path);
    out.precision(17);
    out << "reactants = " << model.reactant_count() << "\n";
    out << "products = " << model.product_count() << "\n";
    out << "theta =";
    for (double t : model.theta()) out << " " << t;
    out << "\n";
    for (int m = 0; m < model.reactant_count(); ++m) {
        for (const auto& term : model.omega_terms()[static_cast<std::size_t>(m)]) {
            out << "omega." << (m + 1) << " = " << term.coefficient;
            for (int e : term.exponents) out << " " << e;
            out << "\n";
        }
    }
    for (double p : {3.0, 6.0}) {
        if (model.alpha_is_tabulated(p)) out << "alpha." << p << " = " << model.alpha(p) << "\n";
    }
    out << "viscosity.nu_bar = " << vmodel.nu_bar << "\n";
    out << "viscosity.floor = " << vmodel.floor << "\n";
    if (!vmodel.slope.empty()) {
        out << "viscosity.slope =";
        for (double s : vmodel.slope) out << " " << s;
        out << "\n";
    }
}

}  // namespace mixflow
