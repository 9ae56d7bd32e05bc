#include "mixflow/config.hpp"

#include <array>
#include <fstream>
#include <sstream>

#include "mixflow/util.hpp"

namespace mixflow {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

bool key_known(const std::string& key) {
    for (const auto& doc : config_key_reference()) {
        if (key == doc.key) return true;
    }
    return false;
}

}  // namespace

const std::vector<ConfigKeyDoc>& config_key_reference() {
    static const std::vector<ConfigKeyDoc> docs = {
        {"grid.dim", "3", "spatial dimension, 2 or 3"},
        {"grid.extent", "6.2831853...", "torus edge length L"},
        {"grid.n", "32", "points per axis, even and >= 8"},
        {"model.builtin", "toymodel", "built-in reaction model: toymodel | inert"},
        {"model.file", "(unset)", "path to a model description file; overrides model.builtin"},
        {"viscosity.nu_bar", "1.0", "reference viscosity nu(e1)"},
        {"viscosity.slope", "0.05 per species", "affine sensitivity of nu in rho - e1"},
        {"viscosity.floor", "0.1", "positive lower clamp on nu"},
        {"initial.u_amplitude", "0.05", "sup-norm scale of the initial velocity"},
        {"initial.u_modes", "2", "largest |index| carried by the random velocity"},
        {"initial.u_profile", "random", "initial velocity recipe: random | taylor-green"},
        {"initial.a_amplitude", "0.05", "peak value of each initial reactant field"},
        {"initial.b_amplitude", "0.0", "peak value of each initial product field"},
        {"initial.species_modes", "2", "largest |index| in the species perturbations"},
        {"initial.w_mode", "unit", "dilutant recipe: unit (w = 1) | complement (rho = 1)"},
        {"initial.seed", "1", "seed for every random recipe"},
        {"time.dt", "0.01", "time step"},
        {"time.t_max", "2.0", "horizon of a run"},
        {"time.snapshot_every", "5", "steps between stored field snapshots"},
        {"transport.interpolation", "linear", "gather rule: linear | clamped-cubic"},
        {"transport.conserve_mass", "true", "restore each advected integral per step"},
        {"transport.positivity_tolerance", "1e-8", "clamp-mass budget per unit initial mass"},
        {"transport.reaction_rtol", "1e-10", "relative tolerance of the reaction substeps"},
        {"transport.reaction_atol", "1e-13", "absolute tolerance of the reaction substeps"},
        {"picard.max_iterations", "12", "iteration cap of the segment solver"},
        {"picard.tolerance", "1e-9", "contraction-metric stopping threshold"},
        {"picard.segment", "0.5", "segment horizon of the picard verb"},
        {"picard.segments", "1", "segments chained by restarting from each end state"},
        {"run.couple_species", "true", "off: freeze species, pure Navier-Stokes path"},
        {"run.track_b_decomposition", "true", "evolve the b = b_ini + b_zero splitting"},
        {"run.record_grad_power", "true", "record the p = 3, 6 gradient functionals per step"},
        {"probe.p", "2", "spatial integrability of the regularity probe"},
        {"probe.q", "1.3333...", "primary time index of the probe"},
        {"probe.r", "1", "secondary time index of the probe"},
        {"probe.nu", "1.0", "viscosity of the linear solve"},
        {"probe.dt", "0.005", "probe time step"},
        {"probe.horizons", "1 2 4 8", "increasing horizon ladder"},
        {"probe.forcing_index", "1 0 0", "integer mode of the forcing"},
        {"probe.forcing_amplitude", "0 1 0", "component amplitudes before projection"},
        {"probe.profile", "indicator", "time profile: constant | indicator | exponential"},
        {"probe.profile_rate", "1.0", "decay rate of the exponential profile"},
        {"probe.initial_index", "(unset)", "integer mode of the initial datum"},
        {"probe.initial_amplitude", "0 1 0", "component amplitudes of the initial datum"},
        {"check.samples", "20", "random fields scanned by check-structure"},
        {"check.amplitude", "0.05", "amplitude of the scanned reactant fields"},
    };
    return docs;
}

KeyValueConfig KeyValueConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "config: cannot open " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return from_lines(lines);
}

KeyValueConfig KeyValueConfig::from_lines(const std::vector<std::string>& lines) {
    KeyValueConfig cfg;
    int lineno = 0;
    for (std::string line : lines) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos,
                "config: line " + std::to_string(lineno) + " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        require(!key.empty(), "config: empty key on line " + std::to_string(lineno));
        cfg.entries_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

void KeyValueConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    require(eq != std::string::npos, "override '" + assignment + "' is not key=value");
    const std::string key = trim(assignment.substr(0, eq));
    require(!key.empty(), "override with empty key");
    entries_[key] = trim(assignment.substr(eq + 1));
}

bool KeyValueConfig::has(const std::string& key) const {
    return entries_.find(key) != entries_.end();
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_[key] = true;
    return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_[key] = true;
    try {
        std::size_t pos = 0;
        const double v = std::stod(it->second, &pos);
        require(trim(it->second.substr(pos)).empty(), "config: trailing junk in '" + key + "'");
        return v;
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("config: key '" + key + "' is not a number: " + it->second);
    }
}

int KeyValueConfig::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    const int i = static_cast<int>(v);
    require(static_cast<double>(i) == v, "config: key '" + key + "' must be an integer");
    return i;
}

bool KeyValueConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_[key] = true;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("config: key '" + key + "' is not a boolean: " + v);
}

std::vector<double> KeyValueConfig::get_doubles(const std::string& key,
                                                std::vector<double> fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    consumed_[key] = true;
    std::istringstream in(it->second);
    std::vector<double> out;
    double x;
    while (in >> x) out.push_back(x);
    require(in.eof(), "config: key '" + key + "' is not a number list");
    return out;
}

std::vector<std::string> KeyValueConfig::get_strings(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return {};
    consumed_[key] = true;
    std::istringstream in(it->second);
    std::vector<std::string> out;
    std::string s;
    while (in >> s) out.push_back(s);
    return out;
}

std::vector<std::string> KeyValueConfig::unconsumed() const {
    std::vector<std::string> out;
    for (const auto& [key, value] : entries_) {
        if (consumed_.find(key) == consumed_.end()) out.push_back(key);
    }
    return out;
}

RunConfig config_from_kv(const KeyValueConfig& kv) {
    for (const auto& [key, value] : kv.entries()) {
        require(key_known(key), "config: unknown key '" + key + "'");
    }

    RunConfig cfg;
    cfg.dim = kv.get_int("grid.dim", cfg.dim);
    cfg.extent = kv.get_double("grid.extent", cfg.extent);
    cfg.points_per_axis = kv.get_int("grid.n", cfg.points_per_axis);

    if (kv.has("model.file")) {
        cfg.model = load_reaction_model(kv.get_string("model.file", ""));
    } else {
        const std::string builtin = kv.get_string("model.builtin", "toymodel");
        if (builtin == "toymodel") {
            cfg.model = ReactionModel::toymodel();
        } else if (builtin == "inert") {
            cfg.model = ReactionModel::inert(2, 1);
        } else {
            throw std::invalid_argument("config: unknown builtin model '" + builtin + "'");
        }
    }

    cfg.vmodel.nu_bar = kv.get_double("viscosity.nu_bar", cfg.vmodel.nu_bar);
    cfg.vmodel.floor = kv.get_double("viscosity.floor", cfg.vmodel.floor);
    {
        std::vector<double> fallback(static_cast<std::size_t>(cfg.model.species_count()), 0.05);
        cfg.vmodel.slope = kv.get_doubles("viscosity.slope", fallback);
        if (cfg.vmodel.slope.size() == 1 && cfg.model.species_count() > 1) {
            cfg.vmodel.slope.assign(static_cast<std::size_t>(cfg.model.species_count()),
                                    cfg.vmodel.slope.front());
        }
    }

    cfg.initial.u_amplitude = kv.get_double("initial.u_amplitude", cfg.initial.u_amplitude);
    cfg.initial.u_modes = kv.get_int("initial.u_modes", cfg.initial.u_modes);
    {
        const std::string profile = kv.get_string("initial.u_profile", "random");
        if (profile == "random") {
            cfg.initial.u_profile = InitialData::VelocityProfile::random_solenoidal;
        } else if (profile == "taylor-green") {
            cfg.initial.u_profile = InitialData::VelocityProfile::taylor_green;
        } else {
            throw std::invalid_argument("config: unknown initial.u_profile '" + profile + "'");
        }
    }
    cfg.initial.a_amplitude = kv.get_double("initial.a_amplitude", cfg.initial.a_amplitude);
    cfg.initial.b_amplitude = kv.get_double("initial.b_amplitude", cfg.initial.b_amplitude);
    cfg.initial.species_modes = kv.get_int("initial.species_modes", cfg.initial.species_modes);
    {
        const std::string mode = kv.get_string("initial.w_mode", "unit");
        if (mode == "unit") {
            cfg.initial.w_mode = InitialData::DilutantMode::unit;
        } else if (mode == "complement") {
            cfg.initial.w_mode = InitialData::DilutantMode::complement;
        } else {
            throw std::invalid_argument("config: unknown initial.w_mode '" + mode + "'");
        }
    }
    cfg.initial.seed = static_cast<std::uint64_t>(kv.get_double("initial.seed", 1.0));

    cfg.dt = kv.get_double("time.dt", cfg.dt);
    cfg.t_max = kv.get_double("time.t_max", cfg.t_max);
    cfg.snapshot_every = kv.get_int("time.snapshot_every", cfg.snapshot_every);

    {
        const std::string interp = kv.get_string("transport.interpolation", "linear");
        if (interp == "linear") {
            cfg.transport.interpolation = Interpolation::linear;
        } else if (interp == "clamped-cubic") {
            cfg.transport.interpolation = Interpolation::clamped_cubic;
        } else {
            throw std::invalid_argument("config: unknown transport.interpolation '" + interp + "'");
        }
    }
    cfg.transport.conserve_mass = kv.get_bool("transport.conserve_mass", cfg.transport.conserve_mass);
    cfg.transport.positivity_tolerance =
        kv.get_double("transport.positivity_tolerance", cfg.transport.positivity_tolerance);
    cfg.transport.reaction_rtol = kv.get_double("transport.reaction_rtol", cfg.transport.reaction_rtol);
    cfg.transport.reaction_atol = kv.get_double("transport.reaction_atol", cfg.transport.reaction_atol);

    cfg.picard_max_iterations = kv.get_int("picard.max_iterations", cfg.picard_max_iterations);
    cfg.picard_tolerance = kv.get_double("picard.tolerance", cfg.picard_tolerance);
    cfg.picard_segment = kv.get_double("picard.segment", cfg.picard_segment);

    cfg.couple_species = kv.get_bool("run.couple_species", cfg.couple_species);
    cfg.track_b_decomposition = kv.get_bool("run.track_b_decomposition", cfg.track_b_decomposition);
    cfg.record_grad_power = kv.get_bool("run.record_grad_power", cfg.record_grad_power);

    cfg.validate();
    return cfg;
}

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    KeyValueConfig kv = KeyValueConfig::from_file(path);
    for (const auto& o : overrides) kv.apply_override(o);
    return config_from_kv(kv);
}

StokesProbeConfig probe_config_from_kv(const KeyValueConfig& kv) {
    StokesProbeConfig probe;
    probe.dim = kv.get_int("grid.dim", probe.dim);
    probe.points_per_axis = kv.get_int("grid.n", 16);
    probe.extent = kv.get_double("grid.extent", probe.extent);
    probe.nu = kv.get_double("probe.nu", probe.nu);
    probe.dt = kv.get_double("probe.dt", probe.dt);
    probe.p = kv.get_double("probe.p", probe.p);
    probe.q = kv.get_double("probe.q", probe.q);
    probe.r = kv.get_double("probe.r", probe.r);
    probe.horizons = kv.get_doubles("probe.horizons", probe.horizons);

    auto mode_from = [&](const std::string& index_key, const std::string& amp_key,
                         std::vector<ProbeMode>& out) {
        if (!kv.has(index_key)) return;
        const std::vector<double> idx = kv.get_doubles(index_key, {});
        const std::vector<double> amp = kv.get_doubles(amp_key, {0.0, 1.0, 0.0});
        ProbeMode mode;
        for (std::size_t i = 0; i < idx.size() && i < 3; ++i) {
            mode.index[i] = static_cast<int>(idx[i]);
        }
        for (std::size_t i = 0; i < amp.size() && i < 3; ++i) mode.amplitude[i] = amp[i];
        out.push_back(mode);
    };
    mode_from("probe.forcing_index", "probe.forcing_amplitude", probe.forcing_modes);
    mode_from("probe.initial_index", "probe.initial_amplitude", probe.initial_modes);
    if (probe.forcing_modes.empty() && probe.initial_modes.empty()) {
        probe.forcing_modes.push_back(ProbeMode{});
    }

    const std::string profile = kv.get_string("probe.profile", "indicator");
    if (profile == "constant") {
        probe.forcing_profile = TimeProfile::constant;
    } else if (profile == "indicator") {
        probe.forcing_profile = TimeProfile::indicator_unit;
    } else if (profile == "exponential") {
        probe.forcing_profile = TimeProfile::exponential;
    } else {
        throw std::invalid_argument("config: unknown probe.profile '" + profile + "'");
    }
    probe.profile_rate = kv.get_double("probe.profile_rate", probe.profile_rate);
    probe.validate();
    return probe;
}

std::map<std::string, std::string> config_echo(const RunConfig& config) {
    std::map<std::string, std::string> echo;
    auto put = [&](const std::string& key, auto value) {
        std::ostringstream out;
        out.precision(17);
        out << value;
        echo[key] = out.str();
    };
    put("grid.dim", config.dim);
    put("grid.extent", config.extent);
    put("grid.n", config.points_per_axis);
    put("viscosity.nu_bar", config.vmodel.nu_bar);
    put("viscosity.floor", config.vmodel.floor);
    {
        std::ostringstream out;
        out.precision(17);
        for (std::size_t i = 0; i < config.vmodel.slope.size(); ++i) {
            if (i) out << " ";
            out << config.vmodel.slope[i];
        }
        echo["viscosity.slope"] = out.str();
    }
    put("initial.u_amplitude", config.initial.u_amplitude);
    put("initial.u_modes", config.initial.u_modes);
    echo["initial.u_profile"] =
        config.initial.u_profile == InitialData::VelocityProfile::taylor_green ? "taylor-green"
                                                                               : "random";
    put("initial.a_amplitude", config.initial.a_amplitude);
    put("initial.b_amplitude", config.initial.b_amplitude);
    put("initial.species_modes", config.initial.species_modes);
    echo["initial.w_mode"] =
        config.initial.w_mode == InitialData::DilutantMode::complement ? "complement" : "unit";
    put("initial.seed", config.initial.seed);
    put("time.dt", config.dt);
    put("time.t_max", config.t_max);
    put("time.snapshot_every", config.snapshot_every);
    echo["transport.interpolation"] =
        config.transport.interpolation == Interpolation::linear ? "linear" : "clamped-cubic";
    echo["transport.conserve_mass"] = config.transport.conserve_mass ? "true" : "false";
    put("transport.positivity_tolerance", config.transport.positivity_tolerance);
    put("picard.max_iterations", config.picard_max_iterations);
    put("picard.tolerance", config.picard_tolerance);
    put("picard.segment", config.picard_segment);
    echo["run.couple_species"] = config.couple_species ? "true" : "false";
    echo["run.track_b_decomposition"] = config.track_b_decomposition ? "true" : "false";
    echo["run.record_grad_power"] = config.record_grad_power ? "true" : "false";
    put("model.reactants", config.model.reactant_count());
    put("model.products", config.model.product_count());
    return echo;
}

}  // namespace mixflow
