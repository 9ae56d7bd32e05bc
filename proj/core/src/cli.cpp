#include "mixflow/cli.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <thread>

#include "mixflow/config.hpp"
#include "mixflow/snapshot_io.hpp"
#include "mixflow/util.hpp"

namespace mixflow {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kVersion = "0.1.0";

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    require(out.good(), "cli: cannot write " + path);
    out << text;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_manifest(const std::string& dir, const RunConfig& config, const std::string& verb) {
    json manifest;
    manifest["tool"] = "mixflow";
    manifest["version"] = kVersion;
    manifest["verb"] = verb;
    manifest["seed"] = config.initial.seed;
    json echo;
    for (const auto& [key, value] : config_echo(config)) echo[key] = value;
    manifest["config"] = echo;
    write_text(dir + "/manifest.json", manifest.dump(2) + "\n");
}

void write_diagnostics_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out(path);
    require(out.good(), "cli: cannot write " + path);
    const auto& rows = traj.steps();
    std::size_t na = 0, nb = 0;
    if (!rows.empty()) {
        na = rows.front().sup_a.size();
        nb = rows.front().sup_b.size();
    }
    out << "t,min_species,clamp_mass,sup_w";
    for (std::size_t i = 0; i < na; ++i) out << ",sup_a" << (i + 1);
    for (std::size_t j = 0; j < nb; ++j) out << ",sup_b" << (j + 1);
    out << ",conservation_error,grad_power_p3,grad_power_p6,b_identity_error"
        << ",grad_u_inf,u_inf,u_l2,u_l3,energy\n";
    const double m0 = rows.empty() ? 0.0 : rows.front().reacting_mass;
    for (const auto& row : rows) {
        out << fmt(row.t) << "," << fmt(row.min_species) << "," << fmt(row.clamp_mass) << ","
            << fmt(row.sup_w);
        for (std::size_t i = 0; i < na; ++i) out << "," << fmt(i < row.sup_a.size() ? row.sup_a[i] : 0.0);
        for (std::size_t j = 0; j < nb; ++j) out << "," << fmt(j < row.sup_b.size() ? row.sup_b[j] : 0.0);
        out << "," << fmt(row.reacting_mass - m0) << "," << fmt(row.grad_power_p3) << ","
            << fmt(row.grad_power_p6) << "," << fmt(row.b_identity_error) << ","
            << fmt(row.grad_u_inf) << "," << fmt(row.u_inf) << "," << fmt(row.u_l2) << ","
            << fmt(row.u_l3) << "," << fmt(row.energy) << "\n";
    }
}

json w21_json(const W21Result& w, double p, double q, double r) {
    json j;
    j["indices"] = {{"p", p}, {"q", q}, {"r", r}, {"s", 2.0 - 2.0 / q}};
    j["value"] = w.value;
    j["trace_sup"] = w.trace_sup;
    j["dt_part"] = w.dt_part;
    j["hessian_part"] = w.hessian_part;
    j["truncation_horizon"] = w.horizon;
    j["tail_value"] = w.tail_value;
    return j;
}

json theorem1_json(const Theorem1Report& rep) {
    json j;
    j["u_W21_2_(4/3,1)"] = w21_json(rep.u_W21_2_43_1, 2.0, 4.0 / 3.0, 1.0);
    j["u_W21_5/4_(5/4,1)"] = w21_json(rep.u_W21_54_54_1, 1.25, 1.25, 1.0);
    j["tu_W21_6_(4,1)"] = w21_json(rep.tu_W21_6_4_1, 6.0, 4.0, 1.0);
    j["tu_W21_2_(4,1)"] = w21_json(rep.tu_W21_2_4_1, 2.0, 4.0, 1.0);
    j["grad_u_L1_Linf"] = rep.grad_u_integral;
    j["grad_u_L1_Linf_tail"] = rep.grad_u_integral_tail;
    j["rho_deviation_inf"] = rep.rho_deviation_inf;
    j["grad_rho_L3"] = rep.grad_rho_l3;
    j["grad_rho_L6"] = rep.grad_rho_l6;
    j["lemma4_ratio"] = rep.lemma4_ratio;
    j["horizon"] = rep.horizon;
    j["finite"] = rep.finite();
    return j;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    require(!ec, "cli: cannot create directory " + dir);
}

int run_verb(const Command& cmd) {
    const RunConfig config = parse_config(cmd.config_path, cmd.overrides);
    ensure_dir(cmd.output_dir);
    write_manifest(cmd.output_dir, config, "run");

    const SimulateResult result = simulate(config);
    write_diagnostics_csv(cmd.output_dir + "/diagnostics.csv", result.trajectory);
    save_trajectory(cmd.output_dir, result.trajectory);
    if (!result.completed) {
        write_text(cmd.output_dir + "/FAILED", result.guard_reason + "\n");
        std::cerr << "guard abort: " << result.guard_reason << "\n";
        return 2;
    }
    const Theorem1Report report = theorem1_report(result.trajectory);
    write_text(cmd.output_dir + "/theorem1.json", theorem1_json(report).dump(2) + "\n");

    const SpeciesInvariantReport inv = species_invariant_report(result.trajectory, config.model);
    json invariants;
    invariants["min_species"] = inv.min_species;
    invariants["total_clamp_mass"] = inv.total_clamp_mass;
    invariants["max_conservation_error"] = inv.max_conservation_error;
    invariants["bounds_hold_1e-8"] = inv.all_bounds_hold(1e-8);
    write_text(cmd.output_dir + "/invariants.json", invariants.dump(2) + "\n");
    return 0;
}

int picard_verb(const Command& cmd) {
    KeyValueConfig kv = KeyValueConfig::from_file(cmd.config_path);
    for (const auto& o : cmd.overrides) kv.apply_override(o);
    const int segments = kv.get_int("picard.segments", 1);
    const RunConfig config = config_from_kv(kv);
    ensure_dir(cmd.output_dir);
    write_manifest(cmd.output_dir, config, "picard");

    const PicardChainResult result = picard_chain(config, config.picard_segment, segments);
    write_diagnostics_csv(cmd.output_dir + "/diagnostics.csv", result.trajectory);

    json j;
    j["segments"] = json::array();
    for (const auto& report : result.segment_reports) {
        json s;
        s["metrics"] = report.metrics;
        s["ratios"] = report.ratios();
        s["converged"] = report.converged;
        s["iterations"] = report.iterations;
        s["slow_contraction_flag"] = report.slow_contraction_flag;
        j["segments"].push_back(s);
    }
    j["all_converged"] = result.all_converged;
    j["metrics"] = result.segment_reports.front().metrics;
    j["ratios"] = result.segment_reports.front().ratios();
    j["converged"] = result.segment_reports.front().converged;
    j["iterations"] = result.segment_reports.front().iterations;
    j["slow_contraction_flag"] = result.segment_reports.front().slow_contraction_flag;
    write_text(cmd.output_dir + "/picard.json", j.dump(2) + "\n");
    return 0;
}

int probe_stokes_verb(const Command& cmd) {
    KeyValueConfig kv = KeyValueConfig::from_file(cmd.config_path);
    for (const auto& o : cmd.overrides) kv.apply_override(o);
    const StokesProbeConfig probe = probe_config_from_kv(kv);
    ensure_dir(cmd.output_dir);

    const std::vector<RegularityRatio> ladder = maximal_regularity_ratio(probe);
    json points = json::array();
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& point : ladder) {
        json p;
        p["T"] = point.horizon;
        p["ratio"] = point.ratio;
        p["numerator_parts"] = {{"trace", point.numerator_trace},
                                {"dt", point.numerator_dt},
                                {"hessian", point.numerator_hessian}};
        p["denominator_parts"] = {{"forcing", point.denominator_forcing},
                                  {"initial", point.denominator_initial}};
        points.push_back(p);
        lo = std::min(lo, point.ratio);
        hi = std::max(hi, point.ratio);
    }
    json j;
    j["points"] = points;
    j["spread"] = hi > 0.0 ? (hi - lo) / hi : 0.0;
    write_text(cmd.output_dir + "/probe_stokes.json", j.dump(2) + "\n");
    return 0;
}

int check_structure_verb(const Command& cmd) {
    KeyValueConfig kv = KeyValueConfig::from_file(cmd.config_path);
    for (const auto& o : cmd.overrides) kv.apply_override(o);
    const RunConfig config = config_from_kv(kv);
    const int samples = kv.get_int("check.samples", 20);
    const double amplitude = kv.get_double("check.amplitude", 0.05);
    ensure_dir(cmd.output_dir);
    write_manifest(cmd.output_dir, config, "check-structure");

    // Young-gap scan over the log grid
    double min_gap = std::numeric_limits<double>::infinity();
    for (double p : {3.0, 6.0}) {
        const double alpha = config.model.alpha(p);
        for (int i = 0; i < 200; ++i) {
            for (int j = 0; j < 200; ++j) {
                const double beta = std::pow(10.0, -3.0 + 6.0 * i / 199.0);
                const double zeta = std::pow(10.0, -3.0 + 6.0 * j / 199.0);
                min_gap = std::min(min_gap, young_gap(beta, zeta, p, alpha));
            }
        }
    }

    // structural form over random smooth positive fields
    const GridPtr grid = config.make_run_grid();
    double min_form = std::numeric_limits<double>::infinity();
    double max_masked = 0.0;
    double scale = 0.0;
    for (int s = 0; s < samples; ++s) {
        InitialData init = config.initial;
        init.seed = config.initial.seed + static_cast<std::uint64_t>(s);
        init.a_amplitude = amplitude;
        SpeciesState species = build_initial_species(grid, config.model, init);
        for (double p : {3.0, 6.0}) {
            for (int dir = 0; dir < grid->dim(); ++dir) {
                const StructuralFormResult result =
                    structural_form_field(config.model, species, p, dir);
                double lo = 0.0;
                double hi = 0.0;
                for (double v : result.form.values()) {
                    lo = std::min(lo, v);
                    hi = std::max(hi, std::abs(v));
                }
                min_form = std::min(min_form, lo);
                scale = std::max(scale, hi);
                max_masked = std::max(max_masked, result.masked_fraction);
            }
        }
    }

    json j;
    j["min_young_gap"] = min_gap;
    j["min_structural_form"] = min_form;
    j["structural_form_scale"] = scale;
    j["max_masked_fraction"] = max_masked;
    j["samples"] = samples;
    write_text(cmd.output_dir + "/check_structure.json", j.dump(2) + "\n");
    std::cout << "min young gap " << min_gap << ", min structural form " << min_form << "\n";
    return 0;
}

int norms_verb(const Command& cmd) {
    const RunConfig config = parse_config(cmd.config_path, cmd.overrides);
    require(!cmd.input_dir.empty(), "norms: needs --input pointing at a run directory");
    ensure_dir(cmd.output_dir);

    const Trajectory traj = load_trajectory(cmd.input_dir, config.model);
    json reports = json::array();
    auto push_norm = [&](const NormReport& r) {
        json j;
        j["norm_name"] = r.norm_name;
        j["indices"] = {{"p", r.p}, {"q", r.q}, {"r", r.r}, {"s", r.s}};
        j["value"] = r.value;
        j["truncation_horizon"] = r.truncation_horizon;
        j["tail_value"] = r.tail_value;
        reports.push_back(j);
    };
    struct Spec {
        double p, q, r;
        TimeWeighting w;
    };
    const Spec specs[] = {{2.0, 4.0 / 3.0, 1.0, TimeWeighting::none},
                          {1.25, 1.25, 1.0, TimeWeighting::none},
                          {6.0, 4.0, 1.0, TimeWeighting::linear},
                          {2.0, 4.0, 1.0, TimeWeighting::linear}};
    for (const auto& sp : specs) {
        const W21Result w = w21_norm(traj, sp.p, sp.q, sp.r, sp.w);
        NormReport r;
        r.norm_name = std::string(sp.w == TimeWeighting::linear ? "tu" : "u") + " W21";
        r.p = sp.p;
        r.q = sp.q;
        r.r = sp.r;
        r.s = 2.0 - 2.0 / sp.q;
        r.value = w.value;
        r.truncation_horizon = w.horizon;
        r.tail_value = w.tail_value;
        push_norm(r);
    }
    push_norm(spacetime_lorentz_norm(traj, FieldSelector::velocity, 4.0, 1.0, 6.0));
    push_norm(spacetime_lorentz_norm(traj, FieldSelector::velocity_gradient, 4.0, 1.0, 2.0));

    json j;
    j["norms"] = reports;
    write_text(cmd.output_dir + "/norms.json", j.dump(2) + "\n");
    return 0;
}

// Cartesian product of comma-separated override lists.
std::vector<std::vector<std::string>> expand_sweep(const std::vector<std::string>& overrides) {
    std::vector<std::vector<std::string>> axes;
    for (const auto& o : overrides) {
        const auto eq = o.find('=');
        require(eq != std::string::npos, "sweep: override '" + o + "' is not key=value");
        const std::string key = o.substr(0, eq);
        std::vector<std::string> axis;
        std::string values = o.substr(eq + 1);
        std::size_t pos = 0;
        while (true) {
            const auto comma = values.find(',', pos);
            axis.push_back(key + "=" + values.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        axes.push_back(std::move(axis));
    }
    std::vector<std::vector<std::string>> points = {{}};
    for (const auto& axis : axes) {
        std::vector<std::vector<std::string>> next;
        for (const auto& point : points) {
            for (const auto& choice : axis) {
                auto extended = point;
                extended.push_back(choice);
                next.push_back(std::move(extended));
            }
        }
        points = std::move(next);
    }
    return points;
}

int sweep_verb(const Command& cmd) {
    const auto points = expand_sweep(cmd.overrides);
    require(!points.empty(), "sweep: nothing to run");
    ensure_dir(cmd.output_dir);

    std::vector<int> codes(points.size(), 0);
    std::vector<std::thread> pool;
    std::size_t next_point = 0;
    std::mutex mutex;
    const int jobs = std::max(1, cmd.jobs);
    auto worker = [&]() {
        while (true) {
            std::size_t mine;
            {
                std::lock_guard<std::mutex> lock(mutex);
                if (next_point >= points.size()) return;
                mine = next_point++;
            }
            char name[32];
            std::snprintf(name, sizeof(name), "point_%04zu", mine);
            Command sub;
            sub.verb = "run";
            sub.config_path = cmd.config_path;
            sub.output_dir = cmd.output_dir + "/" + name;
            sub.overrides = points[mine];
            try {
                codes[mine] = dispatch(sub);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mutex);
                std::cerr << name << ": " << e.what() << "\n";
                codes[mine] = 1;
            }
        }
    };
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json j;
    j["points"] = json::array();
    int exit_code = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        json p;
        char name[32];
        std::snprintf(name, sizeof(name), "point_%04zu", i);
        p["directory"] = name;
        p["overrides"] = points[i];
        p["exit_code"] = codes[i];
        j["points"].push_back(p);
        exit_code = std::max(exit_code, codes[i]);
    }
    write_text(cmd.output_dir + "/sweep.json", j.dump(2) + "\n");
    return exit_code;
}

}  // namespace

int dispatch(const Command& command) {
    try {
        if (command.verb == "run") return run_verb(command);
        if (command.verb == "picard") return picard_verb(command);
        if (command.verb == "probe-stokes") return probe_stokes_verb(command);
        if (command.verb == "check-structure") return check_structure_verb(command);
        if (command.verb == "norms") return norms_verb(command);
        if (command.verb == "sweep") return sweep_verb(command);
        std::cerr << "unknown verb '" << command.verb << "'\n";
        return 1;
    } catch (const GuardAbort& e) {
        std::cerr << "guard abort: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace mixflow
