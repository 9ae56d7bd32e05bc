#include "mixflow/snapshot_io.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstring>
#include <fstream>

#include "mixflow/util.hpp"

namespace mixflow {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char buf[4];
    for (int i = 0; i < 4; ++i) buf[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 4);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(buf), 8);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    require(in.good(), "snapshot: truncated header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf[i]) << (8 * i);
    return v;
}

double get_f64(std::istream& in) {
    unsigned char buf[8];
    in.read(reinterpret_cast<char*>(buf), 8);
    require(in.good(), "snapshot: truncated data");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace

void write_snapshot(const std::string& path,
                    const std::vector<std::pair<std::string, const ScalarField*>>& fields) {
    require(!fields.empty(), "snapshot: nothing to write");
    const Grid& g = fields.front().second->grid();
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "snapshot: cannot open " + path);

    out.write("MXF1", 4);
    put_u32(out, static_cast<std::uint32_t>(g.dim()));
    for (int d = 0; d < g.dim(); ++d) put_u32(out, static_cast<std::uint32_t>(g.n()));
    for (int d = 0; d < g.dim(); ++d) put_f64(out, g.extent(d));
    put_u32(out, static_cast<std::uint32_t>(fields.size()));
    for (const auto& [name, field] : fields) {
        require(field->grid().same_layout(g), "snapshot: mixed grids");
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
    }
    for (const auto& [name, field] : fields) {
        for (double v : field->values()) put_f64(out, v);
    }
    require(out.good(), "snapshot: write failed for " + path);
}

const ScalarField* LoadedSnapshot::find(const std::string& name) const {
    for (const auto& [n, f] : fields) {
        if (n == name) return &f;
    }
    return nullptr;
}

LoadedSnapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "snapshot: cannot open " + path);
    char magic[4];
    in.read(magic, 4);
    require(in.good() && std::memcmp(magic, "MXF1", 4) == 0, "snapshot: bad magic in " + path);

    const auto dim = static_cast<int>(get_u32(in));
    require(dim == 2 || dim == 3, "snapshot: bad dimension");
    std::vector<std::uint32_t> ns;
    for (int d = 0; d < dim; ++d) ns.push_back(get_u32(in));
    for (int d = 1; d < dim; ++d) {
        require(ns[static_cast<std::size_t>(d)] == ns[0], "snapshot: anisotropic grids unsupported");
    }
    std::vector<double> extents;
    for (int d = 0; d < dim; ++d) extents.push_back(get_f64(in));
    const auto field_count = get_u32(in);

    LoadedSnapshot snap;
    snap.grid = make_grid(dim, extents[0], static_cast<int>(ns[0]));
    std::vector<std::string> names;
    for (std::uint32_t i = 0; i < field_count; ++i) {
        const auto len = get_u32(in);
        std::string name(len, '\0');
        in.read(name.data(), static_cast<std::streamsize>(len));
        require(in.good(), "snapshot: truncated name table");
        names.push_back(std::move(name));
    }
    for (const auto& name : names) {
        ScalarField f(snap.grid);
        auto v = f.values_mut();
        for (auto& x : v) x = get_f64(in);
        snap.fields.emplace_back(name, std::move(f));
    }
    return snap;
}

namespace {

std::string snapshot_filename(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snap_%06zu.mxf", index);
    return buf;
}

}  // namespace

void save_trajectory(const std::string& directory, const Trajectory& traj) {
    nlohmann::json index;
    index["format"] = "MXF1";
    index["stamps"] = nlohmann::json::array();
    index["files"] = nlohmann::json::array();
    const auto& samples = traj.samples();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto& s = samples[i];
        std::vector<std::pair<std::string, const ScalarField*>> fields;
        const int d = s.u.dim();
        for (int c = 0; c < d; ++c) fields.emplace_back("u" + std::to_string(c), &s.u[c]);
        if (s.has_ut) {
            for (int c = 0; c < d; ++c) fields.emplace_back("ut" + std::to_string(c), &s.u_t[c]);
        }
        if (s.species) {
            fields.emplace_back("w", &s.species->w);
            for (std::size_t k = 0; k < s.species->a.size(); ++k) {
                fields.emplace_back("a" + std::to_string(k + 1), &s.species->a[k]);
            }
            for (std::size_t l = 0; l < s.species->b.size(); ++l) {
                fields.emplace_back("b" + std::to_string(l + 1), &s.species->b[l]);
            }
        }
        const std::string file = snapshot_filename(i);
        write_snapshot(directory + "/" + file, fields);
        index["stamps"].push_back(s.t);
        index["files"].push_back(file);
    }
    std::ofstream out(directory + "/snapshots.json");
    require(out.good(), "trajectory: cannot write index in " + directory);
    out << index.dump(2) << "\n";
}

Trajectory load_trajectory(const std::string& directory, const ReactionModel& model) {
    std::ifstream in(directory + "/snapshots.json");
    require(in.good(), "trajectory: no snapshots.json in " + directory);
    nlohmann::json index = nlohmann::json::parse(in);

    Trajectory traj;
    const auto& stamps = index.at("stamps");
    const auto& files = index.at("files");
    require(stamps.size() == files.size(), "trajectory: corrupt index");
    for (std::size_t i = 0; i < files.size(); ++i) {
        LoadedSnapshot snap = read_snapshot(directory + "/" + files[i].get<std::string>());
        const int d = snap.grid->dim();
        TrajectorySample sample{stamps[i].get<double>(), VectorField(snap.grid),
                                VectorField(snap.grid), false, std::nullopt};
        for (int c = 0; c < d; ++c) {
            const ScalarField* f = snap.find("u" + std::to_string(c));
            require(f != nullptr, "trajectory: snapshot missing velocity component");
            sample.u[c] = *f;
        }
        if (snap.find("ut0") != nullptr) {
            for (int c = 0; c < d; ++c) {
                const ScalarField* f = snap.find("ut" + std::to_string(c));
                require(f != nullptr, "trajectory: snapshot missing ut component");
                sample.u_t[c] = *f;
            }
            sample.has_ut = true;
        }
        if (snap.find("w") != nullptr) {
            SpeciesState species(snap.grid, model);
            species.w = *snap.find("w");
            for (int k = 0; k < model.reactant_count(); ++k) {
                const ScalarField* f = snap.find("a" + std::to_string(k + 1));
                require(f != nullptr, "trajectory: snapshot missing reactant field");
                species.a[static_cast<std::size_t>(k)] = *f;
            }
            for (int l = 0; l < model.product_count(); ++l) {
                const ScalarField* f = snap.find("b" + std::to_string(l + 1));
                require(f != nullptr, "trajectory: snapshot missing product field");
                species.b[static_cast<std::size_t>(l)] = *f;
            }
            sample.species = std::move(species);
        }
        traj.push_sample(std::move(sample));
    }
    return traj;
}

}  // namespace mixflow
