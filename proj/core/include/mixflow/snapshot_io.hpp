#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mixflow/trajectory.hpp"

namespace mixflow {

/// Binary field snapshot, format MXF1: little-endian header
/// {magic "MXF1", dim u32, n u32 per axis, extent f64 per axis,
///  field count u32, names as length-prefixed UTF-8}, then row-major f64
/// samples per field.
void write_snapshot(const std::string& path,
                    const std::vector<std::pair<std::string, const ScalarField*>>& fields);

struct LoadedSnapshot {
    GridPtr grid;
    std::vector<std::pair<std::string, ScalarField>> fields;

    const ScalarField* find(const std::string& name) const;
};
LoadedSnapshot read_snapshot(const std::string& path);

/// Writes one MXF1 file per stored sample plus a snapshots.json index with
/// the stamps. Velocity components are named u0..u{d-1}, backward differences
/// ut0.., species w, a1.., b1..
void save_trajectory(const std::string& directory, const Trajectory& traj);

/// Rebuilds samples from a directory written by save_trajectory. The model
/// tells species fields apart from velocity components.
Trajectory load_trajectory(const std::string& directory, const ReactionModel& model);

}  // namespace mixflow
