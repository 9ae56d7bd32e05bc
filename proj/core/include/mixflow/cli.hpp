#pragma once

#include <string>
#include <vector>

namespace mixflow {

/// One parsed invocation of the command-line front end.
struct Command {
    std::string verb;  // run | picard | probe-stokes | check-structure | norms | sweep
    std::string config_path;
    std::string output_dir;
    std::string input_dir;               // norms: run directory holding snapshots
    std::vector<std::string> overrides;  // key=value; sweep accepts comma lists
    int jobs = 1;                        // sweep worker pool size
};

/// Exit status: 0 success, 1 configuration error, 2 guard abort.
int dispatch(const Command& command);

}  // namespace mixflow
