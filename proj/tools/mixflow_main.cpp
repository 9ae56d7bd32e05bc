#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>

#include "mixflow/cli.hpp"
#include "mixflow/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mixflow: a numerical laboratory for incompressible reactive mixtures"};
    app.require_subcommand(1);

    mixflow::Command cmd;
    // Output root and worker cap are the only environment knobs.
    if (const char* root = std::getenv("MIXFLOW_OUTPUT_ROOT")) cmd.output_dir = root;
    if (const char* jobs = std::getenv("MIXFLOW_MAX_THREADS")) cmd.jobs = std::atoi(jobs);

    auto add_common = [&](CLI::App* sub, bool needs_input) {
        sub->add_option("-c,--config", cmd.config_path, "configuration file")->required();
        sub->add_option("-o,--out", cmd.output_dir, "output directory")->required();
        sub->add_option("-s,--set", cmd.overrides,
                        "dotted-key override, key=value (repeatable; sweep accepts comma lists)");
        if (needs_input) {
            sub->add_option("-i,--input", cmd.input_dir, "run directory holding snapshots")
                ->required();
        }
    };

    add_common(app.add_subcommand("run", "simulate and emit the Theorem-1 report"), false);
    add_common(app.add_subcommand("picard", "run the Picard iteration over one segment"), false);
    add_common(app.add_subcommand("probe-stokes", "maximal-regularity ratio ladder"), false);
    add_common(app.add_subcommand("check-structure",
                                  "structural-condition scan and Young-gap grid"),
               false);
    add_common(app.add_subcommand("norms", "recompute norms from stored snapshots"), true);
    auto* sweep = app.add_subcommand("sweep", "cartesian product of override lists");
    add_common(sweep, false);
    sweep->add_option("-j,--jobs", cmd.jobs, "worker pool size");

    app.add_subcommand("config-reference", "print the documented configuration keys as markdown");

    CLI11_PARSE(app, argc, argv);
    cmd.verb = app.get_subcommands().front()->get_name();
    if (cmd.verb == "config-reference") {
        std::printf("# mixflow configuration keys\n\n| key | default | meaning |\n|---|---|---|\n");
        for (const auto& doc : mixflow::config_key_reference()) {
            std::printf("| `%s` | %s | %s |\n", doc.key, doc.default_value, doc.doc);
        }
        return 0;
    }
    return mixflow::dispatch(cmd);
}
