// Command line front end. `run --config FILE` executes any INI-described
// study; the converge/spinodal/bubble subcommands start from the built-in
// defaults of those studies. --override section.key=value edits either
// starting point and is checked against the known keys.
#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chmhd/config.hpp"
#include "chmhd/experiments.hpp"

namespace {

int dispatch(chmhd::Config cfg, const std::vector<std::string>& overrides) {
    for (const std::string& spec : overrides) cfg.apply_override(spec);
    return chmhd::run_from_config(cfg);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"chmhd: diffuse-interface two-phase magnetohydrodynamics"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    CLI::App* cmd_run = app.add_subcommand("run", "run a study described by a config file");
    cmd_run->add_option("--config", config_path, "INI configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_run->add_option("--override", overrides, "section.key=value (repeatable)");

    for (const char* kind : {"converge", "spinodal", "bubble"}) {
        CLI::App* cmd = app.add_subcommand(kind, std::string("run the canned ") + kind + " study");
        cmd->add_option("--override", overrides, "section.key=value (repeatable)");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) return dispatch(chmhd::Config::from_file(config_path), overrides);
        for (const char* kind : {"converge", "spinodal", "bubble"})
            if (app.get_subcommand(kind)->parsed())
                return dispatch(
                    chmhd::Config::from_text(chmhd::default_config_text(kind), "<builtin>"),
                    overrides);
        std::fprintf(stderr, "error: no subcommand\n");
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
