// Command-line front end for the harvester toolkit.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "harvest/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Electrostatic vibration energy harvester: simulation and design toolkit"};
    app.require_subcommand(1);

    std::string config, out, scenario_name, sweep_key, grid, constraints;
    std::string kind = "cosine";

    auto* sim = app.add_subcommand("simulate", "Run a transient simulation from a config file");
    sim->add_option("--config", config, "run configuration file")->required();
    sim->add_option("--out", out, "output series CSV (summary written alongside)")->required();

    auto* sc = app.add_subcommand("scenario", "Run a preset characterisation scenario");
    sc->add_option("--scenario", scenario_name, "fig5-capfit | fig6-probe | fig7-tool")
        ->required();
    sc->add_option("--out", out, "output directory")->required();

    auto* sw = app.add_subcommand("sweep", "Sweep one numeric config key");
    sw->add_option("--config", config, "run configuration file")->required();
    sw->add_option("--sweep-key", sweep_key, "dotted key, e.g. electrical.load_ohm")->required();
    sw->add_option("--grid", grid, "lin|log:min:max:count")->required();
    sw->add_option("--out", out, "output table CSV")->required();

    auto* cf = app.add_subcommand("capfit", "Fit a periodic profile to measured C(z)");
    cf->add_option("--config", config, "measurement CSV with header z_m,c_f")->required();
    cf->add_option("--kind", kind, "cosine | triangular (default cosine)");
    cf->add_option("--out", out, "output parameter file (curve CSV written alongside)")
        ->required();

    auto* op = app.add_subcommand("optimize", "Grid-search design optimization");
    op->add_option("--config", config, "base run configuration file")->required();
    op->add_option("--constraints", constraints, "constraints file")->required();
    op->add_option("--out", out, "ranked table CSV (best config written alongside)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return harvest::cli::exit_code::config;
    }

    int threads = 1;
    if (const char* env = std::getenv("HARVEST_THREADS")) {
        threads = std::atoi(env);
        if (threads < 1) threads = 1;
    }

    if (sim->parsed()) return harvest::cli::cmd_simulate(config, out);
    if (sc->parsed()) return harvest::cli::cmd_scenario(scenario_name, out);
    if (sw->parsed()) return harvest::cli::cmd_sweep(config, sweep_key, grid, out, threads);
    if (cf->parsed()) return harvest::cli::cmd_capfit(config, kind, out);
    if (op->parsed()) return harvest::cli::cmd_optimize(config, constraints, out);
    return harvest::cli::exit_code::config;
}
