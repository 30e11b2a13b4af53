#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "prunetrace/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"pointwise design-space pruning and Pareto-traced topology exploration"};
    app.require_subcommand(1);

    std::string config, name, dir, out;
    int snapshot_every = 0;
    unsigned seed = 0;

    CLI::App* run = app.add_subcommand("run", "run a scenario config end to end");
    run->add_option("config", config, "scenario .ini file")->required();
    run->add_option("--out", out, "override the output directory");
    run->add_option("--snapshot-every", snapshot_every, "write PGM snapshots every Nth step")
        ->check(CLI::PositiveNumber);
    run->add_option("--seed", seed, "seed for randomized harnesses; runs are deterministic");

    CLI::App* validate = app.add_subcommand("validate", "check a config without running solvers");
    validate->add_option("config", config, "scenario .ini file")->required();

    CLI::App* gen = app.add_subcommand("gen", "write a built-in scenario into a directory");
    std::string names;
    for (const auto& n : prunetrace::generator_names()) names += n + " ";
    gen->add_option("name", name, "one of: " + names)->required();
    gen->add_option("dir", dir, "target directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            prunetrace::Scenario s = prunetrace::load_scenario(config);
            if (!out.empty()) s.out_dir = out;
            if (snapshot_every > 0) s.snapshot_every = snapshot_every;
            prunetrace::RunResult r = prunetrace::run_scenario(s);
            if (!r.message.empty()) std::cerr << r.message << "\n";
            return r.exit_code;
        }
        if (validate->parsed()) {
            prunetrace::Scenario s = prunetrace::load_scenario(config);
            prunetrace::ValidationReport rep = prunetrace::validate_scenario(s);
            for (const auto& e : rep.errors) std::cout << e << "\n";
            return rep.ok() ? 0 : 3;
        }
        for (const auto& f : prunetrace::generate_scenario(name, dir)) std::cout << f << "\n";
        return 0;
    } catch (const prunetrace::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const prunetrace::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
