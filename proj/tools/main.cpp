#include "plrx/freq_solver.hpp"
#include "plrx/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <exception>

int main(int argc, char** argv) {
    CLI::App app{"Parametrically loaded small-loop receiver simulator"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run a scenario from a config file");
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
    std::string scenario_name;
    run->add_option("config", config_path, "Path to the scenario config")->required();
    run->add_option("--out", out_dir, "Output directory");
    run->add_option("--seed", seed, "Override the scenario seed")->each([&](const std::string&) {
        seed_set = true;
    });
    run->add_option("--jobs", jobs, "Parallel workers");
    run->add_option("--scenario", scenario_name, "Override the scenario kind");

    CLI11_PARSE(app, argc, argv);

    plrx::SimSetup setup;
    try {
        setup = plrx::load_config(config_path);
        if (seed_set) setup.scenario.seed = seed;
        if (!scenario_name.empty()) setup.scenario.kind = plrx::scenario_kind_from(scenario_name);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }

    try {
        const auto res = plrx::run_scenario(setup, out_dir, jobs);
        for (const auto& a : res.artifacts)
            std::printf("wrote %s/%s (fnv64 0x%016llx)\n", out_dir.c_str(), a.file.c_str(),
                        static_cast<unsigned long long>(a.fnv64));
        std::printf("wrote %s/manifest.json\n", out_dir.c_str());
    } catch (const plrx::SolverError& e) {
        std::fprintf(stderr, "solver failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
