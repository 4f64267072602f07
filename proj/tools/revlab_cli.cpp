// Config-driven experiment runner for surfaces of revolution with Euclidean
// ends: trapped-volume curves, rate fits, exponent tables, Dirichlet windows,
// random-data wave decay, concentration checks and complex-scaling resonances.
//
//   revlab run <config.json> [--workers N] [--cache-dir PATH]
//   revlab describe <config.json>
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "revlab/errors.hpp"
#include "revlab/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"revlab: dynamics and spectra on surfaces of revolution"};
    app.require_subcommand(1);

    std::string config;
    int workers = 0;
    std::string cache_dir;

    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config, "JSON config path")->required();
    run->add_option("--workers", workers, "worker thread count");
    run->add_option("--cache-dir", cache_dir, "propagator plan cache directory");

    auto* describe = app.add_subcommand("describe", "print the resource plan for a config");
    describe->add_option("config", config, "JSON config path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            revlab::RunOverrides ov;
            ov.workers = workers;
            ov.cache_dir = cache_dir;
            const auto outputs = revlab::run_experiment(config, ov);
            std::cout << "wrote " << outputs.size() << " artifacts\n";
        } else {
            revlab::describe_experiment(config);
        }
    } catch (const revlab::ConfigError& e) {
        std::cerr << "{\"error\":\"config\",\"message\":\"" << e.what() << "\"}\n";
        return 2;
    } catch (const revlab::NumericalError& e) {
        std::cerr << "{\"error\":\"numerical\",\"message\":\"" << e.what() << "\"}\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"internal\",\"message\":\"" << e.what() << "\"}\n";
        return 3;
    }
    return 0;
}
