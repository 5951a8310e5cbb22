// enki: command-line front end for the experiment harness.
//
//   enki run <config>        exit 0 ok, 1 validation error, 2 runtime error
//   enki validate <config>
//   enki list-experiments

#include "enki/config.hpp"
#include "enki/harness.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

enki::ExperimentConfig load_with_env(const std::string& path) {
    enki::ExperimentConfig cfg = enki::load_config(path);
    if (const char* dir = std::getenv("ENKI_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
        cfg.output_dir = dir;
    }
    return cfg;
}

void report_validation(const enki::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    for (const auto& f : e.fields()) std::cerr << "  field: " << f << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Ensemble Kalman inversion experiment runner"};
    app.require_subcommand(1);

    std::string run_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", run_path, "Path to a key = value config file")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Check a config file without running it");
    validate->add_option("config", validate_path, "Path to a key = value config file")->required();

    auto* list = app.add_subcommand("list-experiments", "Print the available experiments");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    if (list->parsed()) {
        for (const auto& name : enki::experiment_names()) std::cout << name << '\n';
        return 0;
    }

    if (validate->parsed()) {
        try {
            const auto cfg = load_with_env(validate_path);
            std::cout << "ok: " << enki::to_string(cfg.experiment) << '\n';
            return 0;
        } catch (const enki::ValidationError& e) {
            report_validation(e);
            return kExitValidation;
        }
    }

    enki::ExperimentConfig cfg;
    try {
        cfg = load_with_env(run_path);
    } catch (const enki::ValidationError& e) {
        report_validation(e);
        return kExitValidation;
    }
    try {
        const auto bundle = enki::run_experiment(cfg);
        for (const auto& f : bundle.files) std::cout << "wrote " << f.string() << '\n';
        for (const auto& [k, v] : bundle.summary) std::cout << k << " = " << v << '\n';
    } catch (const enki::ValidationError& e) {
        report_validation(e);
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return 0;
}
