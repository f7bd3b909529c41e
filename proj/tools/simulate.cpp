#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "affine/sim/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Integrate an affinely rigid body run configuration."};
    std::string config;
    std::string out_dir = ".";
    bool validate_only = false;
    unsigned long long seed = 0;
    app.add_option("config", config, "Run configuration (JSON)")->required();
    app.add_option("--out", out_dir, "Output directory");
    app.add_flag("--validate-only", validate_only, "Check the configuration and exit");
    app.add_option("--seed", seed, "Seed for randomized initial states");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : affine::sim::kValidationError;
    }
    return affine::sim::run_file(config, out_dir, validate_only, seed, std::cout);
}
