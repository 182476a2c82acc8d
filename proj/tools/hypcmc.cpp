#include "hypcmc/run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"CMC Killing graphs with prescribed ideal boundary in hyperbolic space"};
    std::string config;
    std::string mode;
    app.add_option("--config", config, "Run configuration (JSON)")->required();
    app.add_option("--mode", mode, "Override the configured mode")
        ->check(CLI::IsMember({"solve", "verify", "barriers", "oracle"}));
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hypcmc::exit_code::config;
    }
    return hypcmc::run_file(config, mode, std::cerr);
}
