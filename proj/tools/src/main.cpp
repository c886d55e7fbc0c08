#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <iostream>

#include "gk/cli/config.hpp"
#include "gk/cli/run.hpp"
#include "gk/errors.hpp"

int main(int argc, char** argv) {
    using namespace gk::cli;
    configure_logging();

    CLI::App app{"Discrete kinetic traffic model: fundamental diagrams, road scenarios and "
                 "well-posedness checks"};
    app.set_version_flag("--version", GK_VERSION);
    std::string command;
    std::string config_path;
    std::size_t jobs = 1;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    app.add_option("command", command, "diagram, simulate or verify")
        ->required()
        ->check(CLI::IsMember({"diagram", "simulate", "verify"}));
    app.add_option("--config", config_path, "configuration file (YAML)")->required();
    app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::Range(1, 1024));
    app.add_option("--seed", seed, "overrides the configured seed");
    app.add_option("--out", out, "overrides the configured output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        auto config = load_config(config_path);
        const auto cmd = parse_command(command);
        if (config.command && *config.command != cmd) {
            throw ConfigError("configuration is for '" + to_string(*config.command) +
                              "' but the command line asks for '" + command + "'");
        }
        if (seed) {
            config.seed = *seed;
        }
        if (out) {
            config.output = *out;
        }
        const auto result = run(config, cmd, jobs);
        for (const auto& line : result.summary) {
            std::cout << line << '\n';
        }
        return result.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const gk::ConvergenceError& e) {
        std::cerr << "convergence failure: " << e.what() << '\n';
        return kExitConvergence;
    } catch (const gk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}
