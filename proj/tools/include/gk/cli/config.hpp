#pragma once

// Run configuration for the granular-kinetics driver. The document is YAML
// with one mapping per section (model, scenario, dynamics, diagram, verify)
// plus the top-level keys command, seed and output. Unknown keys are
// rejected.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gk/errors.hpp"
#include "gk/scenarios.hpp"

namespace gk::cli {

/// Bad configuration: syntax, unknown key or out-of-domain value. line and
/// column are 1-based, 0 when unknown.
class ConfigError : public ConfigurationError {
public:
    ConfigError(const std::string& what, int line = 0, int column = 0);

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

enum class Command { Diagram, Simulate, Verify };

Command parse_command(const std::string& name);
std::string to_string(Command c);

enum class ScenarioKind { Roadworks, TrafficLight };

struct ModelConfig {
    std::size_t classes = 6;
    double eta0 = 1.0;
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::Roadworks;
    // roadworks
    double rho0 = 0.4;
    RoadworksAlpha alpha_profile = RoadworksAlpha::Ramp;
    // traffic light
    TrafficLightOptions light{};
};

struct DynamicsConfig {
    std::optional<double> dt;  // default_dt(profile) when absent
    double horizon = 150.0;
    std::size_t stride = 1;
};

struct DiagramConfig {
    std::vector<double> alpha{1.0};
    double rho_step = 0.01;
    std::vector<double> rho;  // explicit grid; overrides rho_step
    double tol = 1e-10;
    std::size_t max_steps = 10'000'000;
};

enum class Check { Invariance, MassBalance, Equicontinuity, Convergence, Dependence };

std::string to_string(Check c);

struct VerifyConfig {
    std::vector<Check> checks{Check::Invariance, Check::MassBalance, Check::Equicontinuity,
                              Check::Convergence, Check::Dependence};
    std::size_t trials = 1000;
    std::size_t steps = 200;
    std::size_t pairs = 1000;
    std::size_t levels = 4;
    std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    bool boundary = false;
    double slack = 1e-12;  // invariance tolerance
};

struct RunConfig {
    std::optional<Command> command;
    std::uint64_t seed = 1;
    std::string output = "out";
    ModelConfig model;
    ScenarioConfig scenario;
    DynamicsConfig dynamics;
    DiagramConfig diagram;
    VerifyConfig verify;
};

/// Parses and validates a configuration document. Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Builds the scenario selected by the configuration.
Scenario make_scenario(const ScenarioConfig& config);

/// Time step used for the scenario: the configured one or the default.
/// Throws ConfigError if it breaks the stability bound.
double resolve_dt(const DynamicsConfig& config, const EnvironmentProfile& profile);

}  // namespace gk::cli
