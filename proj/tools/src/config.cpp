#include "gk/cli/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gk/dynamics.hpp"

namespace gk::cli {

namespace {

std::string located(const std::string& what, int line, int column) {
    if (line <= 0) {
        return what;
    }
    return fmt::format("line {}, column {}: {}", line, column, what);
}

ConfigError error_at(const YAML::Node& node, const std::string& what) {
    const auto mark = node.Mark();
    if (mark.is_null()) {
        return ConfigError(what);
    }
    return ConfigError(what, mark.line + 1, mark.column + 1);
}

template <class T>
T scalar(const YAML::Node& node, const std::string& key, const char* expected) {
    if (!node.IsScalar()) {
        throw error_at(node, fmt::format("{}: expected {}", key, expected));
    }
    try {
        return node.as<T>();
    } catch (const YAML::Exception&) {
        throw error_at(node, fmt::format("{}: expected {}, got '{}'", key, expected, node.Scalar()));
    }
}

double number(const YAML::Node& node, const std::string& key) {
    return scalar<double>(node, key, "a number");
}

double number_in(const YAML::Node& node, const std::string& key, double lo, double hi,
                 const char* range) {
    const double v = number(node, key);
    if (!(v >= lo && v <= hi)) {
        throw error_at(node, fmt::format("{} = {} is outside {}", key, v, range));
    }
    return v;
}

double positive(const YAML::Node& node, const std::string& key) {
    const double v = number(node, key);
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw error_at(node, fmt::format("{} = {} must be a positive number", key, v));
    }
    return v;
}

std::size_t count(const YAML::Node& node, const std::string& key, long long min) {
    const auto v = scalar<long long>(node, key, "an integer");
    if (v < min) {
        throw error_at(node, fmt::format("{} = {} must be at least {}", key, v, min));
    }
    return static_cast<std::size_t>(v);
}

std::string word(const YAML::Node& node, const std::string& key) {
    return scalar<std::string>(node, key, "a string");
}

// A scalar or a sequence of scalars, each checked against [lo, hi].
std::vector<double> numbers_in(const YAML::Node& node, const std::string& key, double lo,
                               double hi, const char* range) {
    std::vector<double> out;
    if (node.IsSequence()) {
        for (const auto& item : node) {
            out.push_back(number_in(item, key, lo, hi, range));
        }
    } else {
        out.push_back(number_in(node, key, lo, hi, range));
    }
    if (out.empty()) {
        throw error_at(node, key + ": list must not be empty");
    }
    return out;
}

template <class Handler>
void for_each_key(const YAML::Node& section, const std::string& name, Handler&& handle) {
    if (section.IsNull()) {
        return;
    }
    if (!section.IsMap()) {
        throw error_at(section, fmt::format("section '{}' must be a mapping", name));
    }
    for (const auto& kv : section) {
        const auto key = scalar<std::string>(kv.first, name, "a key");
        const auto qualified = name.empty() ? key : name + "." + key;
        if (!handle(key, qualified, kv.second)) {
            throw error_at(kv.first, fmt::format("unknown key '{}'", qualified));
        }
    }
}

Check parse_check(const YAML::Node& node, const std::string& key) {
    const auto name = word(node, key);
    if (name == "invariance") return Check::Invariance;
    if (name == "mass_balance") return Check::MassBalance;
    if (name == "equicontinuity") return Check::Equicontinuity;
    if (name == "convergence") return Check::Convergence;
    if (name == "dependence") return Check::Dependence;
    throw error_at(node, fmt::format("{}: unknown check '{}' (expected invariance, mass_balance, "
                                     "equicontinuity, convergence or dependence)",
                                     key, name));
}

void parse_model(const YAML::Node& section, ModelConfig& model) {
    for_each_key(section, "model", [&](const std::string& key, const std::string& q,
                                       const YAML::Node& v) {
        if (key == "classes") {
            model.classes = count(v, q, 2);
        } else if (key == "eta0") {
            model.eta0 = positive(v, q);
        } else {
            return false;
        }
        return true;
    });
}

void parse_gate(const YAML::Node& section, GateSchedule& gate) {
    for_each_key(section, "scenario.gate", [&](const std::string& key, const std::string& q,
                                               const YAML::Node& v) {
        if (key == "interface") {
            gate.interface = count(v, q, 0);
        } else if (key == "period") {
            gate.period = positive(v, q);
        } else if (key == "green") {
            gate.green = number(v, q);
        } else {
            return false;
        }
        return true;
    });
}

void parse_scenario(const YAML::Node& section, ScenarioConfig& sc) {
    if (section.IsMap() && section["name"]) {
        const auto& node = section["name"];
        const auto name = word(node, "scenario.name");
        if (name == "roadworks") {
            sc.kind = ScenarioKind::Roadworks;
        } else if (name == "traffic_light") {
            sc.kind = ScenarioKind::TrafficLight;
        } else {
            throw error_at(node, fmt::format("scenario.name: unknown scenario '{}' (expected "
                                             "roadworks or traffic_light)",
                                             name));
        }
    }
    const bool roadworks = sc.kind == ScenarioKind::Roadworks;
    for_each_key(section, "scenario", [&](const std::string& key, const std::string& q,
                                          const YAML::Node& v) {
        if (key == "name") {
            return true;
        }
        const bool for_roadworks = key == "rho0" || key == "alpha_profile";
        const bool for_light = key == "queue_cells" || key == "alpha" || key == "beta" ||
                               key == "eta0" || key == "gate";
        if (!for_roadworks && !for_light) {
            return false;
        }
        if (for_roadworks != roadworks) {
            throw error_at(v, fmt::format("{} does not apply to the {} scenario", q,
                                          roadworks ? "roadworks" : "traffic_light"));
        }
        if (key == "rho0") {
            sc.rho0 = number(v, q);
            if (!(sc.rho0 > 0.0 && sc.rho0 <= 1.0)) {
                throw error_at(v, fmt::format("{} = {} is outside (0,1]", q, sc.rho0));
            }
        } else if (key == "alpha_profile") {
            const auto name = word(v, q);
            if (name == "ramp") {
                sc.alpha_profile = RoadworksAlpha::Ramp;
            } else if (name == "constant") {
                sc.alpha_profile = RoadworksAlpha::Constant;
            } else if (name == "literal") {
                sc.alpha_profile = RoadworksAlpha::Literal;
            } else {
                throw error_at(v, fmt::format("{}: expected ramp, constant or literal, got '{}'",
                                              q, name));
            }
        } else if (key == "queue_cells") {
            sc.light.queue_cells = count(v, q, 1);
        } else if (key == "alpha") {
            sc.light.alpha = number_in(v, q, 0.0, 1.0, "[0,1]");
        } else if (key == "beta") {
            sc.light.beta = number_in(v, q, 0.0, 1.0, "[0,1]");
        } else if (key == "eta0") {
            sc.light.eta0 = positive(v, q);
        } else {
            parse_gate(v, sc.light.gate);
        }
        return true;
    });
}

void parse_dynamics(const YAML::Node& section, DynamicsConfig& dyn) {
    for_each_key(section, "dynamics", [&](const std::string& key, const std::string& q,
                                          const YAML::Node& v) {
        if (key == "dt") {
            dyn.dt = positive(v, q);
        } else if (key == "horizon") {
            dyn.horizon = number(v, q);
            if (!(dyn.horizon >= 0.0) || !std::isfinite(dyn.horizon)) {
                throw error_at(v, fmt::format("{} = {} must be non-negative", q, dyn.horizon));
            }
        } else if (key == "stride") {
            dyn.stride = count(v, q, 1);
        } else {
            return false;
        }
        return true;
    });
}

void parse_diagram(const YAML::Node& section, DiagramConfig& d) {
    for_each_key(section, "diagram", [&](const std::string& key, const std::string& q,
                                         const YAML::Node& v) {
        if (key == "alpha") {
            d.alpha = numbers_in(v, q, 0.0, 1.0, "[0,1]");
        } else if (key == "rho_step") {
            d.rho_step = number(v, q);
            if (!(d.rho_step > 0.0 && d.rho_step <= 1.0)) {
                throw error_at(v, fmt::format("{} = {} is outside (0,1]", q, d.rho_step));
            }
        } else if (key == "rho") {
            d.rho = numbers_in(v, q, 0.0, 1.0, "[0,1]");
            if (!std::is_sorted(d.rho.begin(), d.rho.end()) ||
                std::adjacent_find(d.rho.begin(), d.rho.end()) != d.rho.end()) {
                throw error_at(v, q + ": densities must be strictly increasing");
            }
        } else if (key == "tol") {
            d.tol = positive(v, q);
        } else if (key == "max_steps") {
            d.max_steps = count(v, q, 1);
        } else {
            return false;
        }
        return true;
    });
}

void parse_verify(const YAML::Node& section, VerifyConfig& vc) {
    for_each_key(section, "verify", [&](const std::string& key, const std::string& q,
                                        const YAML::Node& v) {
        if (key == "checks") {
            vc.checks.clear();
            if (v.IsSequence()) {
                for (const auto& item : v) {
                    vc.checks.push_back(parse_check(item, q));
                }
            } else {
                vc.checks.push_back(parse_check(v, q));
            }
            if (vc.checks.empty()) {
                throw error_at(v, q + ": list must not be empty");
            }
        } else if (key == "trials") {
            vc.trials = count(v, q, 1);
        } else if (key == "steps") {
            vc.steps = count(v, q, 1);
        } else if (key == "pairs") {
            vc.pairs = count(v, q, 1);
        } else if (key == "levels") {
            vc.levels = count(v, q, 3);
        } else if (key == "deltas") {
            vc.deltas = numbers_in(v, q, 0.0, 1.0, "[0,1]");
        } else if (key == "boundary") {
            vc.boundary = scalar<bool>(v, q, "true or false");
        } else if (key == "slack") {
            // Negative values demand a margin inside the admissible set.
            vc.slack = number_in(v, q, -1.0, 1.0, "[-1,1]");
        } else {
            return false;
        }
        return true;
    });
}

}  // namespace

ConfigError::ConfigError(const std::string& what, int line, int column)
    : ConfigurationError(located(what, line, column)), line_(line), column_(column) {}

Command parse_command(const std::string& name) {
    if (name == "diagram") return Command::Diagram;
    if (name == "simulate") return Command::Simulate;
    if (name == "verify") return Command::Verify;
    throw ConfigError("unknown command '" + name + "' (expected diagram, simulate or verify)");
}

std::string to_string(Command c) {
    switch (c) {
        case Command::Diagram: return "diagram";
        case Command::Simulate: return "simulate";
        case Command::Verify: return "verify";
    }
    return "?";
}

std::string to_string(Check c) {
    switch (c) {
        case Check::Invariance: return "invariance";
        case Check::MassBalance: return "mass_balance";
        case Check::Equicontinuity: return "equicontinuity";
        case Check::Convergence: return "convergence";
        case Check::Dependence: return "dependence";
    }
    return "?";
}

RunConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("syntax error: " + e.msg, e.mark.line + 1, e.mark.column + 1);
    }
    RunConfig cfg;
    if (root.IsNull()) {
        return cfg;
    }
    if (!root.IsMap()) {
        throw error_at(root, "configuration must be a mapping of keys and sections");
    }
    for_each_key(root, "", [&](const std::string& key, const std::string&, const YAML::Node& v) {
        if (key == "command") {
            try {
                cfg.command = parse_command(word(v, key));
            } catch (const ConfigError& e) {
                if (e.line() > 0) {
                    throw;
                }
                throw error_at(v, e.what());
            }
        } else if (key == "seed") {
            cfg.seed = count(v, key, 0);
        } else if (key == "output") {
            cfg.output = word(v, key);
            if (cfg.output.empty()) {
                throw error_at(v, "output must not be empty");
            }
        } else if (key == "model") {
            parse_model(v, cfg.model);
        } else if (key == "scenario") {
            parse_scenario(v, cfg.scenario);
        } else if (key == "dynamics") {
            parse_dynamics(v, cfg.dynamics);
        } else if (key == "diagram") {
            parse_diagram(v, cfg.diagram);
        } else if (key == "verify") {
            parse_verify(v, cfg.verify);
        } else {
            return false;
        }
        return true;
    });

    // Cross-field checks go through the same builders the run uses.
    const auto scenario = [&] {
        try {
            return make_scenario(cfg.scenario);
        } catch (const DomainError& e) {
            throw ConfigError(std::string("scenario: ") + e.what());
        }
    }();
    const double dt = resolve_dt(cfg.dynamics, scenario.profile);
    try {
        step_count(dt, cfg.dynamics.horizon);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("dynamics.horizon: ") + e.what());
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open configuration file '" + path + "'");
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

Scenario make_scenario(const ScenarioConfig& config) {
    if (config.kind == ScenarioKind::Roadworks) {
        return build_roadworks(config.rho0, config.alpha_profile);
    }
    return build_traffic_light(config.light).scenario;
}

double resolve_dt(const DynamicsConfig& config, const EnvironmentProfile& profile) {
    if (!config.dt) {
        return default_dt(profile);
    }
    const double bound = max_stable_dt(profile);
    if (!(*config.dt < bound)) {
        throw ConfigError(fmt::format("dynamics.dt = {} violates dt < 1/(1+2 eta_bar) = {}",
                                      *config.dt, bound));
    }
    return *config.dt;
}

}  // namespace gk::cli
