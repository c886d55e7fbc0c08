#include "gk/scenarios.hpp"

#include <cmath>
#include <string>

#include "gk/errors.hpp"

namespace gk {

namespace {

constexpr std::size_t kCells = 10;
constexpr std::size_t kClasses = 6;

}  // namespace

std::vector<double> roadworks_alpha(RoadworksAlpha kind) {
    std::vector<double> alpha(kCells, 0.61);
    if (kind == RoadworksAlpha::Constant) {
        return alpha;
    }
    // Cells 6..9 in 1-based numbering.
    for (std::size_t i = 6; i <= 9; ++i) {
        const auto x = static_cast<double>(i);
        alpha[i - 1] = kind == RoadworksAlpha::Ramp ? 0.61 - 0.022 * (x - 5.0)
                                                    : (31.0 - x / 10.0) / 40.0;
    }
    alpha[kCells - 1] = 0.5;
    return alpha;
}

Scenario build_roadworks(double rho0, RoadworksAlpha kind) {
    if (!(rho0 > 0.0 && rho0 <= 1.0)) {
        throw DomainError("roadworks inflow density must lie in (0,1], got " + std::to_string(rho0));
    }
    EnvironmentProfile profile;
    profile.alpha = roadworks_alpha(kind);
    profile.beta = 0.0;
    profile.eta0 = 1.0;

    auto bc = BoundarySpec::constant_inflow(
        std::vector<double>(kClasses, rho0 / static_cast<double>(kClasses)));
    bc.right_limiter = [](double) { return 1.0; };

    return Scenario{uniform_speed_lattice(kClasses), KineticState(kCells, kClasses), std::move(bc),
                    std::move(profile)};
}

bool GateSchedule::is_green(double t) const {
    const double phase = t - period * std::floor(t / period);
    return phase < green;
}

std::optional<double> GateSchedule::override_at(double t) const {
    if (is_green(t)) {
        return std::nullopt;
    }
    return 0.0;
}

GateOverride GateSchedule::as_override() const {
    return GateOverride{interface, [g = *this](double t) { return g.override_at(t); }};
}

TrafficLightScenario build_traffic_light(std::size_t queue_cells) {
    TrafficLightOptions options;
    options.queue_cells = queue_cells;
    return build_traffic_light(options);
}

TrafficLightScenario build_traffic_light(const TrafficLightOptions& options) {
    const auto& gate = options.gate;
    if (gate.interface + 1 >= kCells) {
        throw DomainError("the light must sit on an interior interface");
    }
    if (options.queue_cells < 1 || options.queue_cells > gate.interface + 1) {
        throw DomainError("queue_cells must lie in [1, " + std::to_string(gate.interface + 1) +
                          "], got " + std::to_string(options.queue_cells));
    }
    if (!(gate.period > 0.0) || !(gate.green >= 0.0 && gate.green <= gate.period)) {
        throw DomainError("gate needs period > 0 and 0 <= green <= period");
    }

    KineticState initial(kCells, kClasses);
    for (std::size_t c = 0; c < options.queue_cells; ++c) {
        initial(gate.interface - c, 0) = 1.0;
    }

    BoundarySpec bc;
    bc.right_limiter = [](double) { return 1.0; };
    bc.gates.push_back(gate.as_override());

    auto profile = EnvironmentProfile::uniform(kCells, options.alpha, options.beta, options.eta0);
    profile.validate(kCells);

    return TrafficLightScenario{
        Scenario{uniform_speed_lattice(kClasses), std::move(initial), std::move(bc),
                 std::move(profile)},
        gate};
}

}  // namespace gk
