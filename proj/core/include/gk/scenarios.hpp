#pragma once

// Canned road configurations: queue formation behind roadworks (cell-varying
// alpha) and behind a traffic light (periodically gated interface).

#include <cstddef>
#include <optional>
#include <vector>

#include "gk/core.hpp"
#include "gk/dynamics.hpp"
#include "gk/interaction.hpp"

namespace gk {

/// Everything needed to start a run.
struct Scenario {
    SpeedLattice lattice;
    KineticState initial;
    BoundarySpec bc;
    EnvironmentProfile profile;
};

enum class RoadworksAlpha {
    Ramp,      // 0.61 on cells 1-5, linear down to 0.5 on cell 10
    Constant,  // 0.61 everywhere (control run)
    Literal,   // tabulated (31 - i/10)/40 on cells 6-9, for comparison only
};

/// alpha_i for the 10-cell roadworks road (cell 0 is the first cell).
std::vector<double> roadworks_alpha(RoadworksAlpha kind);

/// m = 10, n = 6, eta0 = 1, beta = 0, empty road, inflow rho0/n in every
/// class, Phi_{0,1} = Phi(rho0, rho_1), free outflow.
/// Throws DomainError unless 0 < rho0 <= 1.
Scenario build_roadworks(double rho0, RoadworksAlpha kind = RoadworksAlpha::Ramp);

/// Red/green cycle of a light sitting on interface `interface` (between
/// cells interface and interface + 1). Green comes first.
struct GateSchedule {
    std::size_t interface = 4;
    double period = 20.0;
    double green = 10.0;

    bool is_green(double t) const;
    /// 0 while red, nothing (standard limiter) while green.
    std::optional<double> override_at(double t) const;
    GateOverride as_override() const;
};

struct TrafficLightOptions {
    std::size_t queue_cells = 5;
    double alpha = 0.55;
    double beta = 1.0;
    double eta0 = 1.0;
    GateSchedule gate{};
};

struct TrafficLightScenario {
    Scenario scenario;
    GateSchedule gate;
};

/// m = 10, n = 6, full cells in class v_1 immediately behind the light,
/// empty road ahead, no inflow. Throws DomainError unless 1 <= queue_cells <= 5.
TrafficLightScenario build_traffic_light(std::size_t queue_cells);
TrafficLightScenario build_traffic_light(const TrafficLightOptions& options);

}  // namespace gk
