#pragma once

// Time evolution of the inhomogeneous road: the explicit time-discrete
// scheme, boundary handling, full runs and piecewise-linear interpolation
// of the iterates.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "gk/core.hpp"
#include "gk/interaction.hpp"

namespace gk {

/// What a left-boundary limiter may look at.
struct BoundaryContext {
    double t;
    double rho_inflow;  // sum_j of the prescribed inflow
    double rho_first;   // density of the first cell
};

/// Replaces Phi_{i,i+1} (i = `interface`, between cells i and i+1) while
/// `value` returns a number; the standard limiter applies otherwise.
struct GateOverride {
    std::size_t interface;
    std::function<std::optional<double>(double t)> value;
};

struct BoundarySpec {
    /// Incoming distribution f_0j(t). Empty means no inflow.
    std::function<std::vector<double>(double t)> inflow;
    /// Phi_{0,1}. Empty means Phi(rho_inflow, rho_first).
    std::function<double(const BoundaryContext&)> left_limiter;
    /// Phi_{m,m+1}. Empty means free outflow (1).
    std::function<double(double t)> right_limiter;
    std::vector<GateOverride> gates;

    /// Phi_{0,1} = Phi_{m,m+1} = 0 and no inflow: nothing crosses the ends.
    static BoundarySpec closed();
    /// Constant inflow with the standard derived left limiter.
    static BoundarySpec constant_inflow(std::vector<double> inflow);
};

/// Boundary data resolved against a state at its current time.
struct BoundaryValues {
    std::vector<double> inflow;
    double phi_left = 0.0;
    double phi_right = 1.0;
};

/// Throws BoundaryError when the data are not admissible.
BoundaryValues evaluate_boundary(const BoundarySpec& bc, const KineticState& state);

/// Phi_{i,i+1} for i = 0..m: entry 0 is Phi_{0,1}, entry m is Phi_{m,m+1}.
/// Gate overrides are applied.
std::vector<double> interface_limiters(const KineticState& state, const BoundarySpec& bc,
                                       const BoundaryValues& boundary);

/// Exclusive upper bound on the time step, 1 / (1 + 2 eta_bar).
double max_stable_dt(const EnvironmentProfile& profile);

/// 0.45 / (1 + 2 eta_bar), i.e. 0.9 of the bound times a 0.5 safety factor.
double default_dt(const EnvironmentProfile& profile);

/// Boundary exchange during one step.
struct StepFlux {
    double phi_left = 0.0;
    double inflow_flux = 0.0;   // sum_j v_j f_0j
    double phi_right = 0.0;
    double outflow_flux = 0.0;  // sum_j v_j f_mj
    std::vector<double> inflow;

    /// dt (phi_left inflow_flux - phi_right outflow_flux).
    double mass_change(double dt) const noexcept {
        return dt * (phi_left * inflow_flux - phi_right * outflow_flux);
    }
};

struct StepResult {
    KineticState state;
    StepFlux flux;
};

/// One step of f' = f - dt v_j (Phi_{i,i+1} f_ij - Phi_{i-1,i} f_{i-1,j}) + dt J_ij.
/// Throws StabilityError when dt >= max_stable_dt(profile).
StepResult advance(const KineticState& state, const SpeedLattice& lattice,
                   const BoundarySpec& bc, const EnvironmentProfile& profile, double dt);

KineticState step(const KineticState& state, const SpeedLattice& lattice, const BoundarySpec& bc,
                  const EnvironmentProfile& profile, double dt);

struct Trajectory {
    std::vector<double> times;
    std::vector<KineticState> states;
    double dt = 0.0;
    std::size_t stride = 1;

    double horizon() const noexcept { return times.empty() ? 0.0 : times.back(); }
};

/// Iterates `step` N = T/dt times (T must be an integer multiple of dt).
/// Every `stride`-th iterate is recorded, plus the final one.
Trajectory simulate(const KineticState& initial, const SpeedLattice& lattice,
                    const BoundarySpec& bc, const EnvironmentProfile& profile, double dt,
                    double horizon, std::size_t stride = 1);

/// Number of steps covering `horizon`; throws DomainError if it is not a
/// multiple of dt.
std::size_t step_count(double dt, double horizon);

/// Piecewise-linear interpolant of the recorded iterates.
KineticState interpolate(const Trajectory& traj, double t);

}  // namespace gk
