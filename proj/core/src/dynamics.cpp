#include "gk/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gk/errors.hpp"

namespace gk {

namespace {

constexpr double kSlack = 1e-12;

double checked_limiter(double phi, const char* what) {
    if (!(phi >= -kSlack && phi <= 1.0 + kSlack)) {
        throw BoundaryError(std::string(what) + " must lie in [0,1], got " + std::to_string(phi));
    }
    return std::clamp(phi, 0.0, 1.0);
}

}  // namespace

BoundarySpec BoundarySpec::closed() {
    BoundarySpec bc;
    bc.left_limiter = [](const BoundaryContext&) { return 0.0; };
    bc.right_limiter = [](double) { return 0.0; };
    return bc;
}

BoundarySpec BoundarySpec::constant_inflow(std::vector<double> inflow) {
    BoundarySpec bc;
    bc.inflow = [f = std::move(inflow)](double) { return f; };
    return bc;
}

BoundaryValues evaluate_boundary(const BoundarySpec& bc, const KineticState& state) {
    const double t = state.time();
    const std::size_t n = state.classes();
    BoundaryValues out;
    if (bc.inflow) {
        out.inflow = bc.inflow(t);
        if (out.inflow.size() != n) {
            throw BoundaryError("inflow has " + std::to_string(out.inflow.size()) +
                                " classes, expected " + std::to_string(n));
        }
    } else {
        out.inflow.assign(n, 0.0);
    }
    double rho_in = 0.0;
    for (double v : out.inflow) {
        if (!(v >= -kSlack && v <= 1.0 + kSlack)) {
            throw BoundaryError("inflow value outside [0,1] at t=" + std::to_string(t));
        }
        rho_in += v;
    }
    if (rho_in > 1.0 + kSlack) {
        throw BoundaryError("inflow density exceeds capacity at t=" + std::to_string(t));
    }
    rho_in = std::clamp(rho_in, 0.0, 1.0);

    const double rho_first = std::clamp(state.density(0), 0.0, 1.0);
    if (bc.left_limiter) {
        out.phi_left = checked_limiter(bc.left_limiter({t, rho_in, rho_first}), "left limiter");
    } else {
        out.phi_left = flux_limiter(rho_in, rho_first);
    }
    out.phi_right = bc.right_limiter ? checked_limiter(bc.right_limiter(t), "right limiter") : 1.0;
    return out;
}

std::vector<double> interface_limiters(const KineticState& state, const BoundarySpec& bc,
                                       const BoundaryValues& boundary) {
    const std::size_t m = state.cells();
    const auto rho = state.densities();
    std::vector<double> phi(m + 1);
    phi[0] = boundary.phi_left;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        phi[i + 1] = flux_limiter(std::clamp(rho[i], 0.0, 1.0), std::clamp(rho[i + 1], 0.0, 1.0));
    }
    phi[m] = boundary.phi_right;
    for (const auto& gate : bc.gates) {
        if (gate.interface + 1 >= m) {
            throw BoundaryError("gate interface " + std::to_string(gate.interface) +
                                " is not an interior interface");
        }
        if (!gate.value) {
            continue;
        }
        if (auto v = gate.value(state.time())) {
            phi[gate.interface + 1] = checked_limiter(*v, "gate limiter");
        }
    }
    return phi;
}

double max_stable_dt(const EnvironmentProfile& profile) {
    return 1.0 / (1.0 + 2.0 * profile.eta_bar());
}

double default_dt(const EnvironmentProfile& profile) { return 0.9 * max_stable_dt(profile) * 0.5; }

StepResult advance(const KineticState& state, const SpeedLattice& lattice,
                   const BoundarySpec& bc, const EnvironmentProfile& profile, double dt) {
    const std::size_t m = state.cells();
    const std::size_t n = state.classes();
    if (lattice.size() != n) {
        throw ConfigurationError("lattice and state disagree on the number of speed classes");
    }
    profile.validate(m);
    if (!(dt > 0.0)) {
        throw DomainError("time step must be positive");
    }
    if (!(dt < max_stable_dt(profile))) {
        throw StabilityError("time step " + std::to_string(dt) + " violates dt < 1/(1+2 eta_bar) = " +
                             std::to_string(max_stable_dt(profile)));
    }

    const auto boundary = evaluate_boundary(bc, state);
    const auto phi = interface_limiters(state, bc, boundary);
    // The table of cell i sees Phi_{i,i+1}, i.e. phi[i + 1].
    const std::span<const double> next_limiters(phi.data() + 1, m);
    const auto j_op =
        profile.nonlocal
            ? interaction_operator_nonlocal(state, lattice, *profile.nonlocal, profile, next_limiters)
            : interaction_operator(state, lattice, profile, next_limiters);

    StepResult out{KineticState(m, n, state.time() + dt), {}};
    auto& next = out.state;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double upstream = i == 0 ? boundary.inflow[j] : state(i - 1, j);
            const double transport = lattice[j] * (phi[i + 1] * state(i, j) - phi[i] * upstream);
            next(i, j) = state(i, j) - dt * transport + dt * j_op[i * n + j];
        }
    }

    auto& flux = out.flux;
    flux.phi_left = phi[0];
    flux.phi_right = phi[m];
    for (std::size_t j = 0; j < n; ++j) {
        flux.inflow_flux += lattice[j] * boundary.inflow[j];
        flux.outflow_flux += lattice[j] * state(m - 1, j);
    }
    flux.inflow = boundary.inflow;
    return out;
}

KineticState step(const KineticState& state, const SpeedLattice& lattice, const BoundarySpec& bc,
                  const EnvironmentProfile& profile, double dt) {
    return advance(state, lattice, bc, profile, dt).state;
}

std::size_t step_count(double dt, double horizon) {
    if (!(dt > 0.0) || !(horizon >= 0.0)) {
        throw DomainError("need dt > 0 and a non-negative horizon");
    }
    const double ratio = horizon / dt;
    const double steps = std::round(ratio);
    if (std::abs(ratio - steps) > 1e-9 * std::max(1.0, ratio)) {
        throw DomainError("horizon " + std::to_string(horizon) +
                          " is not an integer multiple of dt " + std::to_string(dt));
    }
    return static_cast<std::size_t>(steps);
}

Trajectory simulate(const KineticState& initial, const SpeedLattice& lattice,
                    const BoundarySpec& bc, const EnvironmentProfile& profile, double dt,
                    double horizon, std::size_t stride) {
    if (stride == 0) {
        throw DomainError("recording stride must be positive");
    }
    const std::size_t steps = step_count(dt, horizon);
    const double t0 = initial.time();

    Trajectory traj;
    traj.dt = dt;
    traj.stride = stride;
    traj.times.reserve(steps / stride + 2);
    traj.states.reserve(steps / stride + 2);
    traj.times.push_back(t0);
    traj.states.push_back(initial);

    KineticState current = initial;
    for (std::size_t k = 1; k <= steps; ++k) {
        current = step(current, lattice, bc, profile, dt);
        // Keep the clock on the grid instead of accumulating dt.
        current.set_time(t0 + static_cast<double>(k) * dt);
        if (k % stride == 0 || k == steps) {
            traj.times.push_back(current.time());
            traj.states.push_back(current);
        }
    }
    return traj;
}

KineticState interpolate(const Trajectory& traj, double t) {
    if (traj.states.empty()) {
        throw DomainError("interpolate: empty trajectory");
    }
    const double t0 = traj.times.front();
    const double t1 = traj.times.back();
    const double tol = 1e-12 * std::max(1.0, std::abs(t1));
    if (t < t0 - tol || t > t1 + tol) {
        throw DomainError("interpolate: t=" + std::to_string(t) + " outside [" +
                          std::to_string(t0) + ", " + std::to_string(t1) + "]");
    }
    if (traj.states.size() == 1) {
        return traj.states.front();
    }
    t = std::clamp(t, t0, t1);
    auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - traj.times.begin());
    if (hi >= traj.times.size()) {
        return traj.states.back();
    }
    const std::size_t lo = hi - 1;
    if (t == traj.times[lo]) {
        return traj.states[lo];
    }
    const double theta = (t - traj.times[lo]) / (traj.times[hi] - traj.times[lo]);
    const auto& a = traj.states[lo];
    const auto& b = traj.states[hi];
    KineticState out(a.cells(), a.classes(), t);
    auto dst = out.values();
    const auto x = a.values();
    const auto y = b.values();
    for (std::size_t k = 0; k < dst.size(); ++k) {
        dst[k] = (1.0 - theta) * x[k] + theta * y[k];
    }
    return out;
}

}  // namespace gk
