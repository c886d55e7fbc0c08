#pragma once

// Numerical counterparts of the well-posedness results: invariance of the
// admissible set, discrete mass balance, equicontinuity of the interpolants,
// convergence under time-step refinement and continuous dependence on the
// data. Every check is deterministic given its seed.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "gk/core.hpp"
#include "gk/dynamics.hpp"
#include "gk/interaction.hpp"
#include "gk/scenarios.hpp"

namespace gk {

/// Sampling ranges for randomized invariance trials.
struct InvarianceOptions {
    std::size_t trials = 1000;
    std::size_t steps = 200;
    std::size_t cells = 10;
    std::size_t min_classes = 2;
    std::size_t max_classes = 8;
    double alpha_min = 0.0, alpha_max = 1.0;
    double beta_min = 0.0, beta_max = 1.0;
    double eta0_min = 0.5, eta0_max = 2.0;
    /// dt = dt_factor / (1 + 2 eta_bar); must stay below 1.
    double dt_factor = 0.45;
    double slack = 1e-12;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
};

struct InvarianceViolation {
    std::size_t trial = 0;
    std::size_t step = 0;
    std::size_t cell = 0;
    std::size_t cls = 0;  // == classes for a density violation
    double value = 0.0;
    std::string what;
};

struct InvarianceReport {
    std::size_t trials = 0;
    std::size_t steps = 0;
    double max_excess = 0.0;  // largest amount by which a bound was crossed
    std::vector<InvarianceViolation> violations;

    bool passed() const noexcept { return violations.empty(); }
};

/// Random admissible state: per cell, n uniform weights scaled to a density
/// drawn from [0,1] (with some mass on the faces rho = 0 and rho = 1).
KineticState random_admissible_state(std::size_t cells, std::size_t classes, std::mt19937_64& rng);

/// Throws StabilityError if dt_factor >= 1 (the step would break the bound).
InvarianceReport check_invariance(const InvarianceOptions& options);

struct MassBalanceReport {
    std::size_t steps = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;  // 1e-12 m n

    bool passed() const noexcept { return max_residual <= tolerance; }
};

/// Recomputes the boundary fluxes of every step of a stride-1 trajectory
/// and compares the change in total mass with them.
/// Throws DomainError for a thinned trajectory.
MassBalanceReport check_mass_balance(const Trajectory& traj, const SpeedLattice& lattice,
                                     const BoundarySpec& bc);

struct EquicontinuityReport {
    std::size_t pairs = 0;
    std::size_t violations = 0;
    /// max ||f(t2) - f(t1)||_1 / (2 m n (1 + eta_bar) |t2 - t1|)
    double worst_ratio = 0.0;
    /// same for the per-component bound 2 (1 + eta_bar) |t2 - t1|
    double worst_component_ratio = 0.0;

    bool passed() const noexcept { return violations == 0; }
};

EquicontinuityReport check_equicontinuity(const Trajectory& traj, const EnvironmentProfile& profile,
                                          std::size_t pairs, std::uint64_t seed);

struct RefinementOptions {
    double dt0 = 0.15;
    std::size_t levels = 4;  // dt0, dt0/2, ..., dt0/2^(levels-1)
    double horizon = 150.0;
    std::size_t jobs = 1;
};

struct RefinementReport {
    std::vector<double> dts;
    /// sup over the finer grid and all components of |coarse - fine| for
    /// levels k and k + 1 (coarse interpolated linearly).
    std::vector<double> successive;
    /// same against the finest level, one entry per coarser level
    std::vector<double> to_finest;
    std::vector<double> ratios;  // successive[k] / successive[k + 1]
    double order = 0.0;          // log2 of the mean ratio

    bool monotone() const noexcept;
};

/// Throws DomainError for fewer than 3 levels or a horizon that is not a
/// multiple of dt0.
RefinementReport check_convergence(const Scenario& scenario, const RefinementOptions& options);

struct DependenceOptions {
    std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    double horizon = 150.0;
    double dt = 0.15;
    /// Perturb Phi_{0,1} (shifted down by delta) instead of the initial data.
    bool boundary = false;
    std::uint64_t seed = 1;
    std::size_t jobs = 1;
};

struct DependenceEntry {
    double delta = 0.0;
    double initial_gap = 0.0;   // ||f0 - g0||_1
    double boundary_gap = 0.0;  // sum dt (|dPhi_left| + ||d inflow||_1)
    double solution_gap = 0.0;  // max over recorded times and components
};

struct DependenceReport {
    std::vector<DependenceEntry> entries;
    std::vector<double> ratios;  // gap[k] / gap[k + 1]
    /// max over delta > 0 of solution_gap / (initial_gap + boundary_gap)
    double fitted_constant = 0.0;
};

/// Paired runs of the scenario and of a perturbation of size delta. Initial
/// perturbations are convex blends g0 = (1 - delta) f0 + delta s with a
/// random admissible s, so g0 stays admissible.
DependenceReport check_continuous_dependence(const Scenario& scenario,
                                             const DependenceOptions& options);

}  // namespace gk
