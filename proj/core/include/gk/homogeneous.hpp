#pragma once

// Spatially homogeneous reduction: relaxation to the asymptotic speed
// distribution at fixed density, fundamental diagrams and critical density.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gk/core.hpp"
#include "gk/interaction.hpp"

namespace gk {

struct HomogeneousState {
    std::vector<double> f;
    double rho = 0.0;
};

/// df_j/dt = eta (sum_hk A^j_hk f_h f_k - f_j rho), eta = eta0 rho, with the
/// table built from rho_tilde = rho and Phi = flux_limiter(rho, rho).
std::vector<double> homogeneous_rhs(std::span<const double> f, const SpeedLattice& lattice,
                                    double alpha, double eta0);

struct SteadyStateOptions {
    /// Stop once || sum_hk A p_h p_k - p ||_1 < tol, with p = f / rho.
    double tol = 1e-10;
    std::size_t max_steps = 10'000'000;
    /// Euler step in units of the relaxation time 1/(eta0 rho^2).
    double relaxation_step = 0.5;
    /// Newton refinement of the relaxed distribution.
    bool polish = true;
    /// Starting distribution, normalised internally; uniform when empty.
    std::optional<std::vector<double>> initial_shape;
};

struct SteadyStateResult {
    HomogeneousState state;
    double residual = 0.0;     // normalised residual at exit
    std::size_t steps = 0;     // Euler steps taken
    double max_drift = 0.0;    // max_t |rho(t) - rho(0)| along the relaxation
};

/// Relaxes the homogeneous equations at density rho from the initial split.
/// Throws ConvergenceError if the tolerance is not met within max_steps.
SteadyStateResult steady_state(double rho, const SpeedLattice& lattice, double alpha, double eta0,
                               const SteadyStateOptions& options = {});

/// Asymptotic normalised distribution in the limit rho -> 0+.
std::vector<double> low_density_shape(const SpeedLattice& lattice, double alpha,
                                      const SteadyStateOptions& options = {});

struct DiagramPoint {
    double rho = 0.0;
    bool converged = false;
    double q = 0.0;
    std::optional<double> u;
    double theta = 0.0;
    double residual = 0.0;
    double max_drift = 0.0;
};

struct FundamentalDiagram {
    double alpha = 0.0;
    std::vector<DiagramPoint> points;
};

/// Densities 0, step, 2 step, ..., 1.
std::vector<double> density_grid(double step);

FundamentalDiagram fundamental_diagram(double alpha, std::span<const double> rho_grid,
                                       const SpeedLattice& lattice, double eta0,
                                       const SteadyStateOptions& options = {},
                                       std::size_t jobs = 1);

/// argmax of the asymptotic speed variance over density_grid(resolution),
/// ties towards smaller rho. At rho = 0 the variance of low_density_shape
/// is used.
double critical_density(double alpha, const SpeedLattice& lattice, double eta0,
                        double resolution, const SteadyStateOptions& options = {},
                        std::size_t jobs = 1);

/// Same, from an already computed diagram.
double critical_density(const FundamentalDiagram& diagram, const SpeedLattice& lattice,
                        const SteadyStateOptions& options = {});

}  // namespace gk
