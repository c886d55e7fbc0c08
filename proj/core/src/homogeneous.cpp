#include "gk/homogeneous.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gk/errors.hpp"
#include "gk/parallel.hpp"

namespace gk {

namespace {

GameTable homogeneous_table(const SpeedLattice& lattice, double alpha, double rho) {
    return game_table(lattice, alpha, rho, flux_limiter(rho, rho));
}

// out_j = sum_hk A^j_hk p_h p_k
void quadratic_gain(const GameTable& table, std::span<const double> p, std::span<double> out) {
    const std::size_t n = table.classes();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t h = 0; h < n; ++h) {
        if (p[h] == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double w = p[h] * p[k];
            if (w == 0.0) {
                continue;
            }
            const auto a = table.outcomes(h, k);
            for (std::size_t j = 0; j < n; ++j) {
                out[j] += a[j] * w;
            }
        }
    }
}

// || sum A p p - p ||_1 + |sum p - 1| for a normalised distribution p.
double shape_residual(const GameTable& table, std::span<const double> p) {
    std::vector<double> g(p.size());
    quadratic_gain(table, p, g);
    double r = 0.0;
    double mass = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        r += std::abs(g[j] - p[j]);
        mass += p[j];
    }
    return r + std::abs(mass - 1.0);
}

// Newton iterations on sum A p p - p = 0 with the last equation replaced by
// sum p = 1 (the equations are linearly dependent on that constraint). A
// step is kept only if it stays non-negative and lowers the residual, so a
// nearly singular Jacobian (degenerate equilibria) just stalls the polish.
void newton_polish(const GameTable& table, std::vector<double>& p) {
    const std::size_t n = p.size();
    double residual = shape_residual(table, p);
    std::vector<double> g(n);
    std::vector<double> candidate(n);
    Eigen::MatrixXd jac(n, n);
    Eigen::VectorXd rhs(n);
    for (int iter = 0; iter < 100 && residual > 1e-15; ++iter) {
        quadratic_gain(table, p, g);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t l = 0; l < n; ++l) {
                double d = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    d += (table(l, k, j) + table(k, l, j)) * p[k];
                }
                jac(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(l)) =
                    d - (j == l ? 1.0 : 0.0);
            }
            rhs(static_cast<Eigen::Index>(j)) = -(g[j] - p[j]);
        }
        const auto last = static_cast<Eigen::Index>(n - 1);
        jac.row(last).setOnes();
        rhs(last) = 1.0 - std::accumulate(p.begin(), p.end(), 0.0);

        const Eigen::VectorXd delta = jac.fullPivLu().solve(rhs);
        if (!delta.allFinite()) {
            return;
        }
        bool admissible = true;
        for (std::size_t j = 0; j < n; ++j) {
            candidate[j] = p[j] + delta(static_cast<Eigen::Index>(j));
            if (candidate[j] < -1e-14) {
                admissible = false;
                break;
            }
            candidate[j] = std::max(candidate[j], 0.0);
        }
        if (!admissible) {
            return;
        }
        const double next = shape_residual(table, candidate);
        if (!(next < residual)) {
            return;
        }
        p = candidate;
        residual = next;
    }
}

struct Relaxed {
    std::vector<double> f;
    double residual;
    std::size_t steps;
    double max_drift;
    bool converged;
};

// Explicit Euler on the homogeneous equations in the original variables f.
// The step is scaled by the relaxation time 1/(eta0 rho^2) so that every
// density relaxes in a comparable number of steps; the residual is measured
// on the normalised distribution p = f / rho.
Relaxed relax(const GameTable& table, double rho, double eta0, std::vector<double> f,
              const SteadyStateOptions& opt) {
    const std::size_t n = f.size();
    const double eta = interaction_rate(eta0, rho);
    const double dt = opt.relaxation_step / (eta * rho);
    const double scale = eta * rho * rho;  // ||rhs||_1 = scale * shape residual
    std::vector<double> gain(n);
    Relaxed out{std::move(f), 0.0, 0, 0.0, false};
    for (;;) {
        // The loss term uses the current mass: with the nominal rho instead,
        // round-off in sum_j f_j would grow exponentially.
        const double mass = std::accumulate(out.f.begin(), out.f.end(), 0.0);
        quadratic_gain(table, out.f, gain);
        double res = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            gain[j] = eta * (gain[j] - out.f[j] * mass);
            res += std::abs(gain[j]);
        }
        out.max_drift = std::max(out.max_drift, std::abs(mass - rho));
        out.residual = res / scale;
        if (out.residual < opt.tol) {
            out.converged = true;
            return out;
        }
        if (out.steps >= opt.max_steps) {
            return out;
        }
        for (std::size_t j = 0; j < n; ++j) {
            out.f[j] += dt * gain[j];
        }
        ++out.steps;
    }
}

std::vector<double> initial_split(double rho, std::size_t n, const SteadyStateOptions& opt) {
    std::vector<double> f(n, rho / static_cast<double>(n));
    if (opt.initial_shape) {
        const auto& s = *opt.initial_shape;
        if (s.size() != n) {
            throw ConfigurationError("initial shape has the wrong number of classes");
        }
        const double total = std::accumulate(s.begin(), s.end(), 0.0);
        if (!(total > 0.0) || std::any_of(s.begin(), s.end(), [](double x) { return x < 0.0; })) {
            throw DomainError("initial shape must be non-negative with positive mass");
        }
        for (std::size_t j = 0; j < n; ++j) {
            f[j] = rho * s[j] / total;
        }
    }
    return f;
}

SteadyStateResult solve(const GameTable& table, double rho, double eta0,
                        const SteadyStateOptions& opt) {
    const std::size_t n = table.classes();
    auto relaxed = relax(table, rho, eta0, initial_split(rho, n, opt), opt);

    SteadyStateResult out;
    out.steps = relaxed.steps;
    out.max_drift = relaxed.max_drift;
    out.state.rho = rho;

    std::vector<double> p(n);
    for (std::size_t j = 0; j < n; ++j) {
        p[j] = relaxed.f[j] / rho;
    }
    double residual = relaxed.residual;
    if (opt.polish) {
        newton_polish(table, p);
        residual = shape_residual(table, p);
    }
    if (!relaxed.converged && !(residual < opt.tol)) {
        throw ConvergenceError("homogeneous relaxation did not converge at rho=" +
                                   std::to_string(rho) + " (residual " +
                                   std::to_string(residual) + ")",
                               residual, relaxed.steps);
    }
    out.residual = std::min(residual, relaxed.residual);
    out.state.f.resize(n);
    double mass = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        out.state.f[j] = rho * p[j];
        mass += out.state.f[j];
    }
    out.max_drift = std::max(out.max_drift, std::abs(mass - rho));
    return out;
}

}  // namespace

std::vector<double> homogeneous_rhs(std::span<const double> f, const SpeedLattice& lattice,
                                    double alpha, double eta0) {
    const std::size_t n = lattice.size();
    if (f.size() != n) {
        throw ConfigurationError("homogeneous state and lattice disagree on the class count");
    }
    const double rho = std::accumulate(f.begin(), f.end(), 0.0);
    std::vector<double> out(n, 0.0);
    if (rho == 0.0) {
        return out;
    }
    const auto table = homogeneous_table(lattice, alpha, std::min(rho, 1.0));
    const double eta = interaction_rate(eta0, rho);
    quadratic_gain(table, f, out);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = eta * (out[j] - f[j] * rho);
    }
    return out;
}

SteadyStateResult steady_state(double rho, const SpeedLattice& lattice, double alpha, double eta0,
                               const SteadyStateOptions& options) {
    if (!(rho >= 0.0 && rho <= 1.0)) {
        throw DomainError("density must lie in [0,1], got " + std::to_string(rho));
    }
    if (!(eta0 > 0.0)) {
        throw DomainError("eta0 must be strictly positive");
    }
    if (rho == 0.0) {
        SteadyStateResult out;
        out.state.f.assign(lattice.size(), 0.0);
        return out;
    }
    return solve(homogeneous_table(lattice, alpha, rho), rho, eta0, options);
}

std::vector<double> low_density_shape(const SpeedLattice& lattice, double alpha,
                                      const SteadyStateOptions& options) {
    // Normalised dynamics at rho -> 0+: rho_tilde = 0, Phi = 1, unit rates.
    const auto table = game_table(lattice, alpha, 0.0, 1.0);
    return solve(table, 1.0, 1.0, options).state.f;
}

std::vector<double> density_grid(double step) {
    if (!(step > 0.0) || step > 1.0) {
        throw DomainError("density resolution must lie in (0,1]");
    }
    const auto count = static_cast<std::size_t>(std::llround(1.0 / step));
    std::vector<double> grid;
    grid.reserve(count + 1);
    for (std::size_t k = 0; k <= count; ++k) {
        grid.push_back(std::min(1.0, static_cast<double>(k) * step));
    }
    if (grid.back() < 1.0) {
        grid.push_back(1.0);
    }
    return grid;
}

FundamentalDiagram fundamental_diagram(double alpha, std::span<const double> rho_grid,
                                       const SpeedLattice& lattice, double eta0,
                                       const SteadyStateOptions& options, std::size_t jobs) {
    FundamentalDiagram diagram;
    diagram.alpha = alpha;
    diagram.points.resize(rho_grid.size());
    parallel_for(rho_grid.size(), jobs, [&](std::size_t k) {
        auto& pt = diagram.points[k];
        pt.rho = rho_grid[k];
        try {
            const auto ss = steady_state(pt.rho, lattice, alpha, eta0, options);
            const auto mom = cell_moments(ss.state.f, lattice);
            pt.converged = true;
            pt.q = mom.q;
            pt.u = mom.u;
            pt.theta = mom.theta;
            pt.residual = ss.residual;
            pt.max_drift = ss.max_drift;
        } catch (const ConvergenceError& e) {
            pt.converged = false;
            pt.residual = e.residual();
        }
    });
    // Near degenerate equilibria (mass piling up in one class) the relaxation
    // from the uniform split only decays algebraically. Retry those points
    // from the nearest converged lower-density equilibrium.
    for (std::size_t k = 1; k < diagram.points.size(); ++k) {
        auto& pt = diagram.points[k];
        const auto& prev = diagram.points[k - 1];
        if (pt.converged || !prev.converged || prev.rho == 0.0) {
            continue;
        }
        auto warm = options;
        warm.initial_shape = steady_state(prev.rho, lattice, alpha, eta0, options).state.f;
        try {
            const auto ss = steady_state(pt.rho, lattice, alpha, eta0, warm);
            const auto mom = cell_moments(ss.state.f, lattice);
            pt.converged = true;
            pt.q = mom.q;
            pt.u = mom.u;
            pt.theta = mom.theta;
            pt.residual = ss.residual;
            pt.max_drift = ss.max_drift;
        } catch (const ConvergenceError& e) {
            pt.residual = e.residual();
        }
    }
    return diagram;
}

double critical_density(const FundamentalDiagram& diagram, const SpeedLattice& lattice,
                        const SteadyStateOptions& options) {
    double best_rho = 0.0;
    double best_theta = -1.0;
    for (const auto& pt : diagram.points) {
        if (!pt.converged) {
            continue;
        }
        double theta = pt.theta;
        if (pt.rho == 0.0) {
            try {
                theta = cell_moments(low_density_shape(lattice, diagram.alpha, options), lattice).theta;
            } catch (const ConvergenceError&) {
                // no usable limit shape: keep the empty-road value
            }
        }
        if (theta > best_theta) {
            best_theta = theta;
            best_rho = pt.rho;
        }
    }
    return best_rho;
}

double critical_density(double alpha, const SpeedLattice& lattice, double eta0,
                        double resolution, const SteadyStateOptions& options, std::size_t jobs) {
    const auto grid = density_grid(resolution);
    const auto diagram = fundamental_diagram(alpha, grid, lattice, eta0, options, jobs);
    return critical_density(diagram, lattice, options);
}

}  // namespace gk
