#include "gk/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gk/errors.hpp"

namespace gk {

namespace {

// Round-off allowance on quantities that live in [0,1].
constexpr double kUnitSlack = 1e-12;

double unit_value(double x, const char* what) {
    if (!(x >= -kUnitSlack && x <= 1.0 + kUnitSlack)) {
        throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(x));
    }
    return std::clamp(x, 0.0, 1.0);
}

}  // namespace

NonlocalWeights NonlocalWeights::local(std::size_t cells) {
    NonlocalWeights w;
    w.horizon.assign(cells, 0);
    w.weights.assign(cells, std::vector<double>{1.0});
    return w;
}

NonlocalWeights NonlocalWeights::uniform(std::vector<std::size_t> horizon) {
    NonlocalWeights w;
    w.weights.reserve(horizon.size());
    for (auto mu : horizon) {
        w.weights.emplace_back(mu + 1, 1.0 / static_cast<double>(mu + 1));
    }
    w.horizon = std::move(horizon);
    return w;
}

void NonlocalWeights::validate(std::size_t cells) const {
    if (horizon.size() != cells || weights.size() != cells) {
        throw ConfigurationError("nonlocal weights: expected one window per cell");
    }
    for (std::size_t i = 0; i < cells; ++i) {
        if (i + horizon[i] >= cells) {
            throw ConfigurationError("nonlocal weights: window of cell " + std::to_string(i) +
                                     " extends past the last cell");
        }
        if (weights[i].size() != horizon[i] + 1) {
            throw ConfigurationError("nonlocal weights: cell " + std::to_string(i) +
                                     " needs horizon+1 weights");
        }
        double sum = 0.0;
        for (double w : weights[i]) {
            if (!(w >= 0.0)) {
                throw ConfigurationError("nonlocal weights must be non-negative");
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-12) {
            throw ConfigurationError("nonlocal weights of cell " + std::to_string(i) +
                                     " sum to " + std::to_string(sum) + ", expected 1");
        }
    }
}

EnvironmentProfile EnvironmentProfile::uniform(std::size_t cells, double alpha, double beta,
                                               double eta0) {
    EnvironmentProfile p;
    p.alpha.assign(cells, alpha);
    p.beta = beta;
    p.eta0 = eta0;
    return p;
}

void EnvironmentProfile::validate(std::size_t cells) const {
    if (alpha.size() != cells) {
        throw ConfigurationError("alpha profile has " + std::to_string(alpha.size()) +
                                 " entries for " + std::to_string(cells) + " cells");
    }
    for (double a : alpha) {
        if (!(a >= 0.0 && a <= 1.0)) {
            throw DomainError("alpha must lie in [0,1], got " + std::to_string(a));
        }
    }
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw DomainError("beta must lie in [0,1], got " + std::to_string(beta));
    }
    if (!(eta0 > 0.0) || !std::isfinite(eta0)) {
        throw DomainError("eta0 must be strictly positive, got " + std::to_string(eta0));
    }
    if (nonlocal) {
        nonlocal->validate(cells);
    }
}

double flux_limiter(double rho_here, double rho_next) {
    rho_here = unit_value(rho_here, "rho_here");
    rho_next = unit_value(rho_next, "rho_next");
    if (rho_here + rho_next > 1.0) {
        return (1.0 - rho_next) / rho_here;
    }
    return 1.0;
}

double fictitious_density(std::span<const double> rho, double beta, std::size_t i) {
    if (i >= rho.size()) {
        throw DomainError("fictitious_density: cell index " + std::to_string(i) +
                          " out of range");
    }
    if (i + 1 == rho.size()) {
        return rho[i];
    }
    return (1.0 - beta) * rho[i] + beta * rho[i + 1];
}

double interaction_rate(double eta0, double rho) { return eta0 * rho; }

GameTable::GameTable(std::size_t classes) : n_(classes), a_(classes * classes * classes, 0.0) {}

double GameTable::normalization_defect() const noexcept {
    double worst = 0.0;
    for (std::size_t h = 0; h < n_; ++h) {
        for (std::size_t k = 0; k < n_; ++k) {
            double s = 0.0;
            for (double p : outcomes(h, k)) {
                s += p;
            }
            worst = std::max(worst, std::abs(s - 1.0));
        }
    }
    return worst;
}

GameTable game_table(const SpeedLattice& lattice, double alpha, double rho_tilde,
                     double phi_next) {
    alpha = unit_value(alpha, "alpha");
    rho_tilde = unit_value(rho_tilde, "rho_tilde");
    phi_next = unit_value(phi_next, "phi_next");

    const std::size_t n = lattice.size();
    GameTable a(n);

    // Probability of the "accelerate / keep up" outcome, shared by all branches.
    const double advance = alpha * (1.0 - rho_tilde) * phi_next;
    const double forced_stop = 1.0 - phi_next;
    const double hold_or_follow = (1.0 - alpha * (1.0 - rho_tilde)) * phi_next;
    const double slow_down = (1.0 - alpha) * rho_tilde * phi_next;

    // Targets may coincide at the lattice ends (e.g. n = 2), so everything
    // is accumulated rather than assigned.
    for (std::size_t h = 0; h < n; ++h) {
        for (std::size_t k = 0; k < n; ++k) {
            if (h < k) {
                if (h == 0) {
                    a(0, k, 0) += 1.0 - advance;
                    a(0, k, 1) += advance;
                } else {
                    a(h, k, 0) += forced_stop;
                    a(h, k, h) += hold_or_follow;
                    a(h, k, h + 1) += advance;
                }
            } else if (h > k) {
                if (k == 0) {
                    a(h, 0, 0) += 1.0 - advance;
                    a(h, 0, h) += advance;
                } else {
                    a(h, k, 0) += forced_stop;
                    a(h, k, k) += hold_or_follow;
                    a(h, k, h) += advance;
                }
            } else if (h == 0) {
                a(0, 0, 0) += 1.0 - advance;
                a(0, 0, 1) += advance;
            } else if (h == n - 1) {
                a(h, h, 0) += forced_stop;
                a(h, h, h - 1) += slow_down;
                a(h, h, h) += (1.0 - (1.0 - alpha) * rho_tilde) * phi_next;
            } else {
                const double keep = (1.0 - alpha - (1.0 - 2.0 * alpha) * rho_tilde) * phi_next;
                a(h, h, 0) += forced_stop;
                a(h, h, h - 1) += slow_down;
                a(h, h, h) += keep;
                a(h, h, h + 1) += advance;
            }
        }
    }

    for (std::size_t h = 0; h < n; ++h) {
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t j = 0; j < n; ++j) {
                double& p = a(h, k, j);
                if (!(p >= -kUnitSlack && p <= 1.0 + kUnitSlack)) {
                    throw Error("game_table: entry outside [0,1] (" + std::to_string(p) + ")");
                }
                p = std::clamp(p, 0.0, 1.0);
            }
        }
    }
    return a;
}

GainLoss gain_loss(std::span<const double> f_row, const GameTable& table, double eta) {
    const std::size_t n = table.classes();
    GainLoss out;
    out.gain.assign(n, 0.0);
    double rho = 0.0;
    for (double v : f_row) {
        rho += v;
    }
    out.loss = eta * rho;
    if (eta == 0.0 || rho == 0.0) {
        return out;
    }
    // sum_h f_h sum_k A[h][k][.] f_k, then one multiplication by eta.
    std::vector<double> acc(n, 0.0);
    for (std::size_t h = 0; h < n; ++h) {
        if (f_row[h] == 0.0) {
            continue;
        }
        for (std::size_t k = 0; k < n; ++k) {
            const double w = f_row[h] * f_row[k];
            if (w == 0.0) {
                continue;
            }
            const auto p = table.outcomes(h, k);
            for (std::size_t j = 0; j < n; ++j) {
                acc[j] += p[j] * w;
            }
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        out.gain[j] = eta * acc[j];
    }
    return out;
}

std::vector<CellInteraction> cell_interactions(const KineticState& state,
                                               const EnvironmentProfile& profile,
                                               std::span<const double> limiters) {
    const std::size_t m = state.cells();
    if (limiters.size() != m) {
        throw ConfigurationError("expected one limiter Phi_{i,i+1} per cell");
    }
    const auto rho = state.densities();
    std::vector<CellInteraction> cells(m);
    for (std::size_t i = 0; i < m; ++i) {
        cells[i] = CellInteraction{
            rho[i],
            fictitious_density(rho, profile.beta, i),
            limiters[i],
            interaction_rate(profile.eta0, rho[i]),
        };
    }
    return cells;
}

std::vector<double> interaction_operator(const KineticState& state, const SpeedLattice& lattice,
                                         const EnvironmentProfile& profile,
                                         std::span<const double> limiters) {
    const std::size_t m = state.cells();
    const std::size_t n = state.classes();
    const auto cells = cell_interactions(state, profile, limiters);
    std::vector<double> j_op(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (cells[i].rho == 0.0) {
            continue;
        }
        const auto table =
            game_table(lattice, profile.alpha[i], cells[i].rho_tilde, cells[i].phi_next);
        const auto gl = gain_loss(state.row(i), table, cells[i].eta);
        for (std::size_t j = 0; j < n; ++j) {
            j_op[i * n + j] = gl.gain[j] - state(i, j) * gl.loss;
        }
    }
    return j_op;
}

std::vector<double> interaction_operator_nonlocal(const KineticState& state,
                                                  const SpeedLattice& lattice,
                                                  const NonlocalWeights& weights,
                                                  const EnvironmentProfile& profile,
                                                  std::span<const double> limiters) {
    const std::size_t m = state.cells();
    const std::size_t n = state.classes();
    weights.validate(m);
    const auto cells = cell_interactions(state, profile, limiters);

    std::vector<std::optional<GameTable>> tables(m);
    auto table_of = [&](std::size_t l) -> const GameTable& {
        if (!tables[l]) {
            tables[l] = game_table(lattice, profile.alpha[l], cells[l].rho_tilde,
                                   cells[l].phi_next);
        }
        return *tables[l];
    };

    std::vector<double> j_op(m * n, 0.0);
    std::vector<double> acc(n);
    std::vector<double> gain(n);
    for (std::size_t i = 0; i < m; ++i) {
        const auto fi = state.row(i);
        if (cells[i].rho == 0.0) {
            continue;
        }
        std::fill(gain.begin(), gain.end(), 0.0);
        double loss = 0.0;
        for (std::size_t d = 0; d <= weights.horizon[i]; ++d) {
            const std::size_t l = i + d;
            const double rate = cells[l].eta * weights.weights[i][d];
            loss += rate * cells[l].rho;
            if (rate == 0.0) {
                continue;
            }
            const auto fl = state.row(l);
            const auto& table = table_of(l);
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::size_t h = 0; h < n; ++h) {
                if (fi[h] == 0.0) {
                    continue;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double w = fi[h] * fl[k];
                    if (w == 0.0) {
                        continue;
                    }
                    const auto p = table.outcomes(h, k);
                    for (std::size_t j = 0; j < n; ++j) {
                        acc[j] += p[j] * w;
                    }
                }
            }
            for (std::size_t j = 0; j < n; ++j) {
                gain[j] += rate * acc[j];
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            j_op[i * n + j] = gain[j] - fi[j] * loss;
        }
    }
    return j_op;
}

}  // namespace gk
