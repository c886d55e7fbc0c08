#pragma once

// Microscopic interaction ingredients: flux limiter, fictitious density,
// interaction rate, the table of games and the (local / nonlocal)
// interaction operator J = G - f L.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gk/core.hpp"

namespace gk {

/// Interaction cells {i, ..., i + horizon[i]} and their weights.
struct NonlocalWeights {
    std::vector<std::size_t> horizon;
    std::vector<std::vector<double>> weights;

    /// horizon == 0 everywhere, w_i = 1.
    static NonlocalWeights local(std::size_t cells);
    /// w_l = 1 / (horizon[i] + 1) over each cell's interaction window.
    static NonlocalWeights uniform(std::vector<std::size_t> horizon);

    /// Throws ConfigurationError on shape errors, windows past the last
    /// cell, negative weights or weight sums off 1 by more than 1e-12.
    void validate(std::size_t cells) const;
};

struct EnvironmentProfile {
    std::vector<double> alpha;  // one entry per cell, in [0,1]
    double beta = 0.0;          // anticipation, in [0,1]
    double eta0 = 1.0;          // rate coefficient, > 0
    std::optional<NonlocalWeights> nonlocal;

    static EnvironmentProfile uniform(std::size_t cells, double alpha, double beta, double eta0);

    /// Uniform bound on the interaction rate, eta(i) <= eta0.
    double eta_bar() const noexcept { return eta0; }

    void validate(std::size_t cells) const;
};

/// Phi(rho_here, rho_next): (1 - rho_next)/rho_here when the pair exceeds
/// capacity, 1 otherwise. Throws DomainError outside [0,1]^2.
double flux_limiter(double rho_here, double rho_next);

/// (1 - beta) rho_i + beta rho_{i+1}; the last cell sees its own density.
double fictitious_density(std::span<const double> rho, double beta, std::size_t i);

/// eta(i) = eta0 * rho_i.
double interaction_rate(double eta0, double rho);

/// Transition probabilities A[h][k][j] of one cell: candidate class h,
/// field class k, outcome class j.
class GameTable {
public:
    explicit GameTable(std::size_t classes);

    std::size_t classes() const noexcept { return n_; }

    double operator()(std::size_t h, std::size_t k, std::size_t j) const noexcept {
        return a_[(h * n_ + k) * n_ + j];
    }
    double& operator()(std::size_t h, std::size_t k, std::size_t j) noexcept {
        return a_[(h * n_ + k) * n_ + j];
    }

    /// Outcome distribution of the (h, k) game.
    std::span<const double> outcomes(std::size_t h, std::size_t k) const noexcept {
        return {a_.data() + (h * n_ + k) * n_, n_};
    }

    /// Largest |sum_j A[h][k][j] - 1| over all games.
    double normalization_defect() const noexcept;

private:
    std::size_t n_;
    std::vector<double> a_;
};

/// Builds the table for one cell from the environment parameter alpha,
/// the fictitious density felt in the cell and the limiter towards the
/// next cell. All three must lie in [0,1].
GameTable game_table(const SpeedLattice& lattice, double alpha, double rho_tilde, double phi_next);

struct GainLoss {
    std::vector<double> gain;  // G_ij per class
    double loss = 0.0;         // L_ij = eta * rho_i, the same for every class
};

GainLoss gain_loss(std::span<const double> f_row, const GameTable& table, double eta);

/// Everything the interaction operator needs to know about one cell.
struct CellInteraction {
    double rho;
    double rho_tilde;
    double phi_next;
    double eta;
};

/// Per-cell interaction data for a state, given Phi_{i,i+1} for every cell
/// (the last entry is the right boundary limiter).
std::vector<CellInteraction> cell_interactions(const KineticState& state,
                                               const EnvironmentProfile& profile,
                                               std::span<const double> limiters);

/// Local operator J_ij = G_ij - f_ij L_ij, row-major m x n.
std::vector<double> interaction_operator(const KineticState& state, const SpeedLattice& lattice,
                                         const EnvironmentProfile& profile,
                                         std::span<const double> limiters);

/// Operator with interaction windows ahead of each cell. With all horizons
/// zero the result is bit-identical to interaction_operator.
std::vector<double> interaction_operator_nonlocal(const KineticState& state,
                                                  const SpeedLattice& lattice,
                                                  const NonlocalWeights& weights,
                                                  const EnvironmentProfile& profile,
                                                  std::span<const double> limiters);

}  // namespace gk
