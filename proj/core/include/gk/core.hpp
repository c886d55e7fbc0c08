#pragma once

// Discrete state space of the model: space cells x speed classes, the
// kinetic state container and its macroscopic moments.
//
// Everything is dimensionless: cell length 1, speeds in [0,1], densities
// normalised by the road capacity so that 0 <= rho_i <= 1.
// Cells and speed classes are indexed from 0 throughout the library.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gk {

/// Ordered dimensionless speeds v_0 = 0 < ... < v_{n-1} = 1, n >= 2.
class SpeedLattice {
public:
    explicit SpeedLattice(std::vector<double> speeds);

    std::size_t size() const noexcept { return speeds_.size(); }
    double operator[](std::size_t j) const noexcept { return speeds_[j]; }
    std::span<const double> speeds() const noexcept { return speeds_; }

    friend bool operator==(const SpeedLattice&, const SpeedLattice&) = default;

private:
    std::vector<double> speeds_;
};

/// v_j = j/(n-1). Throws InvalidLattice for n < 2.
SpeedLattice uniform_speed_lattice(std::size_t n);

/// Dense m x n matrix of f_ij, row-major by cell, plus the current time.
class KineticState {
public:
    KineticState() = default;
    KineticState(std::size_t cells, std::size_t classes, double t = 0.0);

    std::size_t cells() const noexcept { return cells_; }
    std::size_t classes() const noexcept { return classes_; }
    double time() const noexcept { return t_; }
    void set_time(double t) noexcept { t_ = t; }

    double operator()(std::size_t i, std::size_t j) const noexcept { return f_[i * classes_ + j]; }
    double& operator()(std::size_t i, std::size_t j) noexcept { return f_[i * classes_ + j]; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {f_.data() + i * classes_, classes_};
    }
    std::span<double> row(std::size_t i) noexcept { return {f_.data() + i * classes_, classes_}; }

    std::span<const double> values() const noexcept { return f_; }
    std::span<double> values() noexcept { return f_; }

    /// rho_i = sum_j f_ij.
    double density(std::size_t i) const noexcept;
    std::vector<double> densities() const;

    /// Membership in the admissible set: 0 <= f_ij <= 1 and rho_i <= 1,
    /// each bound relaxed by `slack`.
    bool admissible(double slack = 0.0) const noexcept;

    friend bool operator==(const KineticState&, const KineticState&) = default;

private:
    std::size_t cells_ = 0;
    std::size_t classes_ = 0;
    std::vector<double> f_;
    double t_ = 0.0;
};

/// Per-cell moments. `u[i]` is empty where rho_i = 0.
struct MacroFields {
    std::vector<double> rho;
    std::vector<double> q;
    std::vector<std::optional<double>> u;
    std::vector<double> theta;
};

MacroFields macroscopic_fields(const KineticState& state, const SpeedLattice& lattice);

/// Moments of a single cell / homogeneous distribution.
struct CellMoments {
    double rho = 0.0;
    double q = 0.0;
    std::optional<double> u;
    double theta = 0.0;
};

CellMoments cell_moments(std::span<const double> f, const SpeedLattice& lattice);

/// Dimensionless total mass sum_ij f_ij, in [0, m] for admissible states.
double total_vehicles(const KineticState& state);

/// ||a - b||_1 over all entries; states must have equal shape.
double l1_distance(const KineticState& a, const KineticState& b);

struct PhysicalUnits {
    double cell_length;   // metres
    double max_speed;     // m/s
    double max_vehicles;  // vehicles per cell at capacity
};

/// eta* = ell * N_max / (2 V_max) * eta_phys. Throws InvalidUnits.
double nondimensionalize(const PhysicalUnits& units, double eta_phys);

/// t* = (V_max / ell) t.
double dimensionless_time(const PhysicalUnits& units, double t);

/// v* = v / V_max.
double dimensionless_speed(const PhysicalUnits& units, double v);

}  // namespace gk
