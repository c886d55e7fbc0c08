#include "gk/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gk/errors.hpp"

namespace gk {

SpeedLattice::SpeedLattice(std::vector<double> speeds) : speeds_(std::move(speeds)) {
    if (speeds_.size() < 2) {
        throw InvalidLattice("speed lattice needs at least 2 classes, got " +
                             std::to_string(speeds_.size()));
    }
    if (speeds_.front() != 0.0 || speeds_.back() != 1.0) {
        throw InvalidLattice("speed lattice must start at 0 and end at 1");
    }
    for (std::size_t j = 1; j < speeds_.size(); ++j) {
        if (!(speeds_[j] > speeds_[j - 1])) {
            throw InvalidLattice("speed lattice must be strictly increasing");
        }
    }
}

SpeedLattice uniform_speed_lattice(std::size_t n) {
    if (n < 2) {
        throw InvalidLattice("speed lattice needs at least 2 classes, got " + std::to_string(n));
    }
    std::vector<double> v(n);
    const auto denom = static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
        v[j] = static_cast<double>(j) / denom;
    }
    return SpeedLattice(std::move(v));
}

KineticState::KineticState(std::size_t cells, std::size_t classes, double t)
    : cells_(cells), classes_(classes), f_(cells * classes, 0.0), t_(t) {
    if (cells == 0) {
        throw DomainError("a road needs at least one cell");
    }
    if (classes < 2) {
        throw InvalidLattice("a state needs at least 2 speed classes");
    }
}

double KineticState::density(std::size_t i) const noexcept {
    const auto r = row(i);
    return std::accumulate(r.begin(), r.end(), 0.0);
}

std::vector<double> KineticState::densities() const {
    std::vector<double> rho(cells_);
    for (std::size_t i = 0; i < cells_; ++i) {
        rho[i] = density(i);
    }
    return rho;
}

bool KineticState::admissible(double slack) const noexcept {
    for (std::size_t i = 0; i < cells_; ++i) {
        double rho = 0.0;
        for (double v : row(i)) {
            if (!(v >= -slack && v <= 1.0 + slack)) {
                return false;
            }
            rho += v;
        }
        if (rho > 1.0 + slack) {
            return false;
        }
    }
    return true;
}

CellMoments cell_moments(std::span<const double> f, const SpeedLattice& lattice) {
    CellMoments m;
    for (std::size_t j = 0; j < f.size(); ++j) {
        m.rho += f[j];
        m.q += lattice[j] * f[j];
    }
    if (m.rho > 0.0) {
        const double u = m.q / m.rho;
        double var = 0.0;
        for (std::size_t j = 0; j < f.size(); ++j) {
            const double d = lattice[j] - u;
            var += d * d * f[j];
        }
        m.u = u;
        m.theta = var / m.rho;
    }
    return m;
}

MacroFields macroscopic_fields(const KineticState& state, const SpeedLattice& lattice) {
    MacroFields out;
    const auto m = state.cells();
    out.rho.resize(m);
    out.q.resize(m);
    out.u.resize(m);
    out.theta.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const auto c = cell_moments(state.row(i), lattice);
        out.rho[i] = c.rho;
        out.q[i] = c.q;
        out.u[i] = c.u;
        out.theta[i] = c.theta;
    }
    return out;
}

double total_vehicles(const KineticState& state) {
    double total = 0.0;
    for (std::size_t i = 0; i < state.cells(); ++i) {
        total += state.density(i);
    }
    return total;
}

double l1_distance(const KineticState& a, const KineticState& b) {
    const auto x = a.values();
    const auto y = b.values();
    if (x.size() != y.size()) {
        throw DomainError("l1_distance: states have different shapes");
    }
    double d = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        d += std::abs(x[k] - y[k]);
    }
    return d;
}

namespace {

void check_units(const PhysicalUnits& u) {
    if (!(u.cell_length > 0.0) || !(u.max_speed > 0.0) || !(u.max_vehicles > 0.0)) {
        throw InvalidUnits("cell length, max speed and max vehicles must be strictly positive");
    }
}

}  // namespace

double nondimensionalize(const PhysicalUnits& units, double eta_phys) {
    check_units(units);
    if (!(eta_phys > 0.0)) {
        throw InvalidUnits("physical interaction frequency must be strictly positive");
    }
    return units.cell_length * units.max_vehicles / (2.0 * units.max_speed) * eta_phys;
}

double dimensionless_time(const PhysicalUnits& units, double t) {
    check_units(units);
    return units.max_speed / units.cell_length * t;
}

double dimensionless_speed(const PhysicalUnits& units, double v) {
    check_units(units);
    return v / units.max_speed;
}

}  // namespace gk
