#include "gk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gk/errors.hpp"
#include "gk/parallel.hpp"

namespace gk {

namespace {

// Independent stream per (seed, index): results do not depend on how work
// is spread over threads.
std::mt19937_64 stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::vector<double> random_distribution(std::size_t n, double rho, std::mt19937_64& rng) {
    std::vector<double> w(n);
    for (auto& x : w) {
        x = uniform(rng, 0.0, 1.0);
    }
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    for (auto& x : w) {
        x = total > 0.0 ? rho * x / total : 0.0;
    }
    return w;
}

double sup_distance(std::span<const double> a, std::span<const double> b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        d = std::max(d, std::abs(a[k] - b[k]));
    }
    return d;
}

// Random but admissible boundary data: constant or oscillating inflow, the
// derived or a prescribed left limiter, a time-dependent right limiter and
// occasionally a gate.
BoundarySpec random_boundary(std::size_t cells, std::size_t classes, std::mt19937_64& rng) {
    BoundarySpec bc;
    const double rho_in = uniform(rng, 0.0, 1.0);
    const auto shape = random_distribution(classes, rho_in, rng);
    if (uniform(rng, 0.0, 1.0) < 0.5) {
        bc.inflow = [shape](double) { return shape; };
    } else {
        const double omega = uniform(rng, 0.1, 2.0);
        bc.inflow = [shape, omega](double t) {
            auto f = shape;
            const double s = 0.5 + 0.5 * std::sin(omega * t);
            for (auto& x : f) {
                x *= s;
            }
            return f;
        };
    }
    if (uniform(rng, 0.0, 1.0) < 0.5) {
        // A prescribed left limiter still has to respect the free room in
        // the first cell, so it is a fraction of the derived one.
        const double c = uniform(rng, 0.0, 1.0);
        bc.left_limiter = [c](const BoundaryContext& ctx) {
            return c * flux_limiter(ctx.rho_inflow, ctx.rho_first);
        };
    }
    const double base = uniform(rng, 0.0, 1.0);
    const double omega = uniform(rng, 0.1, 2.0);
    bc.right_limiter = [base, omega](double t) {
        return base * (0.5 + 0.5 * std::cos(omega * t));
    };
    if (cells >= 3 && uniform(rng, 0.0, 1.0) < 0.3) {
        GateSchedule gate;
        gate.interface = std::uniform_int_distribution<std::size_t>(0, cells - 3)(rng);
        gate.period = uniform(rng, 1.0, 20.0);
        gate.green = uniform(rng, 0.0, gate.period);
        bc.gates.push_back(gate.as_override());
    }
    return bc;
}

void scan_state(const KineticState& s, std::size_t trial, std::size_t step, double slack,
                InvarianceReport& report) {
    auto flag = [&](std::size_t i, std::size_t j, double v, double excess, const char* what) {
        report.max_excess = std::max(report.max_excess, excess);
        if (excess > slack) {
            report.violations.push_back({trial, step, i, j, v, what});
        }
    };
    for (std::size_t i = 0; i < s.cells(); ++i) {
        for (std::size_t j = 0; j < s.classes(); ++j) {
            const double v = s(i, j);
            if (!std::isfinite(v)) {
                report.violations.push_back({trial, step, i, j, v, "non-finite value"});
                continue;
            }
            flag(i, j, v, -v, "f below 0");
            flag(i, j, v, v - 1.0, "f above 1");
        }
        const double rho = s.density(i);
        flag(i, s.classes(), rho, rho - 1.0, "density above 1");
    }
}

struct FluxRun {
    std::vector<KineticState> states;
    std::vector<StepFlux> fluxes;
};

FluxRun run_recording_flux(const KineticState& initial, const SpeedLattice& lattice,
                           const BoundarySpec& bc, const EnvironmentProfile& profile, double dt,
                           std::size_t steps) {
    FluxRun out;
    out.states.reserve(steps + 1);
    out.fluxes.reserve(steps);
    out.states.push_back(initial);
    const double t0 = initial.time();
    for (std::size_t k = 1; k <= steps; ++k) {
        auto r = advance(out.states.back(), lattice, bc, profile, dt);
        r.state.set_time(t0 + static_cast<double>(k) * dt);
        out.states.push_back(std::move(r.state));
        out.fluxes.push_back(std::move(r.flux));
    }
    return out;
}

}  // namespace

KineticState random_admissible_state(std::size_t cells, std::size_t classes, std::mt19937_64& rng) {
    KineticState s(cells, classes);
    for (std::size_t i = 0; i < cells; ++i) {
        // A fifth of the cells sit on a face of B.
        const double u = uniform(rng, 0.0, 1.0);
        const double rho = u < 0.1 ? 0.0 : (u < 0.2 ? 1.0 : uniform(rng, 0.0, 1.0));
        const auto row = random_distribution(classes, rho, rng);
        std::copy(row.begin(), row.end(), s.row(i).begin());
    }
    return s;
}

InvarianceReport check_invariance(const InvarianceOptions& o) {
    if (!(o.dt_factor > 0.0 && o.dt_factor < 1.0)) {
        throw StabilityError("invariance needs dt < 1/(1+2 eta_bar); dt_factor " +
                             std::to_string(o.dt_factor) + " is outside (0,1)");
    }
    if (o.cells == 0 || o.min_classes < 2 || o.max_classes < o.min_classes) {
        throw ConfigurationError("invariance trials need cells >= 1 and 2 <= min_classes <= max_classes");
    }

    std::vector<InvarianceReport> per_trial(o.trials);
    parallel_for(o.trials, o.jobs, [&](std::size_t trial) {
        auto rng = stream(o.seed, trial);
        const auto n = std::uniform_int_distribution<std::size_t>(o.min_classes, o.max_classes)(rng);
        const auto lattice = uniform_speed_lattice(n);
        EnvironmentProfile profile;
        profile.alpha.resize(o.cells);
        for (auto& a : profile.alpha) {
            a = uniform(rng, o.alpha_min, o.alpha_max);
        }
        profile.beta = uniform(rng, o.beta_min, o.beta_max);
        profile.eta0 = uniform(rng, o.eta0_min, o.eta0_max);
        const auto bc = random_boundary(o.cells, n, rng);
        const double dt = o.dt_factor * max_stable_dt(profile);

        auto& report = per_trial[trial];
        KineticState state = random_admissible_state(o.cells, n, rng);
        scan_state(state, trial, 0, o.slack, report);
        for (std::size_t k = 1; k <= o.steps && report.violations.empty(); ++k) {
            try {
                state = step(state, lattice, bc, profile, dt);
            } catch (const Error& e) {
                report.violations.push_back({trial, k, 0, 0, 0.0, e.what()});
                break;
            }
            scan_state(state, trial, k, o.slack, report);
        }
    });

    InvarianceReport out;
    out.trials = o.trials;
    out.steps = o.steps;
    for (auto& r : per_trial) {
        out.max_excess = std::max(out.max_excess, r.max_excess);
        out.violations.insert(out.violations.end(), r.violations.begin(), r.violations.end());
    }
    return out;
}

MassBalanceReport check_mass_balance(const Trajectory& traj, const SpeedLattice& lattice,
                                     const BoundarySpec& bc) {
    if (traj.stride != 1) {
        throw DomainError("mass balance needs every iterate (stride 1)");
    }
    MassBalanceReport out;
    if (traj.states.empty()) {
        return out;
    }
    const std::size_t m = traj.states.front().cells();
    const std::size_t n = traj.states.front().classes();
    out.tolerance = 1e-12 * static_cast<double>(m * n);
    for (std::size_t k = 0; k + 1 < traj.states.size(); ++k) {
        const auto& s = traj.states[k];
        const auto boundary = evaluate_boundary(bc, s);
        const auto phi = interface_limiters(s, bc, boundary);
        double in = 0.0;
        double outflow = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            in += lattice[j] * boundary.inflow[j];
            outflow += lattice[j] * s(m - 1, j);
        }
        const double expected = traj.dt * (phi[0] * in - phi[m] * outflow);
        const double actual = total_vehicles(traj.states[k + 1]) - total_vehicles(s);
        out.max_residual = std::max(out.max_residual, std::abs(actual - expected));
        ++out.steps;
    }
    return out;
}

EquicontinuityReport check_equicontinuity(const Trajectory& traj, const EnvironmentProfile& profile,
                                          std::size_t pairs, std::uint64_t seed) {
    EquicontinuityReport out;
    if (traj.states.size() < 2) {
        return out;
    }
    const auto& first = traj.states.front();
    const double mn = static_cast<double>(first.cells() * first.classes());
    const double rate = 2.0 * (1.0 + profile.eta_bar());
    auto rng = stream(seed, 0);
    const double t0 = traj.times.front();
    const double t1 = traj.times.back();
    for (std::size_t p = 0; p < pairs; ++p) {
        const double a = uniform(rng, t0, t1);
        const double b = uniform(rng, t0, t1);
        if (a == b) {
            continue;
        }
        const auto fa = interpolate(traj, a);
        const auto fb = interpolate(traj, b);
        const double gap = std::abs(b - a);
        const double l1 = l1_distance(fa, fb);
        const double sup = sup_distance(fa.values(), fb.values());
        const double ratio = l1 / (mn * rate * gap);
        const double component = sup / (rate * gap);
        out.worst_ratio = std::max(out.worst_ratio, ratio);
        out.worst_component_ratio = std::max(out.worst_component_ratio, component);
        if (ratio > 1.0 || component > 1.0) {
            ++out.violations;
        }
        ++out.pairs;
    }
    return out;
}

bool RefinementReport::monotone() const noexcept {
    for (std::size_t k = 0; k + 1 < successive.size(); ++k) {
        if (!(successive[k + 1] < successive[k])) {
            return false;
        }
    }
    return true;
}

RefinementReport check_convergence(const Scenario& sc, const RefinementOptions& o) {
    if (o.levels < 3) {
        throw DomainError("convergence check needs at least 3 levels");
    }
    const std::size_t base_steps = step_count(o.dt0, o.horizon);

    RefinementReport out;
    std::vector<std::vector<KineticState>> runs(o.levels);
    for (std::size_t l = 0; l < o.levels; ++l) {
        out.dts.push_back(o.dt0 / static_cast<double>(std::size_t{1} << l));
    }
    parallel_for(o.levels, o.jobs, [&](std::size_t l) {
        const std::size_t steps = base_steps << l;
        runs[l] = run_recording_flux(sc.initial, sc.lattice, sc.bc, sc.profile, out.dts[l], steps)
                      .states;
    });

    // Coarse level c evaluated at fine index k of level f > c: the
    // interpolant between coarse iterates, with exact rational weights.
    auto distance = [&](std::size_t coarse, std::size_t fine) {
        const std::size_t r = std::size_t{1} << (fine - coarse);
        const auto& c = runs[coarse];
        const auto& f = runs[fine];
        std::vector<double> buf(f.front().values().size());
        double d = 0.0;
        for (std::size_t k = 0; k < f.size(); ++k) {
            const std::size_t lo = k / r;
            const std::size_t rem = k % r;
            if (rem == 0) {
                d = std::max(d, sup_distance(c[lo].values(), f[k].values()));
                continue;
            }
            const double w = static_cast<double>(rem) / static_cast<double>(r);
            const auto a = c[lo].values();
            const auto b = c[lo + 1].values();
            for (std::size_t q = 0; q < buf.size(); ++q) {
                buf[q] = (1.0 - w) * a[q] + w * b[q];
            }
            d = std::max(d, sup_distance(buf, f[k].values()));
        }
        return d;
    };

    for (std::size_t l = 0; l + 1 < o.levels; ++l) {
        out.successive.push_back(distance(l, l + 1));
        out.to_finest.push_back(distance(l, o.levels - 1));
    }
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < out.successive.size(); ++k) {
        const double r = out.successive[k] / out.successive[k + 1];
        out.ratios.push_back(r);
        sum += r;
    }
    out.order = std::log2(sum / static_cast<double>(out.ratios.size()));
    return out;
}

DependenceReport check_continuous_dependence(const Scenario& sc, const DependenceOptions& o) {
    const std::size_t steps = step_count(o.dt, o.horizon);
    const auto base = run_recording_flux(sc.initial, sc.lattice, sc.bc, sc.profile, o.dt, steps);

    auto rng = stream(o.seed, 0);
    const auto target = random_admissible_state(sc.initial.cells(), sc.initial.classes(), rng);

    DependenceReport out;
    out.entries.resize(o.deltas.size());
    parallel_for(o.deltas.size(), o.jobs, [&](std::size_t k) {
        const double delta = o.deltas[k];
        if (!(delta >= 0.0 && delta <= 1.0)) {
            throw DomainError("perturbation sizes must lie in [0,1]");
        }
        auto& e = out.entries[k];
        e.delta = delta;

        KineticState g0 = sc.initial;
        BoundarySpec bc = sc.bc;
        if (o.boundary) {
            bc.left_limiter = [inner = sc.bc.left_limiter, delta](const BoundaryContext& ctx) {
                const double phi = inner ? inner(ctx) : flux_limiter(ctx.rho_inflow, ctx.rho_first);
                return std::max(0.0, phi - delta);
            };
        } else {
            auto dst = g0.values();
            const auto src = target.values();
            for (std::size_t q = 0; q < dst.size(); ++q) {
                dst[q] = (1.0 - delta) * dst[q] + delta * src[q];
            }
        }
        e.initial_gap = l1_distance(sc.initial, g0);

        const auto run = run_recording_flux(g0, sc.lattice, bc, sc.profile, o.dt, steps);
        for (std::size_t s = 0; s < steps; ++s) {
            const auto& fa = base.fluxes[s];
            const auto& fb = run.fluxes[s];
            double inflow_gap = 0.0;
            for (std::size_t j = 0; j < fa.inflow.size(); ++j) {
                inflow_gap += std::abs(fa.inflow[j] - fb.inflow[j]);
            }
            e.boundary_gap += o.dt * (std::abs(fa.phi_left - fb.phi_left) + inflow_gap);
        }
        for (std::size_t s = 0; s <= steps; ++s) {
            e.solution_gap =
                std::max(e.solution_gap, sup_distance(base.states[s].values(), run.states[s].values()));
        }
    });

    for (std::size_t k = 0; k + 1 < out.entries.size(); ++k) {
        out.ratios.push_back(out.entries[k].solution_gap / out.entries[k + 1].solution_gap);
    }
    for (const auto& e : out.entries) {
        const double data = e.initial_gap + e.boundary_gap;
        if (e.delta > 0.0 && data > 0.0) {
            out.fitted_constant = std::max(out.fitted_constant, e.solution_gap / data);
        }
    }
    return out;
}

}  // namespace gk
