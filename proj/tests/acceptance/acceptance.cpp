// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// fails. Runtime limits are part of the criteria where they are stated.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "generators.hpp"
#include "gk/dynamics.hpp"
#include "gk/homogeneous.hpp"
#include "gk/interaction.hpp"
#include "gk/scenarios.hpp"
#include "gk/verify.hpp"

using namespace gk;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_s;  // 0: no runtime limit
    std::function<Outcome()> body;
};

// Steady-state integrations whose density drift feeds criterion 3.
double g_max_drift = 0.0;
std::size_t g_integrations = 0;

void note_drift(const FundamentalDiagram& d) {
    for (const auto& p : d.points) {
        if (p.rho > 0.0) {
            g_max_drift = std::max(g_max_drift, p.max_drift);
            ++g_integrations;
        }
    }
}

Outcome free_flow_plateau() {
    // Through the diagram sweep: at rho = 0.5 the equilibrium is a delta at
    // v_n and needs the warm restart the sweep provides.
    const auto lattice = uniform_speed_lattice(6);
    std::vector<double> grid;
    for (int k = 1; k <= 10; ++k) {
        grid.push_back(0.05 * k);
    }
    const auto d = fundamental_diagram(1.0, grid, lattice, 1.0);
    note_drift(d);
    double worst_u = 0.0;
    double worst_q = 0.0;
    bool converged = true;
    for (const auto& p : d.points) {
        converged = converged && p.converged;
        worst_u = std::max(worst_u, std::abs(p.u.value_or(0.0) - 1.0));
        worst_q = std::max(worst_q, std::abs(p.q - p.rho));
    }
    return {converged && worst_u <= 1e-6 && worst_q <= 1e-6,
            fmt::format("max|u-1|={:.2e} max|q-rho|={:.2e}", worst_u, worst_q)};
}

Outcome critical_density_calibration() {
    const auto lattice = uniform_speed_lattice(6);
    const auto grid = density_grid(0.01);
    std::vector<std::pair<double, double>> rc;
    for (double alpha : {0.3, 0.4, 0.5, 0.61, 0.8, 1.0}) {
        const auto d = fundamental_diagram(alpha, grid, lattice, 1.0);
        note_drift(d);
        rc.emplace_back(alpha, critical_density(d, lattice));
    }
    bool ok = true;
    std::string detail;
    for (const auto& [alpha, r] : rc) {
        bool good = r <= 0.5 + 0.01 + 1e-12;
        if (alpha <= 0.5) {
            good = good && r == 0.0;
        } else if (alpha == 0.61) {
            good = good && r >= 0.12 - 1e-12 && r <= 0.18 + 1e-12;
        } else if (alpha == 1.0) {
            good = good && r >= 0.45 - 1e-12 && r <= 0.55 + 1e-12;
        }
        ok = ok && good;
        detail += fmt::format("{}rc({})={:.2f}{}", detail.empty() ? "" : " ", alpha, r,
                              good ? "" : "!");
    }
    return {ok, detail};
}

Outcome homogeneous_conservation() {
    return {g_integrations > 0 && g_max_drift <= 1e-10,
            fmt::format("{} integrations, max|rho(t)-rho(0)|={:.2e}", g_integrations,
                        g_max_drift)};
}

Outcome invariance() {
    InvarianceOptions o;  // 1000 trials x 200 steps, dt = 0.45 / (1 + 2 eta_bar)
    const auto r = check_invariance(o);
    return {r.passed(), fmt::format("{} trials x {} steps, {} violations", r.trials, r.steps,
                                    r.violations.size())};
}

Outcome mass_balance() {
    const auto rw = build_roadworks(0.4);
    const auto a = check_mass_balance(
        simulate(rw.initial, rw.lattice, rw.bc, rw.profile, 0.15, 150.0), rw.lattice, rw.bc);
    const auto tl = build_traffic_light(5).scenario;
    const auto b = check_mass_balance(
        simulate(tl.initial, tl.lattice, tl.bc, tl.profile, 0.15, 60.0), tl.lattice, tl.bc);
    return {a.passed() && b.passed(),
            fmt::format("roadworks {:.2e}, traffic light {:.2e} (limit {:.0e})", a.max_residual,
                        b.max_residual, a.tolerance)};
}

Outcome table_normalization() {
    double worst = 0.0;
    bool in_range = true;
    for (std::size_t c = 0; c < 10000; ++c) {
        gen::Gen g(6, c);
        const auto n = g.integer(2, 8);
        const auto t = game_table(uniform_speed_lattice(n), g.unit(), g.unit(), g.unit());
        worst = std::max(worst, t.normalization_defect());
        for (std::size_t h = 0; h < n; ++h) {
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t j = 0; j < n; ++j) {
                    in_range = in_range && t(h, k, j) >= 0.0 && t(h, k, j) <= 1.0;
                }
            }
        }
    }
    return {worst <= 1e-12 && in_range,
            fmt::format("10000 tables, max row defect {:.2e}, entries in [0,1]: {}", worst,
                        in_range ? "yes" : "no")};
}

Outcome frozen_queue() {
    TrafficLightOptions frozen;
    frozen.beta = 0.0;
    const auto f = build_traffic_light(frozen).scenario;
    auto s = f.initial;
    bool fixed = true;
    for (int k = 0; k < 1000 && fixed; ++k) {
        const auto next = step(s, f.lattice, f.bc, f.profile, 0.15);
        fixed = std::equal(next.values().begin(), next.values().end(), f.initial.values().begin());
        s = next;
    }

    const auto tl = build_traffic_light(5);
    const auto& m = tl.scenario;
    const double dt = 0.125;
    const auto traj = simulate(m.initial, m.lattice, m.bc, m.profile, dt, tl.gate.green);
    const std::size_t cell = tl.gate.interface;  // I_5, right behind the light
    const double start = traj.states.front().density(cell);
    const double end = traj.states.back().density(cell);
    return {fixed && end < start,
            fmt::format("beta=0 fixed for 1000 steps: {}; beta=1 rho_5 {} -> {:.4f} over green",
                        fixed ? "yes" : "no", start, end)};
}

std::vector<double> peak_density(const Trajectory& t, std::vector<std::size_t>* argmax) {
    std::vector<double> peak;
    for (const auto& s : t.states) {
        const auto rho = s.densities();
        const auto it = std::max_element(rho.begin(), rho.end());  // first on ties
        peak.push_back(*it);
        if (argmax) {
            argmax->push_back(static_cast<std::size_t>(it - rho.begin()));
        }
    }
    return peak;
}

Outcome queue_formation() {
    const double horizon = 150.0;
    const auto var = build_roadworks(0.4, RoadworksAlpha::Ramp);
    const auto ctl = build_roadworks(0.4, RoadworksAlpha::Constant);
    const auto tv = simulate(var.initial, var.lattice, var.bc, var.profile, 0.15, horizon);
    const auto tc = simulate(ctl.initial, ctl.lattice, ctl.bc, ctl.profile, 0.15, horizon);
    std::vector<std::size_t> arg;
    const auto pv = peak_density(tv, &arg);
    const auto pc = peak_density(tc, nullptr);
    bool dominated = true;
    bool strict = false;
    double gap = 0.0;
    for (std::size_t k = 0; k < pv.size(); ++k) {
        dominated = dominated && pv[k] >= pc[k] - 1e-12;
        strict = strict || pv[k] > pc[k] + 1e-12;
        gap = std::max(gap, pv[k] - pc[k]);
    }
    bool backward = true;
    std::size_t from = arg.size();
    for (std::size_t k = 0; k < arg.size(); ++k) {
        if (tv.times[k] >= 2.0 * horizon / 3.0) {
            from = std::min(from, k);
            if (k > from && arg[k] > arg[k - 1]) {
                backward = false;
            }
        }
    }
    return {dominated && strict && backward,
            fmt::format("peak(var) >= peak(ctl) at all times: {}, max gap {:.3f}; argmax cell "
                        "{} -> {} over final third, nonincreasing: {}",
                        dominated ? "yes" : "no", gap, arg[from] + 1, arg.back() + 1,
                        backward ? "yes" : "no")};
}

Outcome convergence_order() {
    RefinementOptions o;  // dt0 = 0.15, 4 levels, T = 150
    const auto r = check_convergence(build_roadworks(0.4), o);
    bool ok = !r.ratios.empty();
    std::string ratios;
    for (double x : r.ratios) {
        ok = ok && x >= 1.7 && x <= 2.3;
        ratios += fmt::format(" {:.3f}", x);
    }
    return {ok, fmt::format("ratios{} (order {:.3f})", ratios, r.order)};
}

Outcome equicontinuity() {
    const auto rw = build_roadworks(0.4);
    const auto a = check_equicontinuity(
        simulate(rw.initial, rw.lattice, rw.bc, rw.profile, 0.15, 150.0), rw.profile, 1000, 1);
    const auto tl = build_traffic_light(5).scenario;
    const auto b = check_equicontinuity(
        simulate(tl.initial, tl.lattice, tl.bc, tl.profile, 0.15, 60.0), tl.profile, 1000, 1);
    return {a.passed() && b.passed(),
            fmt::format("violations {} + {}, worst ratio {:.4f}", a.violations, b.violations,
                        std::max(a.worst_ratio, b.worst_ratio))};
}

Outcome continuous_dependence() {
    const auto sc = build_roadworks(0.4);
    DependenceOptions o;
    o.deltas = {1e-2, 1e-3, 1e-4, 0.0};
    const auto r = check_continuous_dependence(sc, o);
    bool ok = r.entries.size() == 4 && r.entries[3].solution_gap == 0.0;
    std::string ratios;
    for (std::size_t k = 0; k + 1 < 3; ++k) {
        const double q = r.entries[k].solution_gap / r.entries[k + 1].solution_gap;
        ok = ok && q >= 5.0 && q <= 20.0;
        ratios += fmt::format(" {:.2f}", q);
    }
    return {ok, fmt::format("gap ratios{}, gap(delta=0)={}, K={:.4f}", ratios,
                            r.entries[3].solution_gap, r.fitted_constant)};
}

Outcome nonlocal_consistency() {
    std::size_t equal = 0;
    for (std::size_t c = 0; c < 100; ++c) {
        gen::Gen g(12, c);
        const auto n = g.integer(2, 8);
        const auto m = g.integer(1, 12);
        const auto s = g.state(m, n);
        const auto profile = g.profile(m);
        std::vector<double> phi(m);
        for (auto& p : phi) {
            p = g.unit();
        }
        const auto lattice = uniform_speed_lattice(n);
        if (interaction_operator(s, lattice, profile, phi) ==
            interaction_operator_nonlocal(s, lattice, NonlocalWeights::local(m), profile, phi)) {
            ++equal;
        }
    }
    return {equal == 100, fmt::format("{}/100 states bit-identical", equal)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "free-flow plateau", 60, free_flow_plateau},
        {2, "critical density calibration", 300, critical_density_calibration},
        {3, "homogeneous conservation", 0, homogeneous_conservation},
        {4, "invariance of the admissible set", 60, invariance},
        {5, "discrete mass balance", 0, mass_balance},
        {6, "game table normalization", 0, table_normalization},
        {7, "frozen queue", 0, frozen_queue},
        {8, "queue formation", 0, queue_formation},
        {9, "convergence order", 120, convergence_order},
        {10, "equicontinuity", 0, equicontinuity},
        {11, "continuous dependence", 0, continuous_dependence},
        {12, "nonlocal consistency", 0, nonlocal_consistency},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.body();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = c.limit_s == 0 || secs < c.limit_s;
        const bool ok = out.ok && in_time;
        failed += ok ? 0 : 1;
        const std::string limit =
            c.limit_s == 0 ? "" : fmt::format(" < {:.0f}s{}", c.limit_s, in_time ? "" : " exceeded");
        std::printf("%s %2d %s: %s [%.1fs%s]\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    out.detail.c_str(), secs, limit.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
