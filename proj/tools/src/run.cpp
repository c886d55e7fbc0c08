#include "gk/cli/run.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "gk/cli/csv.hpp"
#include "gk/homogeneous.hpp"
#include "gk/verify.hpp"

#ifndef GK_VERSION
#define GK_VERSION "unknown"
#endif

namespace gk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string scenario_name(ScenarioKind kind) {
    return kind == ScenarioKind::Roadworks ? "roadworks" : "traffic_light";
}

std::string alpha_profile_name(RoadworksAlpha a) {
    switch (a) {
        case RoadworksAlpha::Ramp: return "ramp";
        case RoadworksAlpha::Constant: return "constant";
        case RoadworksAlpha::Literal: return "literal";
    }
    return "?";
}

json echo(const RunConfig& c, Command command) {
    json scenario = {{"name", scenario_name(c.scenario.kind)}};
    if (c.scenario.kind == ScenarioKind::Roadworks) {
        scenario["rho0"] = c.scenario.rho0;
        scenario["alpha_profile"] = alpha_profile_name(c.scenario.alpha_profile);
    } else {
        const auto& l = c.scenario.light;
        scenario["queue_cells"] = l.queue_cells;
        scenario["alpha"] = l.alpha;
        scenario["beta"] = l.beta;
        scenario["eta0"] = l.eta0;
        scenario["gate"] = {{"interface", l.gate.interface},
                            {"period", l.gate.period},
                            {"green", l.gate.green}};
    }
    json checks = json::array();
    for (auto ch : c.verify.checks) {
        checks.push_back(to_string(ch));
    }
    return {
        {"command", to_string(command)},
        {"seed", c.seed},
        {"output", c.output},
        {"model", {{"classes", c.model.classes}, {"eta0", c.model.eta0}}},
        {"scenario", scenario},
        {"dynamics",
         {{"dt", c.dynamics.dt ? json(*c.dynamics.dt) : json(nullptr)},
          {"horizon", c.dynamics.horizon},
          {"stride", c.dynamics.stride}}},
        {"diagram",
         {{"alpha", c.diagram.alpha},
          {"rho_step", c.diagram.rho_step},
          {"rho", c.diagram.rho},
          {"tol", c.diagram.tol},
          {"max_steps", c.diagram.max_steps}}},
        {"verify",
         {{"checks", checks},
          {"trials", c.verify.trials},
          {"steps", c.verify.steps},
          {"pairs", c.verify.pairs},
          {"levels", c.verify.levels},
          {"deltas", c.verify.deltas},
          {"boundary", c.verify.boundary},
          {"slack", c.verify.slack}}},
    };
}

class Output {
public:
    Output(const std::string& dir, RunResult& result) : dir_(dir), result_(result) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) {
            throw Error("cannot create output directory '" + dir + "': " + ec.message());
        }
    }

    CsvWriter csv(const std::string& name, const std::vector<std::string>& header) {
        result_.files.push_back(name);
        spdlog::info("writing {}", (dir_ / name).string());
        return CsvWriter((dir_ / name).string(), header);
    }

    void text(const std::string& name, const std::vector<std::string>& lines) {
        result_.files.push_back(name);
        std::ofstream out(dir_ / name);
        for (const auto& l : lines) {
            out << l << '\n';
        }
    }

    fs::path path(const std::string& name) const { return dir_ / name; }

private:
    fs::path dir_;
    RunResult& result_;
};

void run_diagram(const RunConfig& cfg, std::size_t jobs, Output& out, RunResult& result) {
    const auto lattice = uniform_speed_lattice(cfg.model.classes);
    const auto grid = cfg.diagram.rho.empty() ? density_grid(cfg.diagram.rho_step) : cfg.diagram.rho;
    SteadyStateOptions opts;
    opts.tol = cfg.diagram.tol;
    opts.max_steps = cfg.diagram.max_steps;

    auto summary = out.csv("diagram_summary.csv", {"alpha", "rho_c", "points", "nonconverged"});
    for (double alpha : cfg.diagram.alpha) {
        spdlog::info("diagram alpha={} over {} densities", alpha, grid.size());
        const auto diagram = fundamental_diagram(alpha, grid, lattice, cfg.model.eta0, opts, jobs);
        auto csv = out.csv(fmt::format("diagram_alpha_{}.csv", alpha), {"rho", "q", "u", "theta"});
        std::size_t failed = 0;
        for (const auto& pt : diagram.points) {
            if (pt.converged) {
                csv.row({format_number(pt.rho), format_number(pt.q), format_number(pt.u),
                         format_number(pt.theta)});
            } else {
                ++failed;
                spdlog::error("alpha={} rho={}: no steady state (residual {:.3g})", alpha, pt.rho,
                              pt.residual);
                csv.row({format_number(pt.rho), "", "", ""});
            }
        }
        const double rho_c = critical_density(diagram, lattice, opts);
        summary.row({format_number(alpha), format_number(rho_c), std::to_string(grid.size()),
                     std::to_string(failed)});
        result.summary.push_back(fmt::format("alpha={} rho_c={} nonconverged={}", alpha, rho_c,
                                             failed));
        if (failed > 0) {
            result.exit_code = kExitConvergence;
        }
    }
}

void run_simulate(const RunConfig& cfg, Output& out, RunResult& result) {
    const auto sc = make_scenario(cfg.scenario);
    const double dt = resolve_dt(cfg.dynamics, sc.profile);
    spdlog::info("simulate {} dt={} horizon={}", scenario_name(cfg.scenario.kind), dt,
                 cfg.dynamics.horizon);
    const auto traj =
        simulate(sc.initial, sc.lattice, sc.bc, sc.profile, dt, cfg.dynamics.horizon, cfg.dynamics.stride);

    auto csv = out.csv(fmt::format("simulate_{}.csv", scenario_name(cfg.scenario.kind)),
                       {"t", "cell", "rho", "q", "u", "theta"});
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        const auto fields = macroscopic_fields(traj.states[k], sc.lattice);
        for (std::size_t i = 0; i < fields.rho.size(); ++i) {
            csv.row({format_number(traj.times[k]), std::to_string(i), format_number(fields.rho[i]),
                     format_number(fields.q[i]), format_number(fields.u[i]),
                     format_number(fields.theta[i])});
        }
    }
    result.summary.push_back(fmt::format("snapshots={} final_mass={}", traj.states.size(),
                                         total_vehicles(traj.states.back())));
}

std::string verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

void run_verify(const RunConfig& cfg, std::size_t jobs, Output& out, RunResult& result) {
    const auto sc = make_scenario(cfg.scenario);
    const double dt = resolve_dt(cfg.dynamics, sc.profile);
    const auto& vc = cfg.verify;
    std::vector<std::string> lines;
    bool all_ok = true;
    auto report = [&](Check check, bool ok, const std::string& detail) {
        all_ok = all_ok && ok;
        lines.push_back(fmt::format("{} {} {}", to_string(check), verdict(ok), detail));
        spdlog::log(ok ? spdlog::level::info : spdlog::level::err, "{}: {}", to_string(check),
                    detail);
    };

    std::optional<Trajectory> traj;
    auto trajectory = [&]() -> const Trajectory& {
        if (!traj) {
            traj = simulate(sc.initial, sc.lattice, sc.bc, sc.profile, dt, cfg.dynamics.horizon);
        }
        return *traj;
    };

    for (auto check : vc.checks) {
        switch (check) {
            case Check::Invariance: {
                InvarianceOptions o;
                o.trials = vc.trials;
                o.steps = vc.steps;
                o.slack = vc.slack;
                o.seed = cfg.seed;
                o.jobs = jobs;
                const auto r = check_invariance(o);
                auto csv = out.csv("verify_invariance.csv",
                                   {"trial", "step", "cell", "class", "value", "violation"});
                for (const auto& v : r.violations) {
                    csv.row({std::to_string(v.trial), std::to_string(v.step), std::to_string(v.cell),
                             std::to_string(v.cls), format_number(v.value), v.what});
                }
                report(check, r.passed(),
                       fmt::format("trials={} steps={} violations={} max_excess={:.3g}", r.trials,
                                   r.steps, r.violations.size(), r.max_excess));
                break;
            }
            case Check::MassBalance: {
                const auto r = check_mass_balance(trajectory(), sc.lattice, sc.bc);
                auto csv = out.csv("verify_mass_balance.csv", {"steps", "max_residual", "tolerance"});
                csv.row({std::to_string(r.steps), format_number(r.max_residual),
                         format_number(r.tolerance)});
                report(check, r.passed(),
                       fmt::format("steps={} max_residual={:.3g} tolerance={:.3g}", r.steps,
                                   r.max_residual, r.tolerance));
                break;
            }
            case Check::Equicontinuity: {
                const auto r = check_equicontinuity(trajectory(), sc.profile, vc.pairs, cfg.seed);
                auto csv = out.csv("verify_equicontinuity.csv",
                                   {"pairs", "violations", "worst_ratio", "worst_component_ratio"});
                csv.row({std::to_string(r.pairs), std::to_string(r.violations),
                         format_number(r.worst_ratio), format_number(r.worst_component_ratio)});
                report(check, r.passed(),
                       fmt::format("pairs={} violations={} worst_ratio={:.3g}", r.pairs,
                                   r.violations, r.worst_ratio));
                break;
            }
            case Check::Convergence: {
                RefinementOptions o;
                o.dt0 = dt;
                o.levels = vc.levels;
                o.horizon = cfg.dynamics.horizon;
                o.jobs = jobs;
                const auto r = check_convergence(sc, o);
                auto csv = out.csv("verify_convergence.csv",
                                   {"level", "dt", "successive", "ratio", "to_finest"});
                for (std::size_t l = 0; l < r.successive.size(); ++l) {
                    csv.row({std::to_string(l), format_number(r.dts[l]),
                             format_number(r.successive[l]),
                             l < r.ratios.size() ? format_number(r.ratios[l]) : "",
                             format_number(r.to_finest[l])});
                }
                report(check, r.monotone(), fmt::format("order={:.3f}", r.order));
                break;
            }
            case Check::Dependence: {
                DependenceOptions o;
                o.deltas = vc.deltas;
                o.horizon = cfg.dynamics.horizon;
                o.dt = dt;
                o.boundary = vc.boundary;
                o.seed = cfg.seed;
                o.jobs = jobs;
                const auto r = check_continuous_dependence(sc, o);
                auto csv = out.csv("verify_dependence.csv",
                                   {"delta", "initial_gap", "boundary_gap", "solution_gap"});
                bool ok = std::isfinite(r.fitted_constant);
                for (std::size_t k = 0; k < r.entries.size(); ++k) {
                    const auto& e = r.entries[k];
                    csv.row({format_number(e.delta), format_number(e.initial_gap),
                             format_number(e.boundary_gap), format_number(e.solution_gap)});
                    if (e.delta == 0.0 && e.solution_gap != 0.0) {
                        ok = false;
                    }
                    if (k + 1 < r.entries.size()) {
                        const auto& next = r.entries[k + 1];
                        if (next.delta < e.delta && !(next.solution_gap < e.solution_gap)) {
                            ok = false;
                        }
                    }
                }
                report(check, ok, fmt::format("fitted_constant={:.4g}", r.fitted_constant));
                break;
            }
        }
    }
    out.text("verify_summary.txt", lines);
    result.summary.insert(result.summary.end(), lines.begin(), lines.end());
    if (!all_ok) {
        result.exit_code = kExitVerification;
    }
}

}  // namespace

RunResult run(const RunConfig& config, Command command, std::size_t jobs) {
    const auto start = std::chrono::steady_clock::now();
    RunResult result;
    Output out(config.output, result);
    switch (command) {
        case Command::Diagram: run_diagram(config, jobs, out, result); break;
        case Command::Simulate: run_simulate(config, out, result); break;
        case Command::Verify: run_verify(config, jobs, out, result); break;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    json manifest = {
        {"config", echo(config, command)},
        {"jobs", jobs},
        {"versions",
         {{"granular-kinetics", GK_VERSION},
          {"fmt", FMT_VERSION},
          {"spdlog", fmt::format("{}.{}.{}", SPDLOG_VER_MAJOR, SPDLOG_VER_MINOR, SPDLOG_VER_PATCH)}}},
        {"files", result.files},
        {"summary", result.summary},
        {"exit_code", result.exit_code},
        {"wall_time_s", wall},
    };
    std::ofstream(out.path("manifest.json")) << manifest.dump(2) << '\n';
    return result;
}

void configure_logging() {
    if (!spdlog::get("gk")) {
        spdlog::set_default_logger(spdlog::stderr_color_mt("gk"));
    }
    spdlog::set_pattern("[%l] %v");
    const char* env = std::getenv("GK_LOG");
    const std::string level = env ? env : "error";
    if (level == "error") {
        spdlog::set_level(spdlog::level::err);
    } else if (level == "info") {
        spdlog::set_level(spdlog::level::info);
    } else if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else {
        spdlog::set_level(spdlog::level::info);
        spdlog::warn("GK_LOG='{}' is not one of error, info, debug; using info", level);
    }
}

}  // namespace gk::cli
