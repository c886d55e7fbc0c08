#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "generators.hpp"
#include "gk/cli/config.hpp"
#include "gk/cli/csv.hpp"
#include "gk/cli/run.hpp"

using namespace gk;
using namespace gk::cli;
namespace fs = std::filesystem;

namespace {

const bool quiet = (configure_logging(), true);

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "gk_cli_tests" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ConfigError config_error(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e;
    }
    ADD_FAILURE() << "no error for:\n" << text;
    return ConfigError("none");
}

}  // namespace

TEST(Config, MinimalDiagramDefaults) {
    const auto c = parse_config("command: diagram\ndiagram:\n  alpha: [1.0]\n");
    ASSERT_TRUE(c.command.has_value());
    EXPECT_EQ(*c.command, Command::Diagram);
    EXPECT_EQ(c.model.classes, 6u);
    EXPECT_EQ(c.model.eta0, 1.0);
    EXPECT_EQ(c.diagram.alpha, std::vector<double>{1.0});
    EXPECT_EQ(c.diagram.rho_step, 0.01);
    EXPECT_TRUE(c.diagram.rho.empty());
    EXPECT_EQ(c.seed, 1u);
}

TEST(Config, BetaOutOfRange) {
    const auto e = config_error(
        "command: simulate\nscenario:\n  name: traffic_light\n  beta: 1.5\n");
    const std::string msg = e.what();
    EXPECT_NE(msg.find("beta"), std::string::npos) << msg;
    EXPECT_NE(msg.find("[0,1]"), std::string::npos) << msg;
    EXPECT_EQ(e.line(), 4);
}

TEST(Config, UnknownKeysAreRejected) {
    EXPECT_NE(std::string(config_error("comand: diagram\n").what()).find("comand"),
              std::string::npos);
    EXPECT_NE(std::string(config_error("model:\n  clases: 4\n").what()).find("clases"),
              std::string::npos);
    // Keys of the other scenario are not silently ignored.
    config_error("scenario:\n  name: roadworks\n  queue_cells: 3\n");
}

TEST(Config, SyntaxErrorHasLocation) {
    const auto e = config_error("command: diagram\ndiagram:\n  alpha: [1.0, 0.5\n");
    EXPECT_GT(e.line(), 0);
    EXPECT_GT(e.column(), 0);
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos);
}

TEST(Config, DynamicsChecks) {
    config_error("dynamics:\n  dt: 0.5\n");           // above 1/(1+2 eta_bar)
    config_error("dynamics:\n  dt: 0.15\n  horizon: 1\n");  // not a multiple
    config_error("dynamics:\n  stride: 0\n");
    const auto c = parse_config("dynamics:\n  dt: 0.1\n  horizon: 1\n");
    EXPECT_EQ(*c.dynamics.dt, 0.1);
}

TEST(Config, RoadworksRoundTrip) {
    const auto c = load_config(GK_SOURCE_DIR "/configs/roadworks.yaml");
    const auto sc = make_scenario(c.scenario);
    const auto ref = build_roadworks(0.4);
    EXPECT_EQ(sc.initial.cells(), 10u);
    EXPECT_EQ(sc.lattice.size(), 6u);
    EXPECT_EQ(sc.profile.alpha, ref.profile.alpha);
    EXPECT_EQ(sc.profile.beta, 0.0);
    EXPECT_EQ(sc.profile.eta0, 1.0);
    EXPECT_EQ(sc.bc.inflow(0.0), ref.bc.inflow(0.0));
    EXPECT_EQ(resolve_dt(c.dynamics, sc.profile), 0.15);
}

TEST(Config, ShippedConfigsParse) {
    for (const auto* name : {"diagram", "roadworks", "traffic_light", "verify"}) {
        EXPECT_NO_THROW(load_config(std::string(GK_SOURCE_DIR "/configs/") + name + ".yaml"))
            << name;
    }
}

TEST(Csv, NumbersRoundTripBitwise) {
    gen::for_all(61, 2000, [](gen::Gen& g, std::size_t) {
        double x = g.uniform(-1.0, 1.0) * std::pow(10.0, g.uniform(-300.0, 300.0));
        if (g.coin(0.1)) {
            x = 0.0;
        }
        const auto table = parse_csv("x,y\n" + format_number(x) + ",\n");
        const auto back = table.number(0, "x");
        ASSERT_TRUE(back.has_value());
        EXPECT_EQ(std::memcmp(&x, &*back, sizeof x), 0) << format_number(x);
        EXPECT_FALSE(table.number(0, "y").has_value());
    });
}

TEST(Csv, QuotedFields) {
    const auto dir = scratch("quoted");
    fs::create_directories(dir);
    {
        CsvWriter w((dir / "q.csv").string(), {"name", "value"});
        w.row({"plain", "1"});
        w.row({"with, comma", "2"});
        w.row({"say \"hi\"", "3"});
    }
    const auto t = read_csv((dir / "q.csv").string());
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.rows[1][0], "with, comma");
    EXPECT_EQ(t.rows[2][0], "say \"hi\"");
    EXPECT_EQ(*t.number(2, "value"), 3.0);
}

TEST(Run, DiagramPerAlphaFiles) {
    auto c = parse_config(
        "command: diagram\ndiagram:\n  alpha: [0.5, 0.61, 1.0]\n  rho: [0, 0.2, 0.6]\n");
    c.output = scratch("diagram").string();
    const auto r = run(c, Command::Diagram);
    EXPECT_EQ(r.exit_code, kExitOk);
    for (const auto* a : {"0.5", "0.61", "1"}) {
        const auto t = read_csv(c.output + "/diagram_alpha_" + a + ".csv");
        EXPECT_EQ(t.header, (std::vector<std::string>{"rho", "q", "u", "theta"}));
        ASSERT_EQ(t.rows.size(), 3u);
        EXPECT_EQ(*t.number(1, "rho"), 0.2);
        EXPECT_FALSE(t.number(0, "u").has_value());
    }
    EXPECT_TRUE(fs::exists(c.output + "/manifest.json"));
    EXPECT_TRUE(fs::exists(c.output + "/diagram_summary.csv"));
}

TEST(Run, TrafficLightSnapshots) {
    auto c = parse_config(
        "command: simulate\nscenario:\n  name: traffic_light\ndynamics:\n  horizon: 3\n"
        "  dt: 0.1\n  stride: 10\n");
    c.output = scratch("light").string();
    ASSERT_EQ(run(c, Command::Simulate).exit_code, kExitOk);
    const auto t = read_csv(c.output + "/simulate_traffic_light.csv");
    EXPECT_EQ(t.header, (std::vector<std::string>{"t", "cell", "rho", "q", "u", "theta"}));
    // snapshots at t = 0, 1, 2, 3, ten cells each
    ASSERT_EQ(t.rows.size(), 40u);
    EXPECT_EQ(*t.number(4, "rho"), 1.0);
    EXPECT_NEAR(*t.number(39, "t"), 3.0, 1e-12);
}

TEST(Run, Deterministic) {
    auto c = parse_config(
        "command: simulate\nscenario:\n  name: roadworks\ndynamics:\n  horizon: 15\n  stride: 5\n");
    const auto da = scratch("det_a");
    const auto db = scratch("det_b");
    c.output = da.string();
    run(c, Command::Simulate);
    c.output = db.string();
    run(c, Command::Simulate);
    const auto a = slurp(da / "simulate_roadworks.csv");
    const auto b = slurp(db / "simulate_roadworks.csv");
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(a, b);
}

TEST(Run, FailingVerificationExitsWithThree) {
    auto c = parse_config(
        "command: verify\nverify:\n  checks: [invariance]\n  trials: 5\n  steps: 5\n"
        "  slack: -0.5\n");
    c.output = scratch("fail").string();
    const auto r = run(c, Command::Verify);
    EXPECT_EQ(r.exit_code, kExitVerification);
    const auto t = read_csv(c.output + "/verify_invariance.csv");
    EXPECT_GT(t.rows.size(), 0u);
    EXPECT_NE(slurp(c.output + "/verify_summary.txt").find("invariance FAIL"), std::string::npos);
}

TEST(Run, PassingVerification) {
    auto c = parse_config(
        "command: verify\ndynamics:\n  horizon: 15\nverify:\n"
        "  checks: [invariance, mass_balance, equicontinuity]\n  trials: 5\n  steps: 20\n"
        "  pairs: 50\n");
    c.output = scratch("pass").string();
    EXPECT_EQ(run(c, Command::Verify).exit_code, kExitOk);
}
