#include <gtest/gtest.h>

#include "gk/errors.hpp"
#include "gk/scenarios.hpp"

using namespace gk;

TEST(Roadworks, EmptyRoadWithUniformInflow) {
    const auto sc = build_roadworks(0.4);
    EXPECT_EQ(sc.initial.cells(), 10u);
    EXPECT_EQ(sc.initial.classes(), 6u);
    EXPECT_EQ(total_vehicles(sc.initial), 0.0);
    const auto in = sc.bc.inflow(7.0);
    ASSERT_EQ(in.size(), 6u);
    for (double x : in) {
        EXPECT_DOUBLE_EQ(x, 0.4 / 6);
    }
    EXPECT_EQ(sc.profile.beta, 0.0);
    EXPECT_EQ(sc.profile.eta0, 1.0);
}

TEST(Roadworks, RampProfile) {
    const auto a = roadworks_alpha(RoadworksAlpha::Ramp);
    ASSERT_EQ(a.size(), 10u);
    EXPECT_EQ(a.front(), 0.61);
    EXPECT_NEAR(a.back(), 0.5, 1e-15);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(a[i], 0.61);
    }
    for (std::size_t i = 1; i < 10; ++i) {
        EXPECT_LE(a[i], a[i - 1]);
        EXPECT_GE(a[i], 0.5 - 1e-15);
    }
    EXPECT_NEAR(a[6], 0.61 - 2 * 0.022, 1e-15);
}

TEST(Roadworks, ControlAndLiteralVariants) {
    for (double x : roadworks_alpha(RoadworksAlpha::Constant)) {
        EXPECT_EQ(x, 0.61);
    }
    const auto lit = roadworks_alpha(RoadworksAlpha::Literal);
    // The tabulated expression, taken at face value, sits well above 0.61.
    EXPECT_NEAR(lit[5], (31.0 - 0.6) / 40.0, 1e-15);
    EXPECT_NEAR(lit[8], (31.0 - 0.9) / 40.0, 1e-15);
    EXPECT_EQ(build_roadworks(0.4, RoadworksAlpha::Constant).profile.alpha,
              roadworks_alpha(RoadworksAlpha::Constant));
}

TEST(Roadworks, RejectsInflowDensity) {
    EXPECT_THROW(build_roadworks(0.0), DomainError);
    EXPECT_THROW(build_roadworks(1.01), DomainError);
    EXPECT_NO_THROW(build_roadworks(1.0));
}

TEST(TrafficLight, QueueBehindLight) {
    for (std::size_t q = 1; q <= 5; ++q) {
        const auto tl = build_traffic_light(q);
        const auto& s = tl.scenario.initial;
        EXPECT_EQ(total_vehicles(s), static_cast<double>(q));
        EXPECT_TRUE(s.admissible());
        for (std::size_t i = 0; i < 10; ++i) {
            const bool queued = i <= 4 && i + q >= 5;
            EXPECT_EQ(s(i, 0), queued ? 1.0 : 0.0) << "q=" << q << " cell " << i;
        }
        EXPECT_FALSE(static_cast<bool>(tl.scenario.bc.inflow));
    }
}

TEST(TrafficLight, Errors) {
    EXPECT_THROW(build_traffic_light(0), DomainError);
    EXPECT_THROW(build_traffic_light(6), DomainError);
    TrafficLightOptions o;
    o.gate.green = 25.0;
    EXPECT_THROW(build_traffic_light(o), DomainError);
    o.gate = GateSchedule{};
    o.gate.interface = 9;
    EXPECT_THROW(build_traffic_light(o), DomainError);
}

TEST(GateSchedule, GreenFirstThenRed) {
    const GateSchedule g;
    EXPECT_TRUE(g.is_green(0.0));
    EXPECT_TRUE(g.is_green(9.99));
    EXPECT_FALSE(g.is_green(10.0));
    EXPECT_FALSE(g.is_green(19.9));
    EXPECT_TRUE(g.is_green(20.0));
    EXPECT_FALSE(g.override_at(5.0).has_value());
    ASSERT_TRUE(g.override_at(15.0).has_value());
    EXPECT_EQ(*g.override_at(15.0), 0.0);
}
