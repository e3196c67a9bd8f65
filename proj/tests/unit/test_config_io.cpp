#include "support/oracles.hpp"

#include "teleop/config_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

using namespace teleop;
using teleop::testing::vec;

TEST(FormatDouble, RoundTrips) {
    auto gen = teleop::testing::rng(21);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int k = 0; k < 1000; ++k) {
        const double v = u(gen) / 3.0;
        EXPECT_EQ(std::stod(format_double(v)), v);
    }
    EXPECT_EQ(format_double(0.001), "0.001");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(ParseConfig, EmptyTextGivesDefaults) {
    const ScenarioConfig c = parse_config("");
    const ScenarioConfig d = ScenarioConfig::teleoperation_default();
    EXPECT_EQ(serialize_config(c), serialize_config(d));
}

TEST(ParseConfig, SerializeRoundTrip) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.dt = 1.0 / 3000.0;
    c.mode = ControllerMode::state_feedback;
    c.sides[1].q0 = vec({0.1, -1.0 / 7.0});
    c.sides[0].observer.sigma_hat0 = 0.0123;
    c.delays[1].kind = DelayKind::piecewise_random;
    c.delays[1].seed = 18446744073709551557ull;
    c.operator_force.stop_time = std::numeric_limits<double>::infinity();
    const std::string text = serialize_config(c);
    const ScenarioConfig back = parse_config(text);
    EXPECT_EQ(serialize_config(back), text);
    EXPECT_EQ(back.dt, c.dt);
    EXPECT_EQ(back.sides[1].q0, c.sides[1].q0);
    EXPECT_EQ(back.delays[1].seed, c.delays[1].seed);
    EXPECT_TRUE(std::isinf(back.operator_force.stop_time));
    EXPECT_EQ(*back.sides[0].observer.sigma_hat0, 0.0123);
    EXPECT_FALSE(back.sides[1].observer.sigma_hat0.has_value());
}

TEST(ParseConfig, RoundTripReproducesRun) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = 1.0;
    c.delays[0].kind = DelayKind::piecewise_random;
    c.delays[0].seed = 5;
    const ScenarioConfig back = parse_config(serialize_config(c));
    EXPECT_EQ(run_scenario(c).log.data, run_scenario(back).log.data);
}

TEST(ParseConfig, SectionsAndComments) {
    const ScenarioConfig c = parse_config(R"(
# comment line
[simulation]
duration = 2.5   # trailing comment
mode = state_feedback

[controller]
k_damp = 25, 30
omega = 40

[delay.slave]
dbar = 0.05
kind = constant
)");
    EXPECT_EQ(c.duration, 2.5);
    EXPECT_EQ(c.mode, ControllerMode::state_feedback);
    EXPECT_EQ(c.gains.k_damp[0], 25.0);
    EXPECT_EQ(c.gains.k_damp[1], 30.0);
    EXPECT_EQ(c.gains.omega[1], 40.0);
    EXPECT_EQ(c.gains.dbar[1], 0.05);
    EXPECT_EQ(c.delays[1].dbar, 0.05);
    EXPECT_EQ(c.delays[1].kind, DelayKind::constant);
}

TEST(ParseConfig, ErrorsCarryLineAndKey) {
    try {
        parse_config("[simulation]\n\ndt = fast\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 3);
        EXPECT_EQ(e.key(), "simulation.dt");
        EXPECT_NE(std::string(e.what()).find("config:3 [simulation.dt]"), std::string::npos);
    }
    try {
        parse_config("[robot.master]\nmass = 3\n");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_EQ(e.key(), "robot.master.mass");
    }
    EXPECT_THROW(parse_config("dt = 1\n"), ConfigError);
    EXPECT_THROW(parse_config("[simulation\n"), ConfigError);
    EXPECT_THROW(parse_config("[simulation]\nduration\n"), ConfigError);
    EXPECT_THROW(parse_config("[simulation]\nmode = pid\n"), ConfigError);
    EXPECT_THROW(parse_config("[controller]\nk_damp = 1, 2, 3\n"), ConfigError);
}

TEST(ParseConfig, SemanticValidation) {
    EXPECT_THROW(parse_config("[simulation]\ndt = 0.05\n"), ConfigError);
    EXPECT_THROW(parse_config("[observer.master]\neps = 2\n"), ConfigError);
}

TEST(LoadConfig, ReportsPath) {
    const auto dir = std::filesystem::temp_directory_path() / "teleop_config_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "bad.cfg";
    std::ofstream(path) << "[simulation]\nduration = -1x\n";
    try {
        load_config(path);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 2);
        EXPECT_NE(std::string(e.what()).find(path.string() + ":2"), std::string::npos);
    }
    EXPECT_THROW(load_config(dir / "missing.cfg"), ConfigError);
}

TEST(ApplyOverride, SetsNestedKeys) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    apply_override(c, "simulation.dt=0.0005");
    apply_override(c, "robot.slave.q0 = 0.1, 0.2");
    apply_override(c, "observer.master.sigma_hat0=auto");
    EXPECT_EQ(c.dt, 0.0005);
    EXPECT_EQ(c.sides[1].q0, vec({0.1, 0.2}));
    EXPECT_THROW(apply_override(c, "simulation.dt"), ConfigError);
    EXPECT_THROW(apply_override(c, "dt=1"), ConfigError);
    EXPECT_THROW(apply_override(c, "simulation.nope=1"), ConfigError);
}

TEST(ShippedConfig, MatchesBuiltInDefaults) {
    const ScenarioConfig c = load_config(TELEOP_DEFAULT_CONFIG);
    EXPECT_EQ(serialize_config(c), serialize_config(ScenarioConfig::teleoperation_default()));
}
