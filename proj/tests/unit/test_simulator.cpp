#include "support/oracles.hpp"

#include "teleop/simulator.hpp"

#include <gtest/gtest.h>

using namespace teleop;
using teleop::testing::vec;

namespace {

ScenarioConfig quiet_config() {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.operator_force.amplitude = 0.0;
    c.operator_force.bias = 0.0;
    for (auto& s : c.sides) {
        s.observer.xhat0 = vec({0, 0});
        s.observer.r0 = s.observer.c_r;
        s.observer.sigma_hat0 = 0.0;
    }
    return c;
}

double max_abs_column(const RunLog& log, const std::string& name) {
    double m = 0.0;
    for (double v : log.series(name)) m = std::max(m, std::abs(v));
    return m;
}

}  // namespace

TEST(ScenarioConfig, DefaultIsValid) {
    const ScenarioConfig c = ScenarioConfig::teleoperation_default();
    EXPECT_NO_THROW(c.validate());
    EXPECT_EQ(c.step_count(), 60000);
    EXPECT_EQ(c.gains.dbar[0], 0.2);
    EXPECT_EQ(c.gains.dbar[1], 0.1);
    EXPECT_EQ(c.delays[0].dbar, 0.2);
    EXPECT_EQ(c.operator_force.stop_time, 40.0);
}

TEST(ScenarioConfig, RejectsCoarseStepAndMismatchedBounds) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.dt = 0.02;  // above dbar_s / 10
    EXPECT_THROW(c.validate(), InvalidInput);
    c = ScenarioConfig::teleoperation_default();
    c.delays[1].dbar = 0.15;
    EXPECT_THROW(c.validate(), InvalidInput);
    c = ScenarioConfig::teleoperation_default();
    c.duration = 0.0;
    EXPECT_THROW(c.validate(), InvalidInput);
    c = ScenarioConfig::teleoperation_default();
    c.decimation = 0;
    EXPECT_THROW(c.validate(), InvalidInput);
}

TEST(ControllerMode, Parse) {
    EXPECT_EQ(parse_controller_mode("state_feedback"), ControllerMode::state_feedback);
    EXPECT_EQ(parse_controller_mode(to_string(ControllerMode::output_feedback)), ControllerMode::output_feedback);
    EXPECT_THROW(parse_controller_mode("pid"), InvalidInput);
}

TEST(InitialState, EstimateStartsAtConfiguredValue) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.sides[0].q0 = vec({0.3, -0.2});
    const SystemState s = initial_state(c);
    const ObserverOutput out = observer_output(s.obs_master, s.master.q, c.observer_params(Side::master));
    EXPECT_LT((out.x_hat - vec({0.05, 0.02})).norm(), 1e-12);
    EXPECT_NEAR(s.obs_master.sigma_hat, 0.0029, 1e-15);
    EXPECT_EQ(s.obs_master.r, 2.0);
}

TEST(SystemDerivative, InitialAccelerations) {
    const Simulator sim(ScenarioConfig::teleoperation_default());
    const Evaluation ev = sim.evaluate();
    // master: M(0)^-1 [(3, 1) - 20 (0.05, 0.02)] = M(0)^-1 (2, 0.6)
    EXPECT_NEAR(ev.rate.master.qdot[0], 0.05, 1e-12);
    EXPECT_NEAR(ev.rate.master.qdot[1], 0.25, 1e-12);
    // slave: M(0)^-1 (-1, -0.4)
    EXPECT_NEAR(ev.rate.slave.qdot[0], 0.05, 1e-12);
    EXPECT_NEAR(ev.rate.slave.qdot[1], -2.5 / 6.0, 1e-12);
    EXPECT_NEAR(ev.signals.f_hy, 1.0, 1e-15);
    EXPECT_EQ(ev.signals.f_ey, 0.0);
    EXPECT_EQ(ev.rate.master.q, vec({0, 0}));
}

TEST(SystemDerivative, ObserverSeesThePlantTorque) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.sides[0].q0 = vec({0.2, 0.4});
    c.sides[0].qdot0 = vec({0.1, -0.3});
    const Simulator sim(c);
    const Evaluation ev = sim.evaluate();
    const Vector u = ev.signals.tau[0] + ev.signals.tau_ext[0];
    const ObserverRates expected = observer_derivatives(sim.state().obs_master, sim.state().master.q, u,
                                                        c.observer_params(Side::master), c.sides[0].robot);
    EXPECT_EQ(ev.rate.obs_master.xi, expected.xi_dot);
    EXPECT_EQ(ev.rate.obs_master.r, expected.r_dot);
    EXPECT_EQ(ev.rate.obs_master.sigma_hat, expected.sigma_hat_dot);
    EXPECT_EQ(ev.rate.master.qdot, forward_dynamics(sim.state().master, u, c.sides[0].robot));
}

TEST(SystemDerivative, EquilibriumAtZero) {
    const Simulator sim(quiet_config());
    const Evaluation ev = sim.evaluate();
    for (Side s : {Side::master, Side::slave}) {
        EXPECT_EQ(ev.rate.joint(s).q.norm(), 0.0);
        EXPECT_EQ(ev.rate.joint(s).qdot.norm(), 0.0);
        EXPECT_EQ(ev.rate.observer(s).xi.norm(), 0.0);
        EXPECT_EQ(ev.rate.observer(s).r, 0.0);
        EXPECT_EQ(ev.rate.observer(s).sigma_hat, 0.0);
    }
}

TEST(Simulator, ZeroInputsStayAtRest) {
    ScenarioConfig c = quiet_config();
    c.duration = 1.0;
    const RunResult r = run_scenario(c);
    for (const char* col : {"q_m1", "q_m2", "q_s1", "q_s2", "qd_m1", "qd_s2", "xhat_m1", "V1", "V3", "Vo"}) {
        EXPECT_EQ(max_abs_column(r.log, col), 0.0) << col;
    }
}

TEST(Simulator, DeterministicWithRandomDelays) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = 3.0;
    for (auto& d : c.delays) {
        d.kind = DelayKind::piecewise_random;
        d.seed = 99;
    }
    const RunResult a = run_scenario(c);
    const RunResult b = run_scenario(c);
    EXPECT_EQ(a.log.data, b.log.data);
    const auto d_m = a.log.series("d_m");
    EXPECT_GT(*std::max_element(d_m.begin(), d_m.end()), 0.1);
    EXPECT_LE(*std::max_element(d_m.begin(), d_m.end()), 0.2);
}

TEST(Simulator, LogShape) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = 0.5;
    c.decimation = 7;
    const RunResult r = run_scenario(c);
    EXPECT_EQ(r.log.columns.size(), 39u);
    EXPECT_EQ(r.log.rows(), static_cast<std::size_t>(std::floor(0.5 / (1e-3 * 7)) + 1));
    EXPECT_EQ(r.log.columns.front(), "t");
    EXPECT_THROW(r.log.column("nope"), InvalidInput);
}

TEST(Simulator, StateFeedbackLogsVelocityAsControllerInput) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = 2.0;
    c.mode = ControllerMode::state_feedback;
    const RunResult r = run_scenario(c);
    EXPECT_EQ(r.log.series("xhat_m1"), r.log.series("qd_m1"));
    EXPECT_EQ(max_abs_column(r.log, "xtilde_s2"), 0.0);
}

TEST(Simulator, RefusesViolatedGainsUnlessForced) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = 0.1;
    c.gains.k_damp = {10.0, 10.0};
    EXPECT_THROW(run_scenario(c), GainConditionError);
    c.force = true;
    const RunResult r = run_scenario(c);
    EXPECT_FALSE(r.gain_report.satisfied);
    EXPECT_GT(r.log.rows(), 0u);
}

TEST(Simulator, SingleSubstepDivergesOnStiffObserver) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = 1.0;
    c.substeps = 1;
    EXPECT_THROW(run_scenario(c), DivergenceError);
}

TEST(Simulator, AutomaticSubstepsFollowStiffness) {
    Simulator sim(ScenarioConfig::teleoperation_default());
    const int n = sim.automatic_substeps();
    // 2 k_sigma at the initial state is about 2.5e4 1/s
    EXPECT_GE(n, 10);
    EXPECT_LE(n, 40);
    sim.advance();
    EXPECT_EQ(sim.last_substeps(), n);
    EXPECT_DOUBLE_EQ(sim.state().t, 1e-3);
}

TEST(Simulator, FilterFormAlongTrajectory) {
    // Differentiate the reported estimate numerically and compare with f + k_x (qdot - xhat).
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.dt = 1e-6;  // central-difference truncation ~ dt^2 k_x^3 |xtilde| / 6
    Simulator sim(c);
    const ObserverParams op = c.observer_params(Side::master);
    const RobotParams& arm = c.sides[0].robot;
    std::vector<Vector> xhat;
    std::vector<Vector> model;
    for (int k = 0; k < 2000; ++k) {
        const Evaluation ev = sim.evaluate();
        const SystemState& s = sim.state();
        const Vector u = ev.signals.tau[0] + ev.signals.tau_ext[0];
        const ObserverOutput out = observer_output(s.obs_master, s.master.q, op);
        const Vector f = forward_dynamics({s.master.q, out.x_hat}, u, arm);
        xhat.push_back(out.x_hat);
        model.push_back(f + out.k_x * (s.master.qdot - out.x_hat));
        sim.advance();
    }
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 1; k + 1 < xhat.size(); ++k) {
        const Vector fd = (xhat[k + 1] - xhat[k - 1]) / (2 * c.dt);
        worst = std::max(worst, (fd - model[k]).norm());
        scale = std::max(scale, model[k].norm());
    }
    EXPECT_LT(worst, 1e-6 * scale) << "worst " << worst << " scale " << scale;
}

TEST(Simulator, InvariantsHoldOnDefaultRun) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = 20.0;
    const RunResult r = run_scenario(c);
    EXPECT_GE(r.min_r_margin, -1e-9);
    EXPECT_GE(r.min_sigma_margin, -1e-9);
    for (const char* col : {"r_m", "r_s"}) {
        const auto v = r.log.series(col);
        EXPECT_GE(*std::min_element(v.begin(), v.end()), 1.0 - 1e-9);
    }
    for (const char* col : {"V1", "V3", "Vo"}) {
        const auto v = r.log.series(col);
        EXPECT_GE(*std::min_element(v.begin(), v.end()), 0.0) << col;
    }
    // operator does positive, growing work while pushing
    const auto w = r.log.series("W_h");
    EXPECT_GT(w[r.log.rows() / 4], 0.0);
}

TEST(Simulator, HalvingStepBarelyMovesFinalState) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.decimation = 1000;
    const RunResult a = run_scenario(c);
    c.dt = 5e-4;
    c.decimation = 2000;
    const RunResult b = run_scenario(c);
    ASSERT_EQ(a.log.rows(), b.log.rows());
    const std::size_t last = a.log.rows() - 1;
    for (const char* col : {"q_m1", "q_m2", "q_s1", "q_s2"}) {
        EXPECT_LT(std::abs(a.log.at(last, a.log.column(col)) - b.log.at(last, b.log.column(col))), 1e-5) << col;
    }
}

TEST(Simulator, UndelayedStateFeedbackGapShrinksWithObserverError) {
    ScenarioConfig c = ScenarioConfig::teleoperation_default();
    c.duration = 10.0;
    for (int i = 0; i < 2; ++i) {
        c.delays[i] = DelayProfile{};
        c.gains.dbar[i] = 0.0;
    }
    ScenarioConfig sfb = c;
    sfb.mode = ControllerMode::state_feedback;
    const RunResult ref = run_scenario(sfb);
    double prev = std::numeric_limits<double>::infinity();
    for (double scale : {1.0, 0.1, 0.01}) {
        ScenarioConfig ofb = c;
        for (auto& s : ofb.sides) s.observer.xhat0 = scale * vec({0.05, 0.02});
        const RunResult r = run_scenario(ofb);
        double gap = 0.0;
        for (const char* col : {"q_m1", "q_m2", "q_s1", "q_s2"}) {
            const auto a = r.log.series(col), b = ref.log.series(col);
            for (std::size_t k = 0; k < a.size(); ++k) gap = std::max(gap, std::abs(a[k] - b[k]));
        }
        EXPECT_LT(gap, prev) << "scale " << scale;
        prev = gap;
    }
}

TEST(Integrator, PlantSelfConvergenceOrder) {
    const auto study = teleop::testing::rk4_self_convergence();
    EXPECT_GE(study.order, 3.5);
    EXPECT_GE(study.err_coarse / study.err_fine, 8.0);
}
