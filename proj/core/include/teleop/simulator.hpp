// Fixed-step simulation of the delayed master/slave loop: two plants, two
// observers and two delayed position channels integrated together.
#pragma once

#include "teleop/controller.hpp"
#include "teleop/delay_channel.hpp"
#include "teleop/dynamics.hpp"
#include "teleop/interaction.hpp"
#include "teleop/monitor.hpp"
#include "teleop/observer.hpp"
#include "teleop/system_state.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace teleop {

enum class ControllerMode { output_feedback, state_feedback };

ControllerMode parse_controller_mode(std::string_view s);
std::string_view to_string(ControllerMode m);

/// Observer tuning and initial conditions for one robot.
struct ObserverSetup {
    double k_r = 5.0;
    double c_r = 1.0;
    double eps = 0.1;
    Vector xhat0;                          // initial estimate; xi0 is chosen so xhat(0) = xhat0
    double r0 = 2.0;
    std::optional<double> sigma_hat0;      // defaults to ||xhat0||^2
};

struct SideConfig {
    RobotParams robot;
    ObserverSetup observer;
    Vector q0;
    Vector qdot0;
};

struct ScenarioConfig {
    std::array<SideConfig, 2> sides;
    ControllerGains gains;
    /// delays[master] is d_m (master -> slave), delays[slave] is d_s (slave -> master).
    std::array<DelayProfile, 2> delays;
    OperatorProfile operator_force;
    WallEnvironment environment;
    double duration = 60.0;
    double dt = 1e-3;
    ControllerMode mode = ControllerMode::output_feedback;
    int decimation = 10;
    /// RK4 substeps per dt; 0 picks the count from the observer stiffness each step.
    int substeps = 0;
    /// Run even when the gain condition fails.
    bool force = false;

    SideConfig& side(Side s) { return sides[index(s)]; }
    const SideConfig& side(Side s) const { return sides[index(s)]; }

    ObserverParams observer_params(Side s) const;
    long step_count() const;  // round(duration / dt)

    /// Throws InvalidInput on any broken invariant.
    void validate() const;

    /// The two-link teleoperation scenario: masses (1, 1.5) kg, lengths (2, 1) m,
    /// p = 100, k = 20, alpha = 4, omega = 50, delays bounded by 0.2 / 0.1 s,
    /// F_hy = 4 sin(pi t / 20) + 1 N until 40 s, wall at y = 2 m.
    static ScenarioConfig teleoperation_default();
};

/// Signals computed alongside the state derivative.
struct StepSignals {
    std::array<Vector, 2> tau;          // control torques
    std::array<Vector, 2> tau_ext;      // hand (master) / environment (slave) joint torques
    std::array<Vector, 2> x_hat;        // observer estimates
    std::array<Vector, 2> ctrl_velocity;
    std::array<Vector, 2> q_delayed;    // remote position seen by each side
    std::array<double, 2> delay{};      // d_m(t), d_s(t)
    std::array<Vector2, 2> ee_pos;
    double f_hy = 0.0;
    double f_ey = 0.0;
};

struct Evaluation {
    SystemState rate;
    StepSignals signals;
};

/// Position histories of both robots (each robot's own trajectory; the other
/// side reads it with delay).
struct ChannelHistories {
    HistoryBuffer master;
    HistoryBuffer slave;

    const HistoryBuffer& of(Side s) const { return s == Side::master ? master : slave; }
    HistoryBuffer& of(Side s) { return s == Side::master ? master : slave; }
};

/// Time derivative of the full state. Delayed positions come from the history;
/// queries newer than its last sample interpolate toward the current state.
/// The same total torque u_i = tau_i + tau_ext_i drives plant and observer.
Evaluation system_derivative(const SystemState& state, const ChannelHistories& histories, const ScenarioConfig& config);

/// Initial state built from the config (xi0 = xhat0 - k_x(r0, sigma_hat0) q0).
SystemState initial_state(const ScenarioConfig& config);

/// CSV schema of one logged row.
std::vector<std::string> log_columns(int dof);

struct RunLog {
    std::vector<std::string> columns;
    std::vector<double> data;  // row-major

    std::size_t rows() const { return columns.empty() ? 0 : data.size() / columns.size(); }
    int column(std::string_view name) const;  // throws InvalidInput when absent
    double at(std::size_t row, int col) const { return data[row * columns.size() + col]; }
    std::vector<double> series(std::string_view name) const;
};

struct RunResult {
    RunLog log;
    GainReport gain_report;
    DecayCertificate decay;
    long sigma_clamps = 0;   // steps where sigma_hat had to be reset to -eps
    int max_substeps = 0;
    long total_substeps = 0;
    double min_r_margin = 0.0;      // min over steps and sides of r - c_r
    double min_sigma_margin = 0.0;  // min of sigma_hat + eps
};

class Simulator {
public:
    explicit Simulator(ScenarioConfig config);

    const SystemState& state() const { return state_; }
    const ScenarioConfig& config() const { return config_; }
    long step_index() const { return step_; }

    /// Advance by one dt (possibly in several RK4 substeps).
    void advance();

    /// One RK4 step of size h from the current state; appends to histories.
    void rk4_step(double h);

    /// Signals and derivative at the current state.
    Evaluation evaluate() const;

    long sigma_clamps() const { return sigma_clamps_; }
    int last_substeps() const { return last_substeps_; }

    /// Number of substeps the automatic policy picks for the current state.
    int automatic_substeps() const;

private:
    void check_invariants();

    ScenarioConfig config_;
    std::array<ObserverParams, 2> obs_params_;
    SystemState state_;
    ChannelHistories histories_;
    long step_ = 0;
    long sigma_clamps_ = 0;
    int last_substeps_ = 0;
};

/// Integrate the whole scenario, monitoring every step and logging every
/// `decimation`-th one. Throws GainConditionError unless the gains satisfy the
/// gain condition or config.force is set.
RunResult run_scenario(const ScenarioConfig& config);

}  // namespace teleop
