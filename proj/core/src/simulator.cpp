#include "teleop/simulator.hpp"

#include "teleop/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace teleop {
namespace {

// RK4's stability interval on the negative real axis ends near -2.785.
constexpr double kStabilityTarget = 2.0;
constexpr int kMaxSubsteps = 100000;
constexpr double kInvariantSlack = 1e-9;

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

Vector remote_position(const HistoryBuffer& history, double t_query, double t_now, const Vector& q_now) {
    const double t_newest = history.newest_time();
    if (t_query <= t_newest) return history.delayed_value(t_query);
    // Inside the step being integrated: bridge from the last stored sample to the stage state.
    if (!(t_now > t_newest)) return q_now;
    const double w = (t_query - t_newest) / (t_now - t_newest);
    return (1.0 - w) * history.newest().value + w * q_now;
}

std::string dump(const SystemState& s) {
    std::ostringstream os;
    os.precision(17);
    auto vec = [&](const Vector& v) {
        os << '(';
        for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
        os << ')';
    };
    os << "t=" << s.t << " q_m=";
    vec(s.master.q);
    os << " qd_m=";
    vec(s.master.qdot);
    os << " q_s=";
    vec(s.slave.q);
    os << " qd_s=";
    vec(s.slave.qdot);
    os << " xi_m=";
    vec(s.obs_master.xi);
    os << " xi_s=";
    vec(s.obs_slave.xi);
    os << " r=(" << s.obs_master.r << ", " << s.obs_slave.r << ") sigma_hat=(" << s.obs_master.sigma_hat << ", "
       << s.obs_slave.sigma_hat << ')';
    return os.str();
}

}  // namespace

ControllerMode parse_controller_mode(std::string_view s) {
    if (s == "output_feedback") return ControllerMode::output_feedback;
    if (s == "state_feedback") return ControllerMode::state_feedback;
    throw InvalidInput("unknown controller mode '" + std::string(s) + "'");
}

std::string_view to_string(ControllerMode m) {
    return m == ControllerMode::output_feedback ? "output_feedback" : "state_feedback";
}

ObserverParams ScenarioConfig::observer_params(Side s) const {
    const SideConfig& sc = side(s);
    return ObserverParams::from(sc.robot, sc.observer.k_r, sc.observer.c_r, sc.observer.eps, gains.alpha[index(s)],
                                gains.k_damp[index(s)]);
}

long ScenarioConfig::step_count() const { return std::lround(duration / dt); }

void ScenarioConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("simulation: dt must be positive");
    if (!(duration >= dt * (1.0 - 1e-12)) || !std::isfinite(duration)) {
        throw InvalidInput("simulation: duration must be at least dt");
    }
    if (decimation < 1) throw InvalidInput("simulation: decimation must be >= 1");
    if (substeps < 0) throw InvalidInput("simulation: substeps must be >= 0");
    gains.validate();
    for (Side s : {Side::master, Side::slave}) {
        const SideConfig& sc = side(s);
        const std::string tag = std::string(" (") + name(s) + ")";
        sc.robot.validate();
        observer_params(s).validate();
        const int n = sc.robot.dof();
        if (sc.q0.size() != n || sc.qdot0.size() != n || sc.observer.xhat0.size() != n) {
            throw InvalidInput("initial conditions must have one entry per joint" + tag);
        }
        if (!sc.q0.allFinite() || !sc.qdot0.allFinite() || !sc.observer.xhat0.allFinite()) {
            throw InvalidInput("initial conditions must be finite" + tag);
        }
        if (!(sc.observer.r0 >= sc.observer.c_r)) throw InvalidInput("observer: r0 must be >= c_r" + tag);
        if (sc.observer.sigma_hat0 && !(*sc.observer.sigma_hat0 >= -sc.observer.eps)) {
            throw InvalidInput("observer: sigma_hat0 must be >= -eps" + tag);
        }
        const DelayProfile& d = delays[index(s)];
        d.validate();
        if (d.dbar != gains.dbar[index(s)]) throw InvalidInput("delay bound differs from controller dbar" + tag);
        if (d.dbar > 0.0 && dt > d.dbar / 10.0 * (1.0 + 1e-12)) {
            throw InvalidInput("simulation: dt must not exceed dbar / 10" + tag);
        }
    }
    if (side(Side::master).robot.dof() != side(Side::slave).robot.dof()) {
        throw InvalidInput("master and slave must have the same number of joints");
    }
    operator_force.validate();
    environment.validate();
}

ScenarioConfig ScenarioConfig::teleoperation_default() {
    ScenarioConfig c;
    for (Side s : {Side::master, Side::slave}) {
        SideConfig& sc = c.side(s);
        sc.robot = RobotParams::planar_two_link();
        sc.q0 = Vector::Zero(2);
        sc.qdot0 = Vector::Zero(2);
        sc.observer.k_r = 5.0;
        sc.observer.c_r = 1.0;
        sc.observer.eps = 0.1;
        sc.observer.xhat0 = vec2(0.05, 0.02);
        sc.observer.r0 = 2.0;
        sc.observer.sigma_hat0.reset();
    }
    c.gains.p = 100.0;
    c.gains.k_damp = {20.0, 20.0};
    c.gains.alpha = {4.0, 4.0};
    c.gains.omega = {50.0, 50.0};
    c.gains.dbar = {0.2, 0.1};

    DelayProfile fwd;
    fwd.kind = DelayKind::sinusoidal;
    fwd.dbar = 0.2;
    fwd.freq = 0.5;
    fwd.phase = 0.0;
    DelayProfile bwd = fwd;
    bwd.dbar = 0.1;
    bwd.phase = std::numbers::pi / 2.0;
    c.delays = {fwd, bwd};

    c.operator_force.amplitude = 4.0;
    c.operator_force.bias = 1.0;
    c.operator_force.angular_freq = std::numbers::pi / 20.0;
    c.operator_force.stop_time = 40.0;

    c.environment.stiffness = 1000.0;
    c.environment.damping = 100.0;
    c.environment.wall_y = 2.0;

    c.duration = 60.0;
    c.dt = 1e-3;
    c.decimation = 10;
    c.substeps = 0;
    return c;
}

SystemState initial_state(const ScenarioConfig& config) {
    SystemState s;
    s.t = 0.0;
    for (Side side : {Side::master, Side::slave}) {
        const SideConfig& sc = config.side(side);
        const ObserverParams op = config.observer_params(side);
        s.joint(side) = JointState{sc.q0, sc.qdot0};
        ObserverState& obs = s.observer(side);
        obs.r = sc.observer.r0;
        obs.sigma_hat = sc.observer.sigma_hat0.value_or(sc.observer.xhat0.squaredNorm());
        obs.xi = sc.observer.xhat0 - gain_kx(obs.r, obs.sigma_hat, op) * sc.q0;
    }
    return s;
}

Evaluation system_derivative(const SystemState& state, const ChannelHistories& histories, const ScenarioConfig& config) {
    Evaluation ev;
    StepSignals& sig = ev.signals;
    SystemState& rate = ev.rate;
    rate.t = 1.0;
    const double t = state.t;

    const Vector2 f_h = operator_force(config.operator_force, t);
    sig.f_hy = f_h.y();

    for (Side side : {Side::master, Side::slave}) {
        const int i = index(side);
        const Side remote = opposite(side);
        const SideConfig& sc = config.side(side);
        const RobotParams& robot = sc.robot;
        const ObserverParams op = config.observer_params(side);
        const JointState& js = state.joint(side);

        // q_jd = q_j(t - d_j(t)), d_j being the delay on the remote robot's outgoing channel.
        const DelayProfile& profile = config.delays[index(remote)];
        const double d = delay_at(profile, t);
        const double t_query = t - d;
        if (t_query > t || t_query < t - profile.dbar) {
            throw InvariantViolation("delay channel: non-causal lookup at t = " + std::to_string(t));
        }
        sig.delay[index(remote)] = d;
        sig.q_delayed[i] = remote_position(histories.of(remote), t_query, t, state.joint(remote).q);

        ObserverState obs = state.observer(side);
        obs.sigma_hat = std::max(obs.sigma_hat, -op.eps);  // RK4 stages may dip just past the bound
        const ObserverOutput est = observer_output(obs, js.q, op);
        sig.x_hat[i] = est.x_hat;
        sig.ctrl_velocity[i] = config.mode == ControllerMode::output_feedback ? est.x_hat : js.qdot;

        const Vector g = gravity_vector(js.q, robot);
        sig.tau[i] = pd_output_feedback(js.q, sig.q_delayed[i], sig.ctrl_velocity[i], g, config.gains.p,
                                        config.gains.k_damp[i]);

        sig.ee_pos[i] = forward_kinematics(js.q, robot);
        if (side == Side::master) {
            sig.tau_ext[i] = to_joint_torques(js.q, f_h, robot);
        } else {
            const Vector2 ee_vel = jacobian(js.q, robot) * js.qdot;
            const Vector2 f_e = environment_force(config.environment, sig.ee_pos[i], ee_vel);
            sig.f_ey = f_e.y();
            sig.tau_ext[i] = to_joint_torques(js.q, f_e, robot);
        }

        const Vector u = sig.tau[i] + sig.tau_ext[i];
        JointState& jr = rate.joint(side);
        jr.q = js.qdot;
        jr.qdot = forward_dynamics(js, u, robot);

        const ObserverRates orate = observer_derivatives(obs, js.q, u, op, robot);
        ObserverState& obr = rate.observer(side);
        obr.xi = orate.xi_dot;
        obr.r = orate.r_dot;
        obr.sigma_hat = orate.sigma_hat_dot;
    }
    return ev;
}

std::vector<std::string> log_columns(int dof) {
    std::vector<std::string> cols{"t"};
    auto per_joint = [&](const std::string& prefix) {
        for (const char* side : {"m", "s"}) {
            for (int j = 1; j <= dof; ++j) cols.push_back(prefix + "_" + side + std::to_string(j));
        }
    };
    per_joint("q");
    per_joint("qd");
    per_joint("xhat");
    per_joint("xtilde");
    for (const char* c : {"r_m", "r_s", "sighat_m", "sighat_s"}) cols.emplace_back(c);
    per_joint("tau");
    for (const char* c : {"F_hy", "F_ey", "d_m", "d_s", "V1", "V3", "Vo", "decay_ratio", "ee_y_m", "ee_y_s",
                          "W_h", "W_e", "eta_m", "eta_s"}) {
        cols.emplace_back(c);
    }
    return cols;
}

int RunLog::column(std::string_view name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw InvalidInput("run log has no column '" + std::string(name) + "'");
    return static_cast<int>(it - columns.begin());
}

std::vector<double> RunLog::series(std::string_view name) const {
    const int c = column(name);
    std::vector<double> out(rows());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, c);
    return out;
}

Simulator::Simulator(ScenarioConfig config)
    : config_(std::move(config)),
      // each history covers the delay bound of its own robot's outgoing channel
      histories_{HistoryBuffer(config_.gains.dbar[index(Side::master)] + config_.dt, config_.dt),
                 HistoryBuffer(config_.gains.dbar[index(Side::slave)] + config_.dt, config_.dt)} {
    config_.validate();
    obs_params_ = {config_.observer_params(Side::master), config_.observer_params(Side::slave)};
    state_ = initial_state(config_);
    histories_.master.push_sample(state_.t, state_.master.q);
    histories_.slave.push_sample(state_.t, state_.slave.q);
}

Evaluation Simulator::evaluate() const { return system_derivative(state_, histories_, config_); }

int Simulator::automatic_substeps() const {
    double rate = 0.0;
    for (Side side : {Side::master, Side::slave}) {
        const ObserverParams& op = obs_params_[index(side)];
        const JointState& js = state_.joint(side);
        ObserverState obs = state_.observer(side);
        obs.sigma_hat = std::max(obs.sigma_hat, -op.eps);
        rate = std::max(rate, stiffness_rate(obs, js.q, op));

        // Plant damping: controller damping plus the wall damper while in contact.
        const RobotParams& robot = config_.side(side).robot;
        Matrix damping = config_.gains.k_damp[index(side)] * Matrix::Identity(robot.dof(), robot.dof());
        if (side == Side::slave && forward_kinematics(js.q, robot).y() > config_.environment.wall_y) {
            const TaskJacobian j = jacobian(js.q, robot);
            damping += config_.environment.damping * j.row(1).transpose() * j.row(1);
        }
        rate = std::max(rate, (mass_matrix(js.q, robot).ldlt().solve(damping)).norm());
    }
    const double n = std::ceil(config_.dt * rate / kStabilityTarget);
    return static_cast<int>(std::clamp(n, 1.0, static_cast<double>(kMaxSubsteps)));
}

void Simulator::rk4_step(double h) {
    auto rhs = [this](double t, const SystemState& x) {
        SystemState stage = x;
        stage.t = t;
        return system_derivative(stage, histories_, config_).rate;
    };
    SystemState next;
    try {
        next = teleop::rk4_step(state_, state_.t, h, rhs);
    } catch (const InvalidInput& e) {
        // the config was validated up front, so a bad value here comes from a blown-up stage
        throw DivergenceError(std::string("simulation diverged inside an RK4 stage (") + e.what() + "): " +
                              dump(state_));
    }
    next.t = state_.t + h;
    state_ = std::move(next);
    check_invariants();
    histories_.master.push_sample(state_.t, state_.master.q);
    histories_.slave.push_sample(state_.t, state_.slave.q);
}

void Simulator::advance() {
    const int n = config_.substeps > 0 ? config_.substeps : automatic_substeps();
    const double t0 = static_cast<double>(step_) * config_.dt;
    const double h = config_.dt / n;
    for (int k = 0; k < n; ++k) {
        rk4_step(h);
        // pin the clock to the grid to avoid drift from repeated additions
        state_.t = t0 + static_cast<double>(k + 1) * h;
    }
    ++step_;
    state_.t = static_cast<double>(step_) * config_.dt;
    last_substeps_ = n;
}

void Simulator::check_invariants() {
    if (!state_.all_finite()) throw DivergenceError("simulation diverged: " + dump(state_));
    for (Side side : {Side::master, Side::slave}) {
        const ObserverParams& op = obs_params_[index(side)];
        ObserverState& obs = state_.observer(side);
        if (obs.r < op.c_r - kInvariantSlack) {
            throw InvariantViolation(std::string("observer scaling r fell below c_r on ") + name(side) + ": " +
                                     dump(state_));
        }
        if (obs.sigma_hat < -op.eps) {
            obs.sigma_hat = -op.eps;
            ++sigma_clamps_;
        }
    }
}

RunResult run_scenario(const ScenarioConfig& config) {
    RunResult result;
    result.gain_report = verify_gain_condition(config.gains);
    if (!result.gain_report.satisfied && !config.force) {
        throw GainConditionError("gain condition violated (rho_m = " + std::to_string(result.gain_report.rho_master) +
                                 ", rho_s = " + std::to_string(result.gain_report.rho_slave) + ")");
    }

    Simulator sim(config);
    const int n = config.side(Side::master).robot.dof();
    const std::array<ObserverParams, 2> op{config.observer_params(Side::master), config.observer_params(Side::slave)};
    LyapunovMonitor monitor({config.side(Side::master).robot, config.side(Side::slave).robot, op[0], op[1],
                             config.gains, config.dt});

    result.log.columns = log_columns(n);
    const long steps = config.step_count();
    result.log.data.reserve(static_cast<std::size_t>(steps / config.decimation + 1) * result.log.columns.size());

    std::vector<double> times, vo;
    times.reserve(static_cast<std::size_t>(steps + 1));
    vo.reserve(static_cast<std::size_t>(steps + 1));
    result.min_r_margin = std::numeric_limits<double>::infinity();
    result.min_sigma_margin = std::numeric_limits<double>::infinity();

    for (long k = 0; k <= steps; ++k) {
        if (k > 0) {
            sim.advance();
            result.max_substeps = std::max(result.max_substeps, sim.last_substeps());
            result.total_substeps += sim.last_substeps();
        }
        const SystemState& s = sim.state();
        const StepSignals sig = sim.evaluate().signals;
        const LyapunovSample ly = monitor.observe(s, sig.tau_ext[0], sig.tau_ext[1]);
        times.push_back(s.t);
        vo.push_back(ly.vo);
        for (Side side : {Side::master, Side::slave}) {
            const ObserverParams& p = op[index(side)];
            result.min_r_margin = std::min(result.min_r_margin, s.observer(side).r - p.c_r);
            result.min_sigma_margin = std::min(result.min_sigma_margin, s.observer(side).sigma_hat + p.eps);
        }
        if (k % config.decimation != 0) continue;

        auto& row = result.log.data;
        row.push_back(s.t);
        for (const JointState* js : {&s.master, &s.slave}) row.insert(row.end(), js->q.begin(), js->q.end());
        for (const JointState* js : {&s.master, &s.slave}) row.insert(row.end(), js->qdot.begin(), js->qdot.end());
        for (int i = 0; i < 2; ++i) row.insert(row.end(), sig.ctrl_velocity[i].begin(), sig.ctrl_velocity[i].end());
        for (int i = 0; i < 2; ++i) {
            const Vector xt = s.joint(static_cast<Side>(i)).qdot - sig.ctrl_velocity[i];
            row.insert(row.end(), xt.begin(), xt.end());
        }
        row.push_back(s.obs_master.r);
        row.push_back(s.obs_slave.r);
        row.push_back(s.obs_master.sigma_hat);
        row.push_back(s.obs_slave.sigma_hat);
        for (int i = 0; i < 2; ++i) row.insert(row.end(), sig.tau[i].begin(), sig.tau[i].end());
        row.push_back(sig.f_hy);
        row.push_back(sig.f_ey);
        row.push_back(sig.delay[0]);
        row.push_back(sig.delay[1]);
        row.push_back(ly.v1);
        row.push_back(ly.v3);
        row.push_back(ly.vo);
        row.push_back(ly.decay_ratio);
        row.push_back(sig.ee_pos[0].y());
        row.push_back(sig.ee_pos[1].y());
        row.push_back(ly.work_operator);
        row.push_back(ly.work_environment);
        row.push_back(ly.eta_norm_master);
        row.push_back(ly.eta_norm_slave);
    }
    result.sigma_clamps = sim.sigma_clamps();
    if (vo.front() > 0.0) {
        result.decay = decay_certificate(times, vo, 2.0 * monitor.decay_rate());
    } else {
        result.decay.pass = false;
        result.decay.max_ratio = std::numeric_limits<double>::quiet_NaN();
    }
    return result;
}

}  // namespace teleop
