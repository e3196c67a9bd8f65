// Numerical Lyapunov diagnostics for a simulated run. These use the true plant
// velocities, so they are a simulation-only oracle.
//
//   V1 = 1/2 sum qd' M qd + p/2 |q_m - q_s|^2
//   V3 = sum w_i int_{-dbar_i}^0 int_{t+theta}^t |qd_i|^2 dxi dtheta
//   Vo = 1/4 sum { 2 eta' M eta + 2 (r - c_r)^2 + sigma_tilde^2 },  eta = xtilde / r
#pragma once

#include "teleop/controller.hpp"
#include "teleop/delay_channel.hpp"
#include "teleop/dynamics.hpp"
#include "teleop/observer.hpp"
#include "teleop/system_state.hpp"

#include <span>

namespace teleop {

struct LyapunovSample {
    double t = 0.0;
    double v1 = 0.0;
    double v3 = 0.0;
    double vo = 0.0;
    double work_operator = 0.0;     // int qd_m' tau_h
    double work_environment = 0.0;  // int qd_s' tau_e
    double decay_ratio = 0.0;       // Vo(t) exp(k_r t / 2) / Vo(0)
    double eta_norm_master = 0.0;
    double eta_norm_slave = 0.0;
};

double compute_v1(const JointState& master, const JointState& slave, double p, const RobotParams& dyn_master,
                  const RobotParams& dyn_slave);

/// Delay energy term of one robot. Evaluates the double integral through the
/// equivalent single integral w int_{t-dbar}^t (xi - (t - dbar)) |qd(xi)|^2 dxi
/// with the trapezoidal rule on the stored samples. The history's newest sample
/// must sit at t.
double compute_v3(const HistoryBuffer& velocity_history, double t, double dbar, double omega);

/// One robot's share of Vo.
double observer_energy(const JointState& truth, const ObserverOutput& est, double r, double c_r,
                       const RobotParams& dyn);

double compute_vo(const SystemState& s, const ObserverOutput& est_master, const ObserverOutput& est_slave,
                  const ObserverParams& obs_master, const ObserverParams& obs_slave, const RobotParams& dyn_master,
                  const RobotParams& dyn_slave);

struct DecayCertificate {
    double max_ratio = 0.0;
    double t_at_max = 0.0;
    bool pass = false;
};

inline constexpr double kDecayTolerance = 1.05;

/// max_t Vo(t) exp(k_r t / 2) / Vo(0) over the samples; passes at <= 1.05.
/// `times` and `vo` are parallel; times[0] is the reference instant.
DecayCertificate decay_certificate(std::span<const double> times, std::span<const double> vo, double k_r);

/// Running work integrals, accumulated with the trapezoidal rule.
struct EnergyLedger {
    double work_operator = 0.0;
    double work_environment = 0.0;
    double last_t = 0.0;
    double last_power_operator = 0.0;
    double last_power_environment = 0.0;
    bool started = false;

    /// Adds the interval since the previous call using powers qd_m' tau_h and qd_s' tau_e at t.
    void accumulate(double t, double power_operator, double power_environment);
};

/// Stateful per-run monitor: owns the velocity histories needed by V3.
class LyapunovMonitor {
public:
    struct Setup {
        RobotParams dyn_master, dyn_slave;
        ObserverParams obs_master, obs_slave;
        ControllerGains gains;
        double nominal_step = 1e-3;
    };

    explicit LyapunovMonitor(Setup setup);

    /// Record the state at time s.t. tau_h / tau_e are the hand and environment
    /// joint torques acting at that instant.
    LyapunovSample observe(const SystemState& s, const Vector& tau_h, const Vector& tau_e);

    double vo_initial() const { return vo0_; }
    double decay_rate() const;  // k_r / 2 with the slower of the two observers

private:
    Setup setup_;
    HistoryBuffer vel_master_;
    HistoryBuffer vel_slave_;
    EnergyLedger ledger_;
    double vo0_ = -1.0;
    double t0_ = 0.0;
};

}  // namespace teleop
