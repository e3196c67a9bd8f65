#include "teleop/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace teleop {

double compute_v1(const JointState& master, const JointState& slave, double p, const RobotParams& dyn_master,
                  const RobotParams& dyn_slave) {
    const Vector dq = master.q - slave.q;
    return kinetic_energy(master, dyn_master) + kinetic_energy(slave, dyn_slave) + 0.5 * p * dq.squaredNorm();
}

double compute_v3(const HistoryBuffer& velocity_history, double t, double dbar, double omega) {
    if (dbar <= 0.0) return 0.0;
    if (velocity_history.empty() || velocity_history.newest_time() < t) {
        throw StaleHistory("compute_v3: velocity history does not reach t = " + std::to_string(t));
    }
    const double a = t - dbar;
    auto integrand = [a](double xi, const Vector& v) { return (xi - a) * v.squaredNorm(); };

    // Grid: a, every stored sample strictly inside (a, t), then t.
    double prev_t = a;
    double prev_f = integrand(a, velocity_history.delayed_value(a));
    double sum = 0.0;
    for (const auto& s : velocity_history.samples()) {
        if (s.t <= a) continue;
        if (s.t > t) break;
        const double f = integrand(s.t, s.value);
        sum += 0.5 * (s.t - prev_t) * (prev_f + f);
        prev_t = s.t;
        prev_f = f;
    }
    if (prev_t < t) {
        const double f = integrand(t, velocity_history.delayed_value(t));
        sum += 0.5 * (t - prev_t) * (prev_f + f);
    }
    return omega * sum;
}

double observer_energy(const JointState& truth, const ObserverOutput& est, double r, double c_r,
                       const RobotParams& dyn) {
    const Vector eta = (truth.qdot - est.x_hat) / r;
    const double quad = eta.dot(mass_matrix(truth.q, dyn) * eta);
    const double dr = r - c_r;
    return 0.25 * (2.0 * quad + 2.0 * dr * dr + est.sigma_tilde * est.sigma_tilde);
}

double compute_vo(const SystemState& s, const ObserverOutput& est_master, const ObserverOutput& est_slave,
                  const ObserverParams& obs_master, const ObserverParams& obs_slave, const RobotParams& dyn_master,
                  const RobotParams& dyn_slave) {
    return observer_energy(s.master, est_master, s.obs_master.r, obs_master.c_r, dyn_master) +
           observer_energy(s.slave, est_slave, s.obs_slave.r, obs_slave.c_r, dyn_slave);
}

DecayCertificate decay_certificate(std::span<const double> times, std::span<const double> vo, double k_r) {
    if (times.size() != vo.size() || times.empty()) {
        throw InvalidInput("decay_certificate: need matching, non-empty series");
    }
    if (!(vo[0] > 0.0)) throw InvalidInput("decay_certificate: Vo(0) must be positive");
    DecayCertificate cert;
    cert.max_ratio = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double ratio = vo[i] * std::exp(0.5 * k_r * (times[i] - times[0])) / vo[0];
        if (ratio > cert.max_ratio || std::isnan(ratio)) {
            cert.max_ratio = ratio;
            cert.t_at_max = times[i];
        }
    }
    cert.pass = cert.max_ratio <= kDecayTolerance;
    return cert;
}

void EnergyLedger::accumulate(double t, double power_operator, double power_environment) {
    if (started) {
        const double h = t - last_t;
        work_operator += 0.5 * h * (last_power_operator + power_operator);
        work_environment += 0.5 * h * (last_power_environment + power_environment);
    }
    started = true;
    last_t = t;
    last_power_operator = power_operator;
    last_power_environment = power_environment;
}

LyapunovMonitor::LyapunovMonitor(Setup setup)
    : setup_(std::move(setup)),
      vel_master_(setup_.gains.dbar[index(Side::master)] + setup_.nominal_step, setup_.nominal_step),
      vel_slave_(setup_.gains.dbar[index(Side::slave)] + setup_.nominal_step, setup_.nominal_step) {}

double LyapunovMonitor::decay_rate() const {
    return 0.5 * std::min(setup_.obs_master.k_r, setup_.obs_slave.k_r);
}

LyapunovSample LyapunovMonitor::observe(const SystemState& s, const Vector& tau_h, const Vector& tau_e) {
    vel_master_.push_sample(s.t, s.master.qdot);
    vel_slave_.push_sample(s.t, s.slave.qdot);
    ledger_.accumulate(s.t, s.master.qdot.dot(tau_h), s.slave.qdot.dot(tau_e));

    const ObserverOutput est_m = observer_output(s.obs_master, s.master.q, setup_.obs_master);
    const ObserverOutput est_s = observer_output(s.obs_slave, s.slave.q, setup_.obs_slave);

    LyapunovSample out;
    out.t = s.t;
    out.v1 = compute_v1(s.master, s.slave, setup_.gains.p, setup_.dyn_master, setup_.dyn_slave);
    out.v3 = compute_v3(vel_master_, s.t, setup_.gains.dbar[index(Side::master)], setup_.gains.omega[index(Side::master)]) +
             compute_v3(vel_slave_, s.t, setup_.gains.dbar[index(Side::slave)], setup_.gains.omega[index(Side::slave)]);
    out.vo = compute_vo(s, est_m, est_s, setup_.obs_master, setup_.obs_slave, setup_.dyn_master, setup_.dyn_slave);
    out.work_operator = ledger_.work_operator;
    out.work_environment = ledger_.work_environment;
    out.eta_norm_master = (s.master.qdot - est_m.x_hat).norm() / s.obs_master.r;
    out.eta_norm_slave = (s.slave.qdot - est_s.x_hat).norm() / s.obs_slave.r;

    if (vo0_ < 0.0) {
        vo0_ = out.vo;
        t0_ = s.t;
    }
    if (vo0_ > 0.0) {
        out.decay_ratio = out.vo * std::exp(decay_rate() * (s.t - t0_)) / vo0_;
    } else {
        out.decay_ratio = out.vo > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    return out;
}

}  // namespace teleop
