#include "teleop/system_state.hpp"

#include <cmath>

namespace teleop {
namespace {

JointState add(const JointState& a, const JointState& b) { return {a.q + b.q, a.qdot + b.qdot}; }
JointState scale(double h, const JointState& a) { return {h * a.q, h * a.qdot}; }

ObserverState add(const ObserverState& a, const ObserverState& b) {
    return {a.xi + b.xi, a.r + b.r, a.sigma_hat + b.sigma_hat};
}
ObserverState scale(double h, const ObserverState& a) { return {h * a.xi, h * a.r, h * a.sigma_hat}; }

}  // namespace

bool SystemState::all_finite() const {
    return master.q.allFinite() && master.qdot.allFinite() && slave.q.allFinite() && slave.qdot.allFinite() &&
           obs_master.xi.allFinite() && obs_slave.xi.allFinite() && std::isfinite(obs_master.r) &&
           std::isfinite(obs_slave.r) && std::isfinite(obs_master.sigma_hat) && std::isfinite(obs_slave.sigma_hat) &&
           std::isfinite(t);
}

SystemState operator+(const SystemState& a, const SystemState& b) {
    return {add(a.master, b.master), add(a.slave, b.slave), add(a.obs_master, b.obs_master),
            add(a.obs_slave, b.obs_slave), a.t + b.t};
}

SystemState operator*(double h, const SystemState& a) {
    return {scale(h, a.master), scale(h, a.slave), scale(h, a.obs_master), scale(h, a.obs_slave), h * a.t};
}

}  // namespace teleop
