#include "teleop/controller.hpp"

namespace teleop {

void ControllerGains::validate() const {
    if (!(p > 0.0)) throw InvalidInput("controller: p must be positive");
    for (int i = 0; i < 2; ++i) {
        const char* side = name(static_cast<Side>(i));
        if (!(k_damp[i] > 0.0)) throw InvalidInput(std::string("controller: k_damp must be positive (") + side + ")");
        if (!(alpha[i] > 1.0)) throw InvalidInput(std::string("controller: alpha must exceed 1 (") + side + ")");
        if (!(omega[i] > 0.0)) throw InvalidInput(std::string("controller: omega must be positive (") + side + ")");
        if (!(dbar[i] >= 0.0)) throw InvalidInput(std::string("controller: dbar must be non-negative (") + side + ")");
    }
}

Vector pd_output_feedback(const Vector& q_local, const Vector& q_remote_delayed, const Vector& x_hat_local,
                          const Vector& g_local, double p, double k_damp) {
    const auto n = q_local.size();
    if (q_remote_delayed.size() != n || x_hat_local.size() != n || g_local.size() != n) {
        throw InvalidInput("pd control: argument sizes differ");
    }
    return -p * (q_local - q_remote_delayed) - k_damp * x_hat_local + g_local;
}

Vector pd_state_feedback(const Vector& q_local, const Vector& q_remote_delayed, const Vector& qdot_local,
                         const Vector& g_local, double p, double k_damp) {
    return pd_output_feedback(q_local, q_remote_delayed, qdot_local, g_local, p, k_damp);
}

GainReport verify_gain_condition(const ControllerGains& g) {
    auto rho = [&](int i) {
        const int j = 1 - i;
        return g.dbar[i] * g.omega[i] + g.dbar[j] * g.p * g.p / (4.0 * g.omega[j]) - (1.0 - 1.0 / g.alpha[i]) * g.k_damp[i];
    };
    GainReport r;
    r.rho_master = rho(index(Side::master));
    r.rho_slave = rho(index(Side::slave));
    r.satisfied = r.rho_master <= 0.0 && r.rho_slave <= 0.0;
    r.strict = r.rho_master < 0.0 && r.rho_slave < 0.0;
    return r;
}

}  // namespace teleop
