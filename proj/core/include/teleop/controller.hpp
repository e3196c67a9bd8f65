#pragma once

#include "teleop/common.hpp"

#include <array>

namespace teleop {

/// P+d gains. Per-robot arrays are indexed by index(Side).
struct ControllerGains {
    double p = 0.0;                     // proportional coupling, N m/rad
    std::array<double, 2> k_damp{};     // damping injection, N m s/rad
    std::array<double, 2> alpha{};      // > 1, splits damping between velocity and estimate error
    std::array<double, 2> omega{};      // weights of the delay energy term
    std::array<double, 2> dbar{};       // delay bounds: dbar[master] bounds the master->slave delay

    void validate() const;
};

/// Output-feedback P+d: tau = -p (q - q_remote_delayed) - k x_hat + g.
Vector pd_output_feedback(const Vector& q_local, const Vector& q_remote_delayed, const Vector& x_hat_local,
                          const Vector& g_local, double p, double k_damp);

/// Same law driven by the measured velocity.
Vector pd_state_feedback(const Vector& q_local, const Vector& q_remote_delayed, const Vector& qdot_local,
                         const Vector& g_local, double p, double k_damp);

struct GainReport {
    double rho_master = 0.0;
    double rho_slave = 0.0;
    bool satisfied = false;  // rho <= 0 on both sides
    bool strict = false;     // rho < 0 on both sides (needed for square-integrable velocities)
};

/// Damping margins rho_i = dbar_i w_i + dbar_j p^2 / (4 w_j) - (1 - 1/alpha_i) k_i.
GainReport verify_gain_condition(const ControllerGains& gains);

}  // namespace teleop
