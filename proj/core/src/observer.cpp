#include "teleop/observer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace teleop {

void ObserverParams::validate() const {
    if (!(k_r > 0.0)) throw InvalidInput("observer: k_r must be positive");
    if (!(c_r > 0.0)) throw InvalidInput("observer: c_r must be positive");
    if (!(c > 0.0)) throw InvalidInput("observer: c must be positive");
    if (!(lambda1 > 0.0)) throw InvalidInput("observer: lambda1 must be positive");
    if (!(lambda2 >= lambda1)) throw InvalidInput("observer: lambda2 must be at least lambda1");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("observer: eps must lie in (0, 1)");
    if (!(alpha > 1.0)) throw InvalidInput("observer: alpha must exceed 1");
    if (!(k_damp > 0.0)) throw InvalidInput("observer: k_damp must be positive");
}

ObserverParams ObserverParams::from(const RobotParams& robot, double k_r, double c_r, double eps, double alpha,
                                    double k_damp) {
    ObserverParams p;
    p.k_r = k_r;
    p.c_r = c_r;
    p.c = robot.c_bound;
    p.lambda1 = robot.lambda1;
    p.lambda2 = robot.lambda2;
    p.eps = eps;
    p.alpha = alpha;
    p.k_damp = k_damp;
    return p;
}

double gain_kx(double r, double sigma_hat, const ObserverParams& p) {
    return (2.0 / p.k_r + 0.25 * p.k_r * (3.0 * p.lambda2 + p.c * p.c * sigma_hat) + 0.25 * p.alpha * p.k_damp * r * r) /
           p.lambda1;
}

double gain_ksigma(const Vector& x_hat, double r, double sigma_hat, const ObserverParams& p) {
    const double c2 = p.c * p.c;
    const double kx = gain_kx(r, sigma_hat, p);
    const double r2 = r * r;
    return (p.k_r / 16.0) *
           (c2 * c2 * r2 / (p.lambda1 * p.lambda1) + 4.0 * kx * kx * x_hat.squaredNorm() * r2 + 2.0);
}

double project(double sigma_hat, double tau_raw, double eps) {
    if (sigma_hat < -eps) {
        throw InvariantViolation("projection: sigma_hat = " + std::to_string(sigma_hat) + " is below -eps = " +
                                 std::to_string(-eps));
    }
    if (sigma_hat > 0.0 || tau_raw >= 0.0) return tau_raw;
    const double c_sigma = std::min(1.0, -sigma_hat / eps);
    return (1.0 - c_sigma) * tau_raw;
}

ObserverOutput observer_output(const ObserverState& state, const Vector& y, const ObserverParams& p) {
    ObserverOutput out;
    out.k_x = gain_kx(state.r, state.sigma_hat, p);
    out.x_hat = state.xi + out.k_x * y;
    out.sigma = out.x_hat.squaredNorm();
    out.sigma_tilde = out.sigma - state.sigma_hat;
    return out;
}

ObserverRates observer_derivatives(const ObserverState& state, const Vector& y, const Vector& u,
                                   const ObserverParams& p, const RobotParams& dyn) {
    const ObserverOutput out = observer_output(state, y, p);
    const Vector f = forward_dynamics(JointState{y, out.x_hat}, u, dyn);

    ObserverRates rates;
    // Order matters: kdot_x consumes r_dot and sigma_hat_dot.
    const double k_sigma = gain_ksigma(out.x_hat, state.r, state.sigma_hat, p);
    rates.sigma_hat_dot = project(state.sigma_hat, 2.0 * (out.x_hat.dot(f) + k_sigma * out.sigma_tilde), p.eps);
    rates.r_dot = -0.5 * p.k_r * (state.r - p.c_r) +
                  (p.k_r / (4.0 * p.lambda1)) * p.c * p.c * std::abs(out.sigma_tilde) * state.r;
    rates.kx_dot = (2.0 * p.alpha * p.k_damp * state.r * rates.r_dot + p.k_r * p.c * p.c * rates.sigma_hat_dot) /
                   (4.0 * p.lambda1);
    rates.xi_dot = f - out.k_x * out.x_hat - rates.kx_dot * y;
    return rates;
}

double stiffness_rate(const ObserverState& state, const Vector& y, const ObserverParams& p) {
    const ObserverOutput out = observer_output(state, y, p);
    return std::max(2.0 * gain_ksigma(out.x_hat, state.r, state.sigma_hat, p), out.k_x);
}

}  // namespace teleop
