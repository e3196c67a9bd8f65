// Augmented I&I velocity observer with n+2 states per robot.
//
//   xhat      = xi + k_x(r, sigma_hat) y
//   xi_dot    = f - k_x xhat - kdot_x y
//   r_dot     = -(k_r/2)(r - c_r) + (k_r / 4 lambda1) c^2 |sigma_tilde| r
//   sigma_hat_dot = Proj(2 [xhat' f + k_sigma sigma_tilde])
//
// with f = M(y)^-1 [-C(y, xhat) xhat - g(y) + u] and sigma = ||xhat||^2.
#pragma once

#include "teleop/common.hpp"
#include "teleop/dynamics.hpp"

namespace teleop {

struct ObserverParams {
    double k_r = 0.0;      // convergence rate gain, 1/s
    double c_r = 0.0;      // floor of the dynamic scaling r
    double c = 0.0;        // Coriolis bound (RobotParams::c_bound)
    double lambda1 = 0.0;  // inertia bounds (RobotParams)
    double lambda2 = 0.0;
    double eps = 0.0;      // projection margin, 0 < eps < 1
    double alpha = 0.0;    // controller constant, > 1
    double k_damp = 0.0;   // controller damping gain k_i

    void validate() const;

    /// Pulls c, lambda1, lambda2 verbatim from the robot model.
    static ObserverParams from(const RobotParams& robot, double k_r, double c_r, double eps, double alpha,
                               double k_damp);
};

struct ObserverState {
    Vector xi;
    double r = 1.0;
    double sigma_hat = 0.0;
};

struct ObserverOutput {
    Vector x_hat;
    double sigma = 0.0;        // ||x_hat||^2
    double sigma_tilde = 0.0;  // sigma - sigma_hat
    double k_x = 0.0;
};

struct ObserverRates {
    Vector xi_dot;
    double r_dot = 0.0;
    double sigma_hat_dot = 0.0;
    double kx_dot = 0.0;
};

double gain_kx(double r, double sigma_hat, const ObserverParams& p);

double gain_ksigma(const Vector& x_hat, double r, double sigma_hat, const ObserverParams& p);

/// Projection of the sigma_hat update keeping sigma_hat >= -eps.
/// Throws InvariantViolation if sigma_hat is already below -eps.
double project(double sigma_hat, double tau_raw, double eps);

ObserverOutput observer_output(const ObserverState& state, const Vector& y, const ObserverParams& p);

/// Observer state rates. `u` must be the total torque applied to the plant
/// (control plus hand/environment torque).
ObserverRates observer_derivatives(const ObserverState& state, const Vector& y, const Vector& u,
                                   const ObserverParams& p, const RobotParams& dyn);

/// Largest decay rate of the observer's error dynamics at this state (max of
/// 2 k_sigma and k_x). Explicit integrators need step * rate below their stability limit.
double stiffness_rate(const ObserverState& state, const Vector& y, const ObserverParams& p);

}  // namespace teleop
