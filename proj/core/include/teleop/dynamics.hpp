// Euler-Lagrange model of a planar serial revolute arm with point masses at the
// distal end of each link.
//
//   M(q) qdd + C(q, qd) qd + g(q) = u
//
// The closed-form dynamics cover the two-link case; kinematics work for any n.
#pragma once

#include "teleop/common.hpp"

#include <array>
#include <vector>

namespace teleop {

struct RobotParams {
    std::vector<double> link_masses;   // kg
    std::vector<double> link_lengths;  // m
    double gravity_accel = 0.0;        // m/s^2, 0 = horizontal plane
    double lambda1 = 0.0;              // lower inertia eigenvalue bound, kg m^2
    double lambda2 = 0.0;              // upper inertia eigenvalue bound, kg m^2
    double c_bound = 0.0;              // ||C(q,x)y|| <= c_bound ||x|| ||y||

    int dof() const { return static_cast<int>(link_masses.size()); }

    /// Throws InvalidInput when a field breaks the parameter invariants.
    void validate() const;

    /// Two-link arm used throughout the simulations (m = (1, 1.5) kg, l = (2, 1) m).
    static RobotParams planar_two_link();
};

struct JointState {
    Vector q;     // rad, on the real line (never wrapped)
    Vector qdot;  // rad/s
};

/// Inertia matrix M(q). Symmetric, eigenvalues within [lambda1, lambda2].
Matrix mass_matrix(const Vector& q, const RobotParams& params);

/// Partial derivatives dM/dq_k, k = 0..n-1.
std::array<Matrix, kMaxDof> mass_matrix_partials(const Vector& q, const RobotParams& params);

/// Coriolis/centrifugal matrix from Christoffel symbols of the first kind, so that
/// Mdot - 2C is skew-symmetric and C is linear in qdot.
Matrix coriolis_matrix(const Vector& q, const Vector& qdot, const RobotParams& params);

/// Mdot = sum_k dM/dq_k qdot_k.
Matrix mass_matrix_rate(const Vector& q, const Vector& qdot, const RobotParams& params);

/// Gravity torques for an arm moving in the vertical plane (zero when gravity_accel == 0).
Vector gravity_vector(const Vector& q, const RobotParams& params);

/// qdd = M^-1 (tau_total - C qdot - g). M is factorized numerically on every call.
Vector forward_dynamics(const JointState& state, const Vector& tau_total, const RobotParams& params);

double kinetic_energy(const JointState& state, const RobotParams& params);

/// End-effector (x, y) of the planar chain.
Vector2 forward_kinematics(const Vector& q, const RobotParams& params);

/// 2 x n derivative of forward_kinematics.
TaskJacobian jacobian(const Vector& q, const RobotParams& params);

}  // namespace teleop
