// Operator and environment forces. Both act along the task-space y axis.
#pragma once

#include "teleop/common.hpp"
#include "teleop/dynamics.hpp"

#include <limits>

namespace teleop {

/// F_y(t) = amplitude sin(angular_freq t) + bias until stop_time, zero afterwards.
struct OperatorProfile {
    double amplitude = 0.0;     // N
    double bias = 0.0;          // N
    double angular_freq = 0.0;  // rad/s
    double stop_time = std::numeric_limits<double>::infinity();

    void validate() const;
};

/// Spring-damper wall occupying y > wall_y.
struct WallEnvironment {
    double stiffness = 0.0;  // N/m
    double damping = 0.0;    // N s/m
    double wall_y = 0.0;     // m

    void validate() const;
};

Vector2 operator_force(const OperatorProfile& profile, double t);

Vector2 environment_force(const WallEnvironment& env, const Vector2& ee_pos, const Vector2& ee_vel);

/// tau = J(q)^T F.
Vector to_joint_torques(const Vector& q, const Vector2& f_task, const RobotParams& params);

}  // namespace teleop
