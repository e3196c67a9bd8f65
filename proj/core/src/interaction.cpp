#include "teleop/interaction.hpp"

#include <cmath>

namespace teleop {

void OperatorProfile::validate() const {
    if (!std::isfinite(amplitude) || !std::isfinite(bias) || !std::isfinite(angular_freq)) {
        throw InvalidInput("operator: amplitude, bias and angular_freq must be finite");
    }
    if (std::isnan(stop_time)) throw InvalidInput("operator: stop_time is NaN");
}

void WallEnvironment::validate() const {
    if (!(stiffness >= 0.0) || !(damping >= 0.0)) throw InvalidInput("environment: stiffness and damping must be >= 0");
    if (!std::isfinite(wall_y)) throw InvalidInput("environment: wall_y must be finite");
}

Vector2 operator_force(const OperatorProfile& profile, double t) {
    if (t >= profile.stop_time) return Vector2::Zero();
    return {0.0, profile.amplitude * std::sin(profile.angular_freq * t) + profile.bias};
}

Vector2 environment_force(const WallEnvironment& env, const Vector2& ee_pos, const Vector2& ee_vel) {
    const double penetration = ee_pos.y() - env.wall_y;
    if (!(penetration > 0.0)) return Vector2::Zero();
    return {0.0, -env.stiffness * penetration - env.damping * ee_vel.y()};
}

Vector to_joint_torques(const Vector& q, const Vector2& f_task, const RobotParams& params) {
    return jacobian(q, params).transpose() * f_task;
}

}  // namespace teleop
