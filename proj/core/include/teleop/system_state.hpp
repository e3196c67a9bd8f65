#pragma once

#include "teleop/dynamics.hpp"
#include "teleop/observer.hpp"

namespace teleop {

/// Plant and observer states of both robots. The same type carries time
/// derivatives during integration (t then holds dt/dt = 1).
struct SystemState {
    JointState master;
    JointState slave;
    ObserverState obs_master;
    ObserverState obs_slave;
    double t = 0.0;

    JointState& joint(Side s) { return s == Side::master ? master : slave; }
    const JointState& joint(Side s) const { return s == Side::master ? master : slave; }
    ObserverState& observer(Side s) { return s == Side::master ? obs_master : obs_slave; }
    const ObserverState& observer(Side s) const { return s == Side::master ? obs_master : obs_slave; }

    bool all_finite() const;
};

SystemState operator+(const SystemState& a, const SystemState& b);
SystemState operator*(double h, const SystemState& a);

}  // namespace teleop
