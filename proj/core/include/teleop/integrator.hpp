#pragma once

namespace teleop {

/// Classical fourth-order Runge-Kutta step. `State` needs `State + State` and
/// `double * State`; `f(t, x)` returns the time derivative as a State.
template <typename State, typename Rhs>
State rk4_step(const State& x, double t, double h, Rhs&& f) {
    const State k1 = f(t, x);
    const State k2 = f(t + 0.5 * h, State(x + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(x + (0.5 * h) * k2));
    const State k4 = f(t + h, State(x + h * k3));
    return State(x + (h / 6.0) * State(k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace teleop
