// Reference computations shared by unit and acceptance tests. Everything here
// is written independently of the library code it checks.
#pragma once

#include "teleop/dynamics.hpp"
#include "teleop/integrator.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace teleop::testing {

inline RobotParams two_link() { return RobotParams::planar_two_link(); }

/// Closed-form inertia of the two-link point-mass arm.
inline Eigen::Matrix2d inertia_oracle(double q2, double m1 = 1.0, double m2 = 1.5, double l1 = 2.0, double l2 = 1.0) {
    const double a1 = (m1 + m2) * l1 * l1 + m2 * l2 * l2;
    const double a2 = m2 * l1 * l2;
    const double a3 = m2 * l2 * l2;
    const double c = std::cos(q2);
    Eigen::Matrix2d m;
    m << a1 + 2 * a2 * c, a3 + a2 * c, a3 + a2 * c, a3;
    return m;
}

inline Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

/// Plant-only state used for integrator studies without the teleoperation loop.
struct PlantState {
    Vector q;
    Vector qd;
};

inline PlantState operator+(const PlantState& a, const PlantState& b) { return {a.q + b.q, a.qd + b.qd}; }
inline PlantState operator*(double h, const PlantState& a) { return {h * a.q, h * a.qd}; }

/// Integrates M qdd + C qd = tau(t) with fixed-step RK4 and returns the final state.
inline PlantState integrate_plant(const RobotParams& robot, PlantState x, double t_end, double h,
                                  const std::function<Vector(double)>& tau) {
    const long steps = std::lround(t_end / h);
    auto f = [&](double t, const PlantState& s) {
        return PlantState{s.qd, forward_dynamics({s.q, s.qd}, tau(t), robot)};
    };
    for (long k = 0; k < steps; ++k) x = rk4_step(x, static_cast<double>(k) * h, h, f);
    return x;
}

struct ConvergenceStudy {
    double err_coarse = 0.0;  // |x(h) - x(h/2)|
    double err_fine = 0.0;    // |x(h/2) - x(h/4)|
    double order = 0.0;       // log2(err_coarse / err_fine)
};

/// Self-convergence of RK4 on the undelayed plant under a smooth torque.
inline ConvergenceStudy rk4_self_convergence(double h = 0.02, double t_end = 4.0) {
    const RobotParams robot = two_link();
    auto tau = [](double t) { return vec({2.0 * std::sin(1.3 * t), 0.7 * std::cos(0.9 * t)}); };
    const PlantState x0{vec({0.3, -0.4}), vec({0.5, 1.0})};
    auto run = [&](double step) {
        const PlantState x = integrate_plant(robot, x0, t_end, step, tau);
        Eigen::Matrix<double, 4, 1> z;
        z << x.q, x.qd;
        return z;
    };
    const auto a = run(h), b = run(h / 2), c = run(h / 4);
    ConvergenceStudy s;
    s.err_coarse = (a - b).norm();
    s.err_fine = (b - c).norm();
    s.order = std::log2(s.err_coarse / s.err_fine);
    return s;
}

/// Direct evaluation of w * int_{-d}^0 int_{t+theta}^t |v(xi)|^2 dxi dtheta with
/// nested Gauss-Legendre quadrature (no order swap).
inline double v3_double_integral(const std::function<double(double)>& speed_sq, double t, double d, double w) {
    static constexpr double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                    0.9061798459386640};
    static constexpr double wt[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889, 0.4786286704993665,
                                     0.2369268850561891};
    auto gauss = [&](const std::function<double(double)>& f, double a, double b, int panels) {
        double sum = 0.0;
        const double hp = (b - a) / panels;
        for (int p = 0; p < panels; ++p) {
            const double lo = a + p * hp;
            for (int k = 0; k < 5; ++k) sum += 0.5 * hp * wt[k] * f(lo + 0.5 * hp * (x[k] + 1.0));
        }
        return sum;
    };
    auto inner = [&](double theta) { return gauss(speed_sq, t + theta, t, 16); };
    return w * gauss(inner, -d, 0.0, 16);
}

inline std::mt19937_64 rng(std::uint64_t seed = 20240531) { return std::mt19937_64(seed); }

}  // namespace teleop::testing
