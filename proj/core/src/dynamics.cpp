#include "teleop/dynamics.hpp"

#include <cmath>
#include <string>

namespace teleop {
namespace {

void require_two_link(const RobotParams& params) {
    if (params.dof() != 2) {
        throw InvalidInput("closed-form dynamics cover 2-link arms, got " + std::to_string(params.dof()) + " links");
    }
}

void require_joint_vector(const Vector& v, const RobotParams& params, const char* what) {
    if (v.size() != params.dof()) {
        throw InvalidInput(std::string(what) + ": expected " + std::to_string(params.dof()) + " entries, got " +
                           std::to_string(v.size()));
    }
    if (!v.allFinite()) throw InvalidInput(std::string(what) + ": non-finite entry");
}

struct InertiaConstants {
    double a1, a2, a3;
};

InertiaConstants inertia_constants(const RobotParams& p) {
    const double m1 = p.link_masses[0], m2 = p.link_masses[1];
    const double l1 = p.link_lengths[0], l2 = p.link_lengths[1];
    return {(m1 + m2) * l1 * l1 + m2 * l2 * l2, m2 * l1 * l2, m2 * l2 * l2};
}

}  // namespace

void RobotParams::validate() const {
    if (link_masses.empty() || link_masses.size() > static_cast<std::size_t>(kMaxDof)) {
        throw InvalidInput("robot: link count must be within [1, " + std::to_string(kMaxDof) + "]");
    }
    if (link_lengths.size() != link_masses.size()) throw InvalidInput("robot: masses and lengths differ in length");
    for (double m : link_masses) {
        if (!(m > 0.0) || !std::isfinite(m)) throw InvalidInput("robot: link masses must be positive");
    }
    for (double l : link_lengths) {
        if (!(l > 0.0) || !std::isfinite(l)) throw InvalidInput("robot: link lengths must be positive");
    }
    if (!std::isfinite(gravity_accel)) throw InvalidInput("robot: gravity must be finite");
    if (!(lambda1 > 0.0)) throw InvalidInput("robot: lambda1 must be positive");
    if (!(lambda2 > lambda1)) throw InvalidInput("robot: lambda2 must exceed lambda1");
    if (!(c_bound > 0.0)) throw InvalidInput("robot: c_bound must be positive");
}

RobotParams RobotParams::planar_two_link() {
    RobotParams p;
    p.link_masses = {1.0, 1.5};
    p.link_lengths = {2.0, 1.0};
    p.gravity_accel = 0.0;
    p.lambda1 = 0.3;
    p.lambda2 = 20.0;
    p.c_bound = 5.0;
    return p;
}

Matrix mass_matrix(const Vector& q, const RobotParams& params) {
    require_two_link(params);
    require_joint_vector(q, params, "mass_matrix q");
    const auto [a1, a2, a3] = inertia_constants(params);
    const double c2 = std::cos(q[1]);
    Matrix m(2, 2);
    m << a1 + 2.0 * a2 * c2, a3 + a2 * c2,
         a3 + a2 * c2,       a3;
    return m;
}

std::array<Matrix, kMaxDof> mass_matrix_partials(const Vector& q, const RobotParams& params) {
    require_two_link(params);
    require_joint_vector(q, params, "mass_matrix_partials q");
    const double a2 = inertia_constants(params).a2;
    const double s2 = std::sin(q[1]);
    std::array<Matrix, kMaxDof> d;
    d[0] = Matrix::Zero(2, 2);
    d[1].resize(2, 2);
    d[1] << -2.0 * a2 * s2, -a2 * s2,
            -a2 * s2,        0.0;
    return d;
}

Matrix coriolis_matrix(const Vector& q, const Vector& qdot, const RobotParams& params) {
    require_joint_vector(qdot, params, "coriolis_matrix qdot");
    const auto dm = mass_matrix_partials(q, params);
    const int n = params.dof();
    Matrix c = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double sum = 0.0;
            for (int k = 0; k < n; ++k) {
                sum += 0.5 * (dm[k](i, j) + dm[j](i, k) - dm[i](j, k)) * qdot[k];
            }
            c(i, j) = sum;
        }
    }
    return c;
}

Matrix mass_matrix_rate(const Vector& q, const Vector& qdot, const RobotParams& params) {
    require_joint_vector(qdot, params, "mass_matrix_rate qdot");
    const auto dm = mass_matrix_partials(q, params);
    const int n = params.dof();
    Matrix md = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) md += dm[k] * qdot[k];
    return md;
}

Vector gravity_vector(const Vector& q, const RobotParams& params) {
    require_two_link(params);
    require_joint_vector(q, params, "gravity_vector q");
    const double g0 = params.gravity_accel;
    const double m1 = params.link_masses[0], m2 = params.link_masses[1];
    const double l1 = params.link_lengths[0], l2 = params.link_lengths[1];
    Vector g(2);
    if (g0 == 0.0) {
        g.setZero();
        return g;
    }
    const double c12 = std::cos(q[0] + q[1]);
    g[0] = g0 * ((m1 + m2) * l1 * std::cos(q[0]) + m2 * l2 * c12);
    g[1] = g0 * m2 * l2 * c12;
    return g;
}

Vector forward_dynamics(const JointState& state, const Vector& tau_total, const RobotParams& params) {
    require_joint_vector(tau_total, params, "forward_dynamics tau");
    const Matrix m = mass_matrix(state.q, params);
    const Matrix c = coriolis_matrix(state.q, state.qdot, params);
    const Eigen::LDLT<Matrix> ldlt(m);
    if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-10) {
        throw NumericalError("forward_dynamics: inertia matrix is ill-conditioned");
    }
    return ldlt.solve(tau_total - c * state.qdot - gravity_vector(state.q, params));
}

double kinetic_energy(const JointState& state, const RobotParams& params) {
    return 0.5 * state.qdot.dot(mass_matrix(state.q, params) * state.qdot);
}

Vector2 forward_kinematics(const Vector& q, const RobotParams& params) {
    require_joint_vector(q, params, "forward_kinematics q");
    Vector2 p = Vector2::Zero();
    double phi = 0.0;
    for (int i = 0; i < params.dof(); ++i) {
        phi += q[i];
        p += params.link_lengths[i] * Vector2(std::cos(phi), std::sin(phi));
    }
    return p;
}

TaskJacobian jacobian(const Vector& q, const RobotParams& params) {
    require_joint_vector(q, params, "jacobian q");
    const int n = params.dof();
    TaskJacobian j = TaskJacobian::Zero(2, n);
    double phi = 0.0;
    for (int i = 0; i < n; ++i) {
        phi += q[i];
        const Vector2 dlink = params.link_lengths[i] * Vector2(-std::sin(phi), std::cos(phi));
        // link i moves with every joint at or before it
        for (int k = 0; k <= i; ++k) j.col(k) += dlink;
    }
    return j;
}

}  // namespace teleop
