#include "sts/linearizer.hpp"

#include <cmath>

#include "sts/model.hpp"

namespace sts {

namespace {

constexpr double kFdScale = 1e-6;

// Acceleration block of the dynamics (last three rows of f).
Vec3 accel(const Vec6& x, const ParameterVector& p, const Vec4& u) {
    return forward_dynamics(x, p, u).tail<3>();
}

}  // namespace

Mat6 dynamics_state_jacobian(const Vec6& x, const ParameterVector& p, const Vec4& u) {
    Mat6 A = Mat6::Zero();
    A.topRightCorner<3, 3>() = Mat3::Identity();
    for (int j = 0; j < 6; ++j) {
        const double h = kFdScale * std::max(1.0, std::abs(x[j]));
        Vec6 xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        A.block<3, 1>(3, j) = (accel(xp, p, u) - accel(xm, p, u)) / (2.0 * h);
    }
    return A;
}

Mat6x12 dynamics_parameter_jacobian(const Vec6& x, const ParameterVector& p, const Vec4& u) {
    Mat6x12 B1 = Mat6x12::Zero();
    for (int j = 0; j < 12; ++j) {
        const double h = kFdScale * std::max(1.0, std::abs(p[j]));
        ParameterVector pp = p, pm = p;
        pp[j] += h;
        pm[j] -= h;
        B1.block<3, 1>(3, j) = (accel(x, pp, u) - accel(x, pm, u)) / (2.0 * h);
    }
    return B1;
}

Mat6x4 dynamics_input_jacobian(const Vec6& x, const ParameterVector& p) {
    const Vec3 theta = x.head<3>();
    Mat6x4 B2 = Mat6x4::Zero();
    B2.bottomRows<3>() = mass_matrix(theta, p).llt().solve(
        generalized_force_matrix(theta, p));
    return B2;
}

Mat6 output_state_jacobian(const Vec6& x, const ParameterVector& p) {
    const Vec3 theta = x.head<3>();
    const Vec3 theta_dot = x.tail<3>();
    const Mat3 J = task_jacobian(theta, p);
    // d(J theta_dot)/dtheta equals Jdot(theta, theta_dot) because J is the
    // Jacobian of a map (mixed partials commute).
    const Mat3 Jdot = task_jacobian_dot(theta, theta_dot, p);
    Mat6 C;
    C << J, Mat3::Zero(),
         Jdot, J;
    return C;
}

Mat6x12 output_parameter_jacobian(const Vec6& x, const ParameterVector& p) {
    const Vec3 theta = x.head<3>();
    const Vec3 theta_dot = x.tail<3>();
    const LumpedConstants k = lumped_constants(p);
    const double a1 = theta[0];
    const double a12 = theta[0] + theta[1];
    const double a123 = theta[0] + theta[1] + theta[2];
    const double r1 = theta_dot[0];
    const double r12 = theta_dot[0] + theta_dot[1];
    const double r123 = theta_dot[0] + theta_dot[1] + theta_dot[2];
    const double s1 = std::sin(a1), s12 = std::sin(a12), s123 = std::sin(a123);
    const double c1 = std::cos(a1), c12 = std::cos(a12), c123 = std::cos(a123);

    // zeta depends on p only through the lumped constants:
    // D1 = (dzeta/dk) (dk/dp), with k = (k0, k1, k2, k3).
    Eigen::Matrix<double, 6, 4> dzeta_dk = Eigen::Matrix<double, 6, 4>::Zero();
    const double xc = k.k0 * (k.k1 * c1 + k.k2 * c12 + k.k3 * c123);
    const double yc = k.k0 * (k.k1 * s1 + k.k2 * s12 + k.k3 * s123);
    const double xc_dot = -k.k0 * (k.k1 * s1 * r1 + k.k2 * s12 * r12 + k.k3 * s123 * r123);
    const double yc_dot = k.k0 * (k.k1 * c1 * r1 + k.k2 * c12 * r12 + k.k3 * c123 * r123);
    dzeta_dk.row(1) << xc / k.k0, k.k0 * c1, k.k0 * c12, k.k0 * c123;
    dzeta_dk.row(2) << yc / k.k0, k.k0 * s1, k.k0 * s12, k.k0 * s123;
    dzeta_dk.row(4) << xc_dot / k.k0, -k.k0 * s1 * r1, -k.k0 * s12 * r12, -k.k0 * s123 * r123;
    dzeta_dk.row(5) << yc_dot / k.k0, k.k0 * c1 * r1, k.k0 * c12 * r12, k.k0 * c123 * r123;

    Eigen::Matrix<double, 4, 12> dk_dp = Eigen::Matrix<double, 4, 12>::Zero();
    dk_dp(0, kM1) = dk_dp(0, kM2) = dk_dp(0, kM3) = -k.k0 * k.k0;
    dk_dp(1, kM1) = p[kLc1];
    dk_dp(1, kM2) = p[kL1];
    dk_dp(1, kM3) = p[kL1];
    dk_dp(1, kL1) = p[kM2] + p[kM3];
    dk_dp(1, kLc1) = p[kM1];
    dk_dp(2, kM2) = p[kLc2];
    dk_dp(2, kM3) = p[kL2];
    dk_dp(2, kL2) = p[kM3];
    dk_dp(2, kLc2) = p[kM2];
    dk_dp(3, kM3) = p[kLc3];
    dk_dp(3, kLc3) = p[kM3];

    return dzeta_dk * dk_dp;
}

void linearize_dynamics(const ReferenceTrajectory& traj, const ParameterVector& p,
                        LtvSystem& ltv) {
    const int n = traj.size();
    ltv.times = traj.times;
    ltv.A.resize(n);
    ltv.B1.resize(n);
    ltv.B2.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec6 x = traj.x(i);
        ltv.A[i] = dynamics_state_jacobian(x, p, traj.u[i]);
        ltv.B1[i] = dynamics_parameter_jacobian(x, p, traj.u[i]);
        ltv.B2[i] = dynamics_input_jacobian(x, p);
    }
}

void linearize_outputs(const ReferenceTrajectory& traj, const ParameterVector& p,
                       LtvSystem& ltv) {
    const int n = traj.size();
    ltv.times = traj.times;
    ltv.C.resize(n);
    ltv.D1.resize(n);
    for (int i = 0; i < n; ++i) {
        const Vec6 x = traj.x(i);
        ltv.C[i] = output_state_jacobian(x, p);
        ltv.D1[i] = output_parameter_jacobian(x, p);
    }
}

LtvSystem linearize(const ReferenceTrajectory& traj, const ParameterVector& p) {
    LtvSystem ltv;
    linearize_dynamics(traj, p, ltv);
    linearize_outputs(traj, p, ltv);
    return ltv;
}

}  // namespace sts
