#include "sts/model.hpp"

#include <cmath>

#include "sts/errors.hpp"

namespace sts {

LumpedConstants lumped_constants(const ParameterVector& p) {
    LumpedConstants k;
    k.k0 = 1.0 / (p[kM1] + p[kM2] + p[kM3]);
    k.k1 = p[kLc1] * p[kM1] + p[kL1] * p[kM2] + p[kL1] * p[kM3];
    k.k2 = p[kLc2] * p[kM2] + p[kL2] * p[kM3];
    k.k3 = p[kLc3] * p[kM3];
    return k;
}

ParameterBox nominal_parameter_box() {
    ParameterBox box;
    box.nominal << 9.68, 12.59, 44.57,      // m1 m2 m3
                   1.16, 0.52, 2.56,        // I1 I2 I3
                   0.53, 0.41, 0.52,        // l1 l2 l3
                   0.265, 0.205, 0.26;      // lc_i = l_i / 2
    box.half_widths << 0.1, 0.1, 0.1,
                       0.1, 0.1, 0.1,
                       0.01, 0.01, 0.01,
                       0.01, 0.01, 0.01;
    return box;
}

Mat3 mass_matrix(const Vec3& theta, const ParameterVector& p) {
    const double m1 = p[kM1], m2 = p[kM2], m3 = p[kM3];
    const double I1 = p[kI1], I2 = p[kI2], I3 = p[kI3];
    const double l1 = p[kL1], l2 = p[kL2];
    const double lc1 = p[kLc1], lc2 = p[kLc2], lc3 = p[kLc3];
    const double c2 = std::cos(theta[1]);
    const double c3 = std::cos(theta[2]);
    const double c23 = std::cos(theta[1] + theta[2]);

    const double m11 = I1 + I2 + I3 + lc1 * lc1 * m1 +
                       m2 * (l1 * l1 + 2.0 * l1 * lc2 * c2 + lc2 * lc2) +
                       m3 * (l1 * l1 + 2.0 * l1 * l2 * c2 + 2.0 * l1 * lc3 * c23 +
                             l2 * l2 + 2.0 * l2 * lc3 * c3 + lc3 * lc3);
    const double m12 = I2 + I3 + lc2 * m2 * (l1 * c2 + lc2) +
                       m3 * (l1 * l2 * c2 + l1 * lc3 * c23 + l2 * l2 +
                             2.0 * l2 * lc3 * c3 + lc3 * lc3);
    const double m13 = I3 + lc3 * m3 * (l1 * c23 + l2 * c3 + lc3);
    const double m22 = I2 + I3 + lc2 * lc2 * m2 +
                       m3 * (l2 * l2 + 2.0 * l2 * lc3 * c3 + lc3 * lc3);
    const double m23 = I3 + lc3 * m3 * (l2 * c3 + lc3);
    const double m33 = I3 + lc3 * lc3 * m3;

    Mat3 M;
    M << m11, m12, m13,
         m12, m22, m23,
         m13, m23, m33;
    return M;
}

Vec3 bias_forces(const Vec3& theta, const Vec3& theta_dot,
                 const ParameterVector& p) {
    const LumpedConstants k = lumped_constants(p);
    const double l1 = p[kL1], l2 = p[kL2];
    const double s2 = std::sin(theta[1]);
    const double s3 = std::sin(theta[2]);
    const double s23 = std::sin(theta[1] + theta[2]);
    const double a1 = theta[0];
    const double a12 = theta[0] + theta[1];
    const double a123 = theta[0] + theta[1] + theta[2];

    Mat3 omega;
    omega << l1 * (k.k2 * s2 + k.k3 * s23),
             -k.k2 * l1 * s2 + k.k3 * l2 * s3,
             -k.k3 * l1 * s23 - k.k3 * l2 * s3,
             l1 * (k.k2 * s2 + k.k3 * s23),
             k.k3 * l2 * s3,
             -k.k3 * l2 * s3,
             l1 * k.k3 * s23,
             k.k3 * l2 * s3,
             0.0;

    const double w1 = theta_dot[0];
    const double w12 = theta_dot[0] + theta_dot[1];
    const double w123 = theta_dot[0] + theta_dot[1] + theta_dot[2];
    Vec3 w(w1 * w1, w12 * w12, w123 * w123);

    Vec3 gravity;
    gravity << k.k1 * std::cos(a1) + k.k2 * std::cos(a12) + k.k3 * std::cos(a123),
               k.k2 * std::cos(a12) + k.k3 * std::cos(a123),
               k.k3 * std::cos(a123);

    return omega * w + kGravity * gravity;
}

Mat34 generalized_force_matrix(const Vec3& theta, const ParameterVector& p) {
    const double l1 = p[kL1], l2 = p[kL2], l3 = p[kL3];
    const double a1 = theta[0];
    const double a12 = theta[0] + theta[1];
    const double a123 = theta[0] + theta[1] + theta[2];
    const double s1 = std::sin(a1), s12 = std::sin(a12), s123 = std::sin(a123);
    const double c1 = std::cos(a1), c12 = std::cos(a12), c123 = std::cos(a123);

    Mat34 A;
    A << 0.0, -1.0, -l1 * s1 - l2 * s12 - l3 * s123, l1 * c1 + l2 * c12 + l3 * c123,
         0.0, -1.0, -l2 * s12 - l3 * s123,           l2 * c12 + l3 * c123,
         1.0, -1.0, -l3 * s123,                      l3 * c123;
    return A;
}

Vec6 forward_dynamics(const Vec6& x, const ParameterVector& p,
                      const InputVector& u) {
    const Vec3 theta = x.head<3>();
    const Vec3 theta_dot = x.tail<3>();
    const Mat3 M = mass_matrix(theta, p);
    const Vec3 rhs = generalized_force_matrix(theta, p) * u -
                     bias_forces(theta, theta_dot, p);
    Eigen::LLT<Mat3> llt(M);
    if (llt.info() != Eigen::Success) {
        throw Error("mass matrix is not positive definite");
    }
    Vec6 xdot;
    xdot << theta_dot, llt.solve(rhs);
    return xdot;
}

Vec2 com_position(const Vec3& theta, const ParameterVector& p) {
    const LumpedConstants k = lumped_constants(p);
    const double a1 = theta[0];
    const double a12 = theta[0] + theta[1];
    const double a123 = theta[0] + theta[1] + theta[2];
    Vec2 c;
    c << k.k0 * (k.k1 * std::cos(a1) + k.k2 * std::cos(a12) + k.k3 * std::cos(a123)),
         k.k0 * (k.k1 * std::sin(a1) + k.k2 * std::sin(a12) + k.k3 * std::sin(a123));
    return c;
}

TaskState task_outputs(const Vec6& x, const ParameterVector& p) {
    const Vec3 theta = x.head<3>();
    const Vec3 theta_dot = x.tail<3>();
    const LumpedConstants k = lumped_constants(p);
    const double a1 = theta[0];
    const double a12 = theta[0] + theta[1];
    const double a123 = theta[0] + theta[1] + theta[2];
    const double s1 = std::sin(a1), s12 = std::sin(a12), s123 = std::sin(a123);
    const double c1 = std::cos(a1), c12 = std::cos(a12), c123 = std::cos(a123);

    const double xc = k.k0 * (k.k1 * c1 + k.k2 * c12 + k.k3 * c123);
    const double yc = k.k0 * (k.k1 * s1 + k.k2 * s12 + k.k3 * s123);
    const double xc_dot = -theta_dot[0] * yc -
                          theta_dot[1] * k.k0 * (k.k2 * s12 + k.k3 * s123) -
                          theta_dot[2] * k.k0 * k.k3 * s123;
    const double yc_dot = theta_dot[0] * xc +
                          theta_dot[1] * k.k0 * (k.k2 * c12 + k.k3 * c123) +
                          theta_dot[2] * k.k0 * k.k3 * c123;

    TaskState out;
    out.z << theta[1], xc, yc;
    out.z_dot << theta_dot[1], xc_dot, yc_dot;
    return out;
}

Mat3 task_jacobian(const Vec3& theta, const ParameterVector& p) {
    const LumpedConstants k = lumped_constants(p);
    const double a1 = theta[0];
    const double a12 = theta[0] + theta[1];
    const double a123 = theta[0] + theta[1] + theta[2];
    const double s1 = std::sin(a1), s12 = std::sin(a12), s123 = std::sin(a123);
    const double c1 = std::cos(a1), c12 = std::cos(a12), c123 = std::cos(a123);

    const double xc = k.k0 * (k.k1 * c1 + k.k2 * c12 + k.k3 * c123);
    const double yc = k.k0 * (k.k1 * s1 + k.k2 * s12 + k.k3 * s123);
    const double sy2 = k.k0 * (k.k2 * s12 + k.k3 * s123);
    const double sy3 = k.k0 * k.k3 * s123;
    const double sx2 = k.k0 * (k.k2 * c12 + k.k3 * c123);
    const double sx3 = k.k0 * k.k3 * c123;

    Mat3 J;
    J << 0.0, 1.0, 0.0,
         -yc, -sy2, -sy3,
         xc, sx2, sx3;
    return J;
}

Mat3 task_jacobian_dot(const Vec3& theta, const Vec3& theta_dot,
                       const ParameterVector& p) {
    const LumpedConstants k = lumped_constants(p);
    const double a1 = theta[0];
    const double a12 = theta[0] + theta[1];
    const double a123 = theta[0] + theta[1] + theta[2];
    const double r1 = theta_dot[0];
    const double r12 = theta_dot[0] + theta_dot[1];
    const double r123 = theta_dot[0] + theta_dot[1] + theta_dot[2];
    const double s1 = std::sin(a1), s12 = std::sin(a12), s123 = std::sin(a123);
    const double c1 = std::cos(a1), c12 = std::cos(a12), c123 = std::cos(a123);

    const double xc_dot = -k.k0 * (k.k1 * s1 * r1 + k.k2 * s12 * r12 + k.k3 * s123 * r123);
    const double yc_dot = k.k0 * (k.k1 * c1 * r1 + k.k2 * c12 * r12 + k.k3 * c123 * r123);
    const double sy2_dot = k.k0 * (k.k2 * c12 * r12 + k.k3 * c123 * r123);
    const double sy3_dot = k.k0 * k.k3 * c123 * r123;
    const double sx2_dot = -k.k0 * (k.k2 * s12 * r12 + k.k3 * s123 * r123);
    const double sx3_dot = -k.k0 * k.k3 * s123 * r123;

    Mat3 Jdot;
    Jdot << 0.0, 0.0, 0.0,
            -yc_dot, -sy2_dot, -sy3_dot,
            xc_dot, sx2_dot, sx3_dot;
    return Jdot;
}

double total_energy(const Vec6& x, const ParameterVector& p) {
    const Vec3 theta = x.head<3>();
    const Vec3 theta_dot = x.tail<3>();
    const LumpedConstants k = lumped_constants(p);
    const double kinetic =
        0.5 * theta_dot.dot(mass_matrix(theta, p) * theta_dot);
    // Potential energy: (total mass) * g * y_CoM; k0 is the inverse total mass.
    const double a1 = theta[0];
    const double a12 = theta[0] + theta[1];
    const double a123 = theta[0] + theta[1] + theta[2];
    const double potential =
        kGravity * (k.k1 * std::sin(a1) + k.k2 * std::sin(a12) +
                    k.k3 * std::sin(a123));
    return kinetic + potential;
}

}  // namespace sts
