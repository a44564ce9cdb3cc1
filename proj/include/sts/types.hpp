#pragma once

#include <Eigen/Dense>

namespace sts {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec12 = Eigen::Matrix<double, 12, 1>;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Mat6x12 = Eigen::Matrix<double, 6, 12>;
using Mat6x4 = Eigen::Matrix<double, 6, 4>;

// Physical parameter vector p = [m1 m2 m3 I1 I2 I3 l1 l2 l3 lc1 lc2 lc3]:
// link masses (kg), moments of inertia (kg m^2), link lengths (m), and
// joint-to-CoM distances (m), in this exact order.
using ParameterVector = Vec12;

// Indices into ParameterVector.
enum ParameterIndex {
    kM1 = 0, kM2, kM3,
    kI1, kI2, kI3,
    kL1, kL2, kL3,
    kLc1, kLc2, kLc3,
};

// Axis-aligned uncertainty box around a nominal parameter vector. The lc_i
// bounds are centered at l_i / 2, which equals the nominal lc_i.
struct ParameterBox {
    ParameterVector nominal;
    ParameterVector half_widths;  // nonnegative

    ParameterVector p_min() const { return nominal - half_widths; }
    ParameterVector p_max() const { return nominal + half_widths; }
};

// Joint-space state x = [theta; theta_dot], angles in radians.
struct JointState {
    Vec3 theta;
    Vec3 theta_dot;

    Vec6 as_vector() const {
        Vec6 x;
        x << theta, theta_dot;
        return x;
    }
    static JointState from_vector(const Vec6& x) {
        return JointState{x.head<3>(), x.tail<3>()};
    }
};

// Input u = [tau1 (hip torque, N m); tau2 (shoulder torque, N m);
//            Fx, Fy (shoulder forces, N)].
using InputVector = Vec4;

// Task-space output z = [theta2; x_CoM; y_CoM] and its time derivative.
struct TaskState {
    Vec3 z;
    Vec3 z_dot;

    Vec6 zeta() const {
        Vec6 out;
        out << z, z_dot;
        return out;
    }
};

}  // namespace sts
