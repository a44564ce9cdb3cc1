#pragma once

#include "sts/types.hpp"

namespace sts {

// Gravitational acceleration (m/s^2), fixed by the model.
inline constexpr double kGravity = 9.81;

// Lumped inertial constants of the three-link chain.
// k0 = 1/(m1+m2+m3), k1 = lc1*m1 + l1*m2 + l1*m3,
// k2 = lc2*m2 + l2*m3, k3 = lc3*m3.
struct LumpedConstants {
    double k0, k1, k2, k3;
};

LumpedConstants lumped_constants(const ParameterVector& p);

// Nominal parameters and uncertainty half-widths of the benchmark subject
// (masses +-0.1 kg, inertias +-0.1 kg m^2, lengths and CoM offsets +-0.01 m,
// lc_i nominal = l_i / 2).
ParameterBox nominal_parameter_box();

// Symmetric positive definite mass matrix M(theta, p).
Mat3 mass_matrix(const Vec3& theta, const ParameterVector& p);

// Velocity-product and gravity term F(theta, theta_dot, p), so the dynamics
// read M(theta, p) theta_ddot + F(theta, theta_dot, p) = A_tau(theta, p) u.
Vec3 bias_forces(const Vec3& theta, const Vec3& theta_dot,
                 const ParameterVector& p);

// Generalized force matrix A_tau(theta, p) mapping u = [tau1 tau2 Fx Fy]
// to joint torques.
Mat34 generalized_force_matrix(const Vec3& theta, const ParameterVector& p);

// xdot = [theta_dot; M^{-1}(A_tau u - F)]. Mass matrix is solved by Cholesky.
Vec6 forward_dynamics(const Vec6& x, const ParameterVector& p,
                      const InputVector& u);

// Planar CoM position (x_CoM, y_CoM) measured from the ankle.
Vec2 com_position(const Vec3& theta, const ParameterVector& p);

// Task output zeta(x, p) = [theta2; x_CoM; y_CoM; and time derivatives].
TaskState task_outputs(const Vec6& x, const ParameterVector& p);

// Jacobian J = dz/dtheta of the position task map z = (theta2, x_CoM, y_CoM).
Mat3 task_jacobian(const Vec3& theta, const ParameterVector& p);

// Time derivative dJ/dt along theta_dot.
Mat3 task_jacobian_dot(const Vec3& theta, const Vec3& theta_dot,
                       const ParameterVector& p);

// Kinetic plus potential energy; test hook for the energy-balance invariant
// dE/dt = theta_dot' A_tau u.
double total_energy(const Vec6& x, const ParameterVector& p);

}  // namespace sts
