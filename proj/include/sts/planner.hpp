#pragma once

#include <limits>
#include <vector>

#include "sts/types.hpp"

namespace sts {

// Boundary data of a rest-to-rest maneuver: initial joint configuration,
// final task-space target z_final = [theta2(t_f); x_CoM(t_f); y_CoM(t_f)],
// horizon, and output grid size.
struct ManeuverSpec {
    Vec3 theta0;
    Vec3 z_final;
    double t_f = 3.5;
    int grid_points = 701;

    void validate() const;  // throws DomainError
};

// Weighted least-squares allocation setup: minimize 0.5 |W_u xi|^2 subject
// to the torque equality and the box u_min <= xi <= u_max (+-infinity means
// unconstrained).
struct AllocationSpec {
    Vec4 W_u = Vec4::Ones();
    Vec4 u_min = Vec4::Constant(-std::numeric_limits<double>::infinity());
    Vec4 u_max = Vec4::Constant(std::numeric_limits<double>::infinity());

    void validate() const;  // throws DomainError
};

// Cubic blend Phi(t, t_f) = -2 t^3/t_f^3 + 3 t^2/t_f^2 and derivatives.
struct Blend {
    double phi, phi_dot, phi_ddot;
};

Blend blend_polynomial(double t, double t_f);

// Task-space reference on a uniform grid.
struct TaskReference {
    Eigen::VectorXd times;
    std::vector<Vec3> z, z_dot, z_ddot;
};

TaskReference task_reference(const ManeuverSpec& spec, const ParameterVector& p);

// Joint-space lift of a task reference.
struct JointReference {
    Eigen::VectorXd times;
    std::vector<Vec3> theta, theta_dot, theta_ddot;
};

// Solves the CoM position equations for (theta1, theta3) with theta2 = z[0]
// fixed, by damped Newton from `guess`. Tolerance 1e-10 on the CoM residual.
Vec3 solve_task_angles(const Vec3& z, const Vec3& guess, const ParameterVector& p);

// Maps the task reference to joint space point by point, using the previous
// grid point as the Newton initial guess (continuation); derivatives lifted
// through the analytic Jacobian: theta_dot = J^{-1} z_dot,
// theta_ddot = J^{-1}(z_ddot - Jdot theta_dot).
JointReference task_to_joint(const TaskReference& task, const Vec3& theta0,
                             const ParameterVector& p);

// Solves min 0.5 |W_u xi|^2 s.t. A xi = b, u_min <= xi <= u_max by exhaustive
// active-set enumeration over the finite bounds. Throws
// AllocationInfeasibleError when no sign pattern yields a feasible KKT point.
Vec4 solve_allocation_qp(const Mat34& A, const Vec3& b, const AllocationSpec& alloc);

// Allocates the inverse-dynamics torque M theta_ddot + F at one sample.
Vec4 allocate_input(const Vec3& theta, const Vec3& theta_dot,
                    const Vec3& theta_ddot, const ParameterVector& p,
                    const AllocationSpec& alloc);

// Complete reference trajectory: task, joint, and input histories on a
// shared uniform grid.
struct ReferenceTrajectory {
    Eigen::VectorXd times;
    std::vector<Vec3> theta, theta_dot, theta_ddot;
    std::vector<Vec4> u;
    std::vector<Vec3> z, z_dot, z_ddot;

    int size() const { return static_cast<int>(times.size()); }
    double dt() const { return times[1] - times[0]; }
    Vec6 x(int i) const {
        Vec6 out;
        out << theta[i], theta_dot[i];
        return out;
    }
};

ReferenceTrajectory build_reference(const ManeuverSpec& spec,
                                    const AllocationSpec& alloc,
                                    const ParameterVector& p);

// Linear interpolation helpers over a uniform grid; t clamps to the ends.
Vec6 interpolate_state(const ReferenceTrajectory& traj, double t);
Vec4 interpolate_input(const ReferenceTrajectory& traj, double t);

}  // namespace sts
