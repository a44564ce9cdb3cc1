#include "sts/planner.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sts/errors.hpp"
#include "sts/model.hpp"

namespace sts {

namespace {

constexpr double kNewtonTol = 1e-10;
constexpr int kNewtonMaxIter = 50;
constexpr double kSingularDetTol = 1e-8;

// CoM residual and its 2x2 Jacobian in (theta1, theta3) with theta2 fixed.
Vec2 com_residual(const Vec3& theta, const Vec3& z, const ParameterVector& p) {
    return com_position(theta, p) - Vec2(z[1], z[2]);
}

Mat2 com_jacobian_13(const Vec3& theta, const ParameterVector& p) {
    const Mat3 J = task_jacobian(theta, p);
    Mat2 J2;
    J2 << J(1, 0), J(1, 2),
          J(2, 0), J(2, 2);
    return J2;
}

}  // namespace

void ManeuverSpec::validate() const {
    if (!(t_f > 0.0)) throw DomainError("maneuver horizon t_f must be positive");
    if (grid_points < 2) throw DomainError("maneuver grid needs at least 2 points");
    if (!theta0.allFinite() || !z_final.allFinite()) {
        throw DomainError("maneuver boundary values must be finite");
    }
    const bool vertical = std::abs(theta0[0] - std::numbers::pi / 2.0) < 1e-9 &&
                          std::abs(theta0[1]) < 1e-9 && std::abs(theta0[2]) < 1e-9;
    if (vertical) throw DomainError("initial configuration is the vertical singularity");
}

void AllocationSpec::validate() const {
    if (!(W_u.array() > 0.0).all()) {
        throw DomainError("allocation weights must be positive");
    }
    if (!(u_min.array() <= u_max.array()).all()) {
        throw DomainError("allocation bounds require u_min <= u_max");
    }
}

Blend blend_polynomial(double t, double t_f) {
    if (!(t >= 0.0 && t <= t_f)) {
        throw DomainError("blend time outside [0, t_f]");
    }
    const double s = t / t_f;
    Blend b;
    b.phi = (-2.0 * s + 3.0) * s * s;
    b.phi_dot = (-6.0 * s + 6.0) * s / t_f;
    b.phi_ddot = (-12.0 * s + 6.0) / (t_f * t_f);
    return b;
}

TaskReference task_reference(const ManeuverSpec& spec, const ParameterVector& p) {
    spec.validate();
    const int n = spec.grid_points;
    Vec6 x0;
    x0 << spec.theta0, Vec3::Zero();
    const Vec3 z0 = task_outputs(x0, p).z;
    const Vec3 dz = spec.z_final - z0;

    TaskReference ref;
    ref.times = Eigen::VectorXd::LinSpaced(n, 0.0, spec.t_f);
    ref.z.resize(n);
    ref.z_dot.resize(n);
    ref.z_ddot.resize(n);
    for (int i = 0; i < n; ++i) {
        const Blend b = blend_polynomial(ref.times[i], spec.t_f);
        ref.z[i] = z0 + b.phi * dz;
        ref.z_dot[i] = b.phi_dot * dz;
        ref.z_ddot[i] = b.phi_ddot * dz;
    }
    return ref;
}

Vec3 solve_task_angles(const Vec3& z, const Vec3& guess, const ParameterVector& p) {
    Vec3 theta = guess;
    theta[1] = z[0];
    Vec2 r = com_residual(theta, z, p);
    for (int it = 0; it < kNewtonMaxIter; ++it) {
        if (r.norm() < kNewtonTol) return theta;
        const Mat2 J2 = com_jacobian_13(theta, p);
        if (std::abs(J2.determinant()) < kSingularDetTol) {
            throw SingularityError("task map singular while solving for joint angles");
        }
        const Vec2 step = J2.lu().solve(-r);
        // Backtracking line search; fall back to the full step if no
        // contraction is found (keeps Newton moving near inflections).
        double lambda = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls) {
            Vec3 cand = theta;
            cand[0] += lambda * step[0];
            cand[2] += lambda * step[1];
            const Vec2 rc = com_residual(cand, z, p);
            if (rc.norm() < r.norm()) {
                theta = cand;
                r = rc;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            theta[0] += step[0];
            theta[2] += step[1];
            r = com_residual(theta, z, p);
        }
    }
    if (r.norm() < kNewtonTol) return theta;
    throw UnreachableTargetError("joint solution did not converge in 50 iterations");
}

JointReference task_to_joint(const TaskReference& task, const Vec3& theta0,
                             const ParameterVector& p) {
    const int n = static_cast<int>(task.times.size());
    JointReference joint;
    joint.times = task.times;
    joint.theta.resize(n);
    joint.theta_dot.resize(n);
    joint.theta_ddot.resize(n);

    Vec3 guess = theta0;
    for (int i = 0; i < n; ++i) {
        Vec3 theta;
        try {
            theta = solve_task_angles(task.z[i], guess, p);
        } catch (const Error& e) {
            throw UnreachableTargetError("grid point " + std::to_string(i) + ": " + e.what());
        }
        guess = theta;

        const Mat3 J = task_jacobian(theta, p);
        if (std::abs(J.determinant()) < kSingularDetTol) {
            throw SingularityError("task Jacobian singular at grid point " + std::to_string(i));
        }
        const Eigen::PartialPivLU<Mat3> lu = J.lu();
        const Vec3 theta_dot = lu.solve(task.z_dot[i]);
        const Mat3 Jdot = task_jacobian_dot(theta, theta_dot, p);
        joint.theta[i] = theta;
        joint.theta_dot[i] = theta_dot;
        joint.theta_ddot[i] = lu.solve(task.z_ddot[i] - Jdot * theta_dot);
    }
    return joint;
}

Vec4 solve_allocation_qp(const Mat34& A, const Vec3& b, const AllocationSpec& alloc) {
    alloc.validate();
    // Exhaustive enumeration over active-set sign patterns of the finite
    // bounds. The cost is strictly convex, so the cheapest primal-feasible
    // KKT point over all patterns is the unique global optimum.
    enum State { kFree = 0, kAtLower = 1, kAtUpper = 2 };
    const Vec4 w2 = alloc.W_u.array().square();

    Vec4 best = Vec4::Zero();
    double best_cost = std::numeric_limits<double>::infinity();
    bool found = false;

    for (int code = 0; code < 81; ++code) {
        int digits[4];
        int c = code;
        bool valid = true;
        for (int i = 0; i < 4; ++i) {
            digits[i] = c % 3;
            c /= 3;
            if (digits[i] == kAtLower && !std::isfinite(alloc.u_min[i])) valid = false;
            if (digits[i] == kAtUpper && !std::isfinite(alloc.u_max[i])) valid = false;
        }
        if (!valid) continue;

        Vec4 xi = Vec4::Zero();
        Vec3 rhs = b;
        int free_idx[4];
        int n_free = 0;
        for (int i = 0; i < 4; ++i) {
            if (digits[i] == kFree) {
                free_idx[n_free++] = i;
            } else {
                xi[i] = digits[i] == kAtLower ? alloc.u_min[i] : alloc.u_max[i];
                rhs -= xi[i] * A.col(i);
            }
        }

        if (n_free > 0) {
            // Minimize over the free block via the dual:
            // xi_f = Wf^{-2} Af' lambda with (Af Wf^{-2} Af') lambda = rhs.
            Eigen::MatrixXd Af(3, n_free);
            Eigen::VectorXd winv2(n_free);
            for (int j = 0; j < n_free; ++j) {
                Af.col(j) = A.col(free_idx[j]);
                winv2[j] = 1.0 / w2[free_idx[j]];
            }
            const Eigen::MatrixXd G = Af * winv2.asDiagonal() * Af.transpose();
            const Eigen::VectorXd lambda =
                G.completeOrthogonalDecomposition().solve(rhs);
            const Eigen::VectorXd xif =
                winv2.asDiagonal() * Af.transpose() * lambda;
            for (int j = 0; j < n_free; ++j) xi[free_idx[j]] = xif[j];
        }

        if ((A * xi - b).norm() > 1e-9) continue;
        bool feasible = true;
        for (int i = 0; i < 4; ++i) {
            if (xi[i] < alloc.u_min[i] || xi[i] > alloc.u_max[i]) feasible = false;
        }
        if (!feasible) continue;

        const double cost = 0.5 * (alloc.W_u.array() * xi.array()).matrix().squaredNorm();
        if (cost < best_cost) {
            best_cost = cost;
            best = xi;
            found = true;
        }
    }

    if (!found) {
        throw AllocationInfeasibleError("allocation box excludes the equality manifold");
    }
    return best;
}

Vec4 allocate_input(const Vec3& theta, const Vec3& theta_dot,
                    const Vec3& theta_ddot, const ParameterVector& p,
                    const AllocationSpec& alloc) {
    const Vec3 b = mass_matrix(theta, p) * theta_ddot + bias_forces(theta, theta_dot, p);
    return solve_allocation_qp(generalized_force_matrix(theta, p), b, alloc);
}

ReferenceTrajectory build_reference(const ManeuverSpec& spec,
                                    const AllocationSpec& alloc,
                                    const ParameterVector& p) {
    const TaskReference task = task_reference(spec, p);
    const JointReference joint = task_to_joint(task, spec.theta0, p);
    const int n = spec.grid_points;

    ReferenceTrajectory traj;
    traj.times = task.times;
    traj.theta = joint.theta;
    traj.theta_dot = joint.theta_dot;
    traj.theta_ddot = joint.theta_ddot;
    traj.z = task.z;
    traj.z_dot = task.z_dot;
    traj.z_ddot = task.z_ddot;
    traj.u.resize(n);
    for (int i = 0; i < n; ++i) {
        try {
            traj.u[i] = allocate_input(joint.theta[i], joint.theta_dot[i],
                                       joint.theta_ddot[i], p, alloc);
        } catch (const Error& e) {
            throw AllocationInfeasibleError("grid point " + std::to_string(i) + ": " + e.what());
        }
    }
    return traj;
}

namespace {

// Uniform-grid linear interpolation with clamping at both ends.
template <class Container>
auto interp_grid(const Eigen::VectorXd& times, const Container& values, double t)
    -> typename Container::value_type {
    const int n = static_cast<int>(times.size());
    if (t <= times[0]) return values[0];
    if (t >= times[n - 1]) return values[n - 1];
    const double dt = times[1] - times[0];
    int k = static_cast<int>((t - times[0]) / dt);
    if (k > n - 2) k = n - 2;
    const double s = (t - times[k]) / dt;
    return (1.0 - s) * values[k] + s * values[k + 1];
}

}  // namespace

Vec6 interpolate_state(const ReferenceTrajectory& traj, double t) {
    const int n = traj.size();
    auto at = [&](int i) { return traj.x(i); };
    if (t <= traj.times[0]) return at(0);
    if (t >= traj.times[n - 1]) return at(n - 1);
    const double dt = traj.dt();
    int k = static_cast<int>((t - traj.times[0]) / dt);
    if (k > n - 2) k = n - 2;
    const double s = (t - traj.times[k]) / dt;
    return (1.0 - s) * at(k) + s * at(k + 1);
}

Vec4 interpolate_input(const ReferenceTrajectory& traj, double t) {
    return interp_grid(traj.times, traj.u, t);
}

}  // namespace sts
