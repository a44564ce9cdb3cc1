#pragma once

#include <vector>

#include "sts/planner.hpp"
#include "sts/types.hpp"

namespace sts {

// Jacobian linearization along a reference trajectory:
//   delta_xdot ~= A(t) delta_x + B1(t) delta_p + B2(t) delta_u
//   delta_zeta ~= C(t) delta_x + D1(t) delta_p
// Matrices are stored per grid point; consumers interpolate linearly in t.
// Dynamic sizes so that low-dimensional test systems share the same solvers
// (6x6 / 6x12 / 6x4 / 6x6 / 6x12 at STS dimensions).
struct LtvSystem {
    Eigen::VectorXd times;
    std::vector<Eigen::MatrixXd> A;
    std::vector<Eigen::MatrixXd> B1;
    std::vector<Eigen::MatrixXd> B2;
    std::vector<Eigen::MatrixXd> C;
    std::vector<Eigen::MatrixXd> D1;

    int size() const { return static_cast<int>(times.size()); }
    double dt() const { return times[1] - times[0]; }
};

// Single-point Jacobians of forward_dynamics. The theta_dot rows are exact
// ([0 I] and 0); the acceleration rows of A and B1 use central finite
// differences with step 1e-6 * max(1, |coordinate|); B2 = [0; M^{-1} A_tau]
// is exact because the dynamics are affine in u.
Mat6 dynamics_state_jacobian(const Vec6& x, const ParameterVector& p, const Vec4& u);
Mat6x12 dynamics_parameter_jacobian(const Vec6& x, const ParameterVector& p, const Vec4& u);
Mat6x4 dynamics_input_jacobian(const Vec6& x, const ParameterVector& p);

// Single-point analytic Jacobians of the task output map zeta(x, p).
// C = [J 0; Jdot J]; D1 factors through the lumped constants (k0..k3).
Mat6 output_state_jacobian(const Vec6& x, const ParameterVector& p);
Mat6x12 output_parameter_jacobian(const Vec6& x, const ParameterVector& p);

// Grid versions; fill the corresponding members of `ltv`.
void linearize_dynamics(const ReferenceTrajectory& traj, const ParameterVector& p,
                        LtvSystem& ltv);
void linearize_outputs(const ReferenceTrajectory& traj, const ParameterVector& p,
                       LtvSystem& ltv);

// Convenience: both passes.
LtvSystem linearize(const ReferenceTrajectory& traj, const ParameterVector& p);

}  // namespace sts
