#pragma once

#include <cstdint>
#include <vector>

#include "sts/integrate.hpp"
#include "sts/lqr.hpp"
#include "sts/planner.hpp"
#include "sts/types.hpp"

namespace sts {

// Closed-loop nonlinear simulation under u(t) = ubar(t) - K(t)(x - xbar(t)).
struct SimulationResult {
    Eigen::VectorXd times;
    std::vector<Vec6> x;
    std::vector<Vec4> u;     // applied input at grid nodes
    std::vector<Vec6> zeta;  // task outputs at grid nodes, using the sim's p
    ParameterVector p;
};

// RK4 on the trajectory grid with stiffness-adaptive substepping; ubar,
// xbar, K are interpolated linearly at stage times. Throws DivergenceError
// when the state norm exceeds 1e6.
SimulationResult simulate_closed_loop(const Vec6& x0, const ParameterVector& p,
                                      const ReferenceTrajectory& traj,
                                      const GainSchedule& K,
                                      const SubstepPolicy& policy = {});

// n independent uniform draws from the box. Per draw the order is fixed:
// masses, inertias, lengths, then lc_i conditional on the drawn l_i
// (uniform in [l_i/2 - hw_lc, l_i/2 + hw_lc]).
std::vector<ParameterVector> sample_parameters(const ParameterBox& box, int n,
                                               std::uint64_t seed);

// End-state safety thresholds (|x_CoM(t_f)| and final CoM speed).
inline constexpr double kXComThreshold = 5e-3;   // m
inline constexpr double kSpeedThreshold = 1e-2;  // m/s

struct DrawMetrics {
    int index = -1;
    ParameterVector p;
    bool diverged = false;
    Vec6 final_zeta = Vec6::Zero();    // task outputs at t_f (draw's p)
    double final_x_com = 0.0;          // |x_CoM(t_f)|
    double final_speed = 0.0;          // |(xdot_CoM, ydot_CoM)(t_f)|
    Vec4 max_input_dev = Vec4::Zero(); // max |u - ubar| per channel

    bool passes() const {
        return !diverged && final_x_com <= kXComThreshold &&
               final_speed <= kSpeedThreshold;
    }
};

struct MonteCarloReport {
    std::vector<DrawMetrics> draws;
    std::uint64_t seed = 0;
    int n_pass_x_com = 0;
    int n_pass_speed = 0;
    int n_pass = 0;
    int n_diverged = 0;
};

// Runs simulate_closed_loop for every draw with x0 = xbar(0). Diverged draws
// are recorded as failures, not errors. Results are independent of
// `workers`.
MonteCarloReport monte_carlo(const ReferenceTrajectory& traj,
                             const GainSchedule& K, const ParameterBox& box,
                             int n, std::uint64_t seed, int workers = 1,
                             const SubstepPolicy& policy = {});

}  // namespace sts
