#pragma once

#include <vector>

#include "sts/integrate.hpp"
#include "sts/linearizer.hpp"

namespace sts {

// Diagonal LQR weights: state cost Q (>= 0), input cost R (> 0), terminal
// cost S (>= 0). Sizes must match the LTV system they are applied to.
struct LqrWeights {
    Eigen::VectorXd Q;
    Eigen::VectorXd R;
    Eigen::VectorXd S;

    void validate(int n_states, int n_inputs) const;  // throws DomainError
};

// Time-varying feedback schedule K(t) with the producing weights attached.
struct GainSchedule {
    Eigen::VectorXd times;
    std::vector<Eigen::MatrixXd> K;
    LqrWeights weights;

    int size() const { return static_cast<int>(times.size()); }
};

// Solves Pdot = -P A - A' P + P B2 R^{-1} B2' P - Q backward from
// P(t_f) = S, as forward RK4 in sigma = t_f - t on the grid of `ltv`, with
// linear interpolation of A and B2, per-step symmetrization, and
// stiffness-adaptive substepping (see SubstepPolicy). Throws DivergenceError
// when any |P_ij| exceeds 1e12 or P stops being finite.
std::vector<Eigen::MatrixXd> solve_riccati(const LtvSystem& ltv,
                                           const LqrWeights& w,
                                           const SubstepPolicy& policy = {});

// K(t) = R^{-1} B2'(t) P(t) at every grid point.
GainSchedule lqr_gain(const std::vector<Eigen::MatrixXd>& P,
                      const LtvSystem& ltv, const LqrWeights& w);

// All-zero schedule on the given grid (open loop); 4x6 at STS dimensions.
GainSchedule zero_gain_schedule(const Eigen::VectorXd& times, int n_inputs = 4,
                                int n_states = 6);

// Linear interpolation of the gain schedule, clamped at the grid ends.
Eigen::MatrixXd interpolate_gain(const GainSchedule& K, double t);

}  // namespace sts
