#pragma once

#include <vector>

#include "sts/integrate.hpp"
#include "sts/linearizer.hpp"
#include "sts/lqr.hpp"
#include "sts/types.hpp"

namespace sts {

// First-order lag bank W_D turning an L2 disturbance d into a modeled
// parameter deviation delta_p: A_d = -a I, B_d = I, C_d = a diag(hw) with hw
// the box half-widths, so the DC gain is diag(hw). Strictly proper (no
// feedthrough).
struct ParameterFilter {
    double a = 0.0;
    Eigen::MatrixXd A_d, B_d, C_d;
};

ParameterFilter build_parameter_filter(const ParameterBox& box, double a);

// Closed-loop dynamics extended with the filter state:
//   Abar = [A - B2 K, B1 C_d; 0, A_d],  Bbar = [0; B_d],
//   Cbar = [W_e C, W_e D1 C_d].
struct ExtendedLtv {
    Eigen::VectorXd times;
    std::vector<Eigen::MatrixXd> Abar;
    Eigen::MatrixXd Bbar;              // constant in time
    std::vector<Eigen::MatrixXd> Cbar;

    int size() const { return static_cast<int>(times.size()); }
};

ExtendedLtv assemble_extended_ltv(const LtvSystem& ltv, const GainSchedule& K,
                                  const ParameterFilter& filt,
                                  const Eigen::VectorXd& W_e);

// Finite-horizon L2-to-Euclidean gain
//   gamma = sqrt(lambda_max(Cbar(T) W_c(T) Cbar(T)'))
// with W_c the controllability Gramian, integrated forward by RK4 with
// per-step symmetrization and stiffness-adaptive substepping. T snaps to the
// nearest grid point. Throws DivergenceError on a non-finite Gramian.
double l2_to_euclidean_gain(const ExtendedLtv& ext, double T,
                            const SubstepPolicy& policy = {});

// J_RP = (1 - alpha) gamma_tm + alpha gamma_tf.
double robust_metric(double gamma_tm, double gamma_tf, double alpha);

// Gains at both horizons plus the combined metric.
struct GainReport {
    double gamma_tm = 0.0;
    double gamma_tf = 0.0;
    double alpha = 0.0;
    double t_m = 0.0;
    double t_f = 0.0;
    double J_RP = 0.0;
};

// Computes both gains in one forward Gramian pass (identical values to two
// separate l2_to_euclidean_gain calls).
GainReport evaluate_robust_performance(const ExtendedLtv& ext, double t_m,
                                       double alpha,
                                       const SubstepPolicy& policy = {});

}  // namespace sts
