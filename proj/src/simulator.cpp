#include "sts/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sts/errors.hpp"
#include "sts/model.hpp"
#include "sts/parallel.hpp"
#include "sts/rng.hpp"

namespace sts {

namespace {

constexpr double kStateGuard = 1e6;

// Closed-loop vector field at fixed interval data; theta-dependent terms are
// evaluated at the actual state, references interpolated at stage time.
Vec6 closed_loop_rhs(double t, const Vec6& x, const ParameterVector& p,
                     const ReferenceTrajectory& traj,
                     const GainSchedule& gains) {
    Vec6 xbar = interpolate_state(traj, t);
    Vec4 ubar = interpolate_input(traj, t);
    Eigen::MatrixXd K = interpolate_gain(gains, t);
    Vec4 u = ubar - K * (x - xbar);
    return forward_dynamics(x, p, u);
}

}  // namespace

SimulationResult simulate_closed_loop(const Vec6& x0, const ParameterVector& p,
                                      const ReferenceTrajectory& traj,
                                      const GainSchedule& gains,
                                      const SubstepPolicy& policy) {
    const int n = traj.size();
    if (gains.times.size() != n)
        throw GridMismatchError("gain schedule grid does not match trajectory grid");
    const double dt = traj.dt();

    SimulationResult out;
    out.times = traj.times;
    out.p = p;
    out.x.resize(n);
    out.u.resize(n);
    out.zeta.resize(n);

    auto record = [&](int k, const Vec6& x) {
        Vec4 u = interpolate_input(traj, traj.times[k]) -
                 gains.K[k] * (x - traj.x(k));
        out.x[k] = x;
        out.u[k] = u;
        out.zeta[k] = task_outputs(x, p).zeta();
    };

    // Per-node stiffness rate: open-loop Jacobian at the reference plus the
    // feedback term B2*K, both with the draw's p. Each interval takes the
    // max of its endpoint rates; near t_f the terminal Riccati layer makes
    // |K| ramp by orders of magnitude within one interval, and a left-only
    // estimate under-substeps straight into RK4 instability.
    std::vector<double> rate(n);
    for (int k = 0; k < n; ++k) {
        Mat6 A = dynamics_state_jacobian(traj.x(k), p, traj.u[k]);
        Mat3 Minv =
            mass_matrix(traj.theta[k], p).llt().solve(Mat3::Identity());
        Mat6x4 B2 = Mat6x4::Zero();
        B2.bottomRows<3>() = Minv * generalized_force_matrix(traj.theta[k], p);
        rate[k] = 2.0 * (A.norm() + (B2 * gains.K[k]).norm());
    }

    Vec6 x = x0;
    record(0, x);
    auto rhs = [&](double t, const Vec6& y) {
        return closed_loop_rhs(t, y, p, traj, gains);
    };
    for (int k = 0; k + 1 < n; ++k) {
        double lambda = std::max(rate[k], rate[k + 1]);
        int m = policy.count(lambda, dt);
        double h = dt / m;
        double t = traj.times[k];
        for (int j = 0; j < m; ++j) {
            x = rk4_step(rhs, t + j * h, x, h);
            if (!x.allFinite() || x.norm() > kStateGuard)
                throw DivergenceError("closed-loop state diverged at t=" +
                                      std::to_string(t + (j + 1) * h));
        }
        record(k + 1, x);
    }
    return out;
}

std::vector<ParameterVector> sample_parameters(const ParameterBox& box, int n,
                                               std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ParameterVector> draws(n);
    for (int i = 0; i < n; ++i) {
        ParameterVector p;
        // Independent coordinates first (masses, inertias, lengths), then
        // the lc_i boxes centered on half the drawn lengths.
        for (int j = kM1; j <= kL3; ++j)
            p[j] = rng.uniform(box.nominal[j] - box.half_widths[j],
                               box.nominal[j] + box.half_widths[j]);
        for (int j = 0; j < 3; ++j) {
            double c = 0.5 * p[kL1 + j];
            double hw = box.half_widths[kLc1 + j];
            p[kLc1 + j] = rng.uniform(c - hw, c + hw);
        }
        draws[i] = p;
    }
    return draws;
}

MonteCarloReport monte_carlo(const ReferenceTrajectory& traj,
                             const GainSchedule& gains,
                             const ParameterBox& box, int n,
                             std::uint64_t seed, int workers,
                             const SubstepPolicy& policy) {
    std::vector<ParameterVector> draws = sample_parameters(box, n, seed);
    MonteCarloReport report;
    report.seed = seed;
    report.draws.resize(n);

    const Vec6 x0 = traj.x(0);
    parallel_for(n, workers, [&](int i) {
        DrawMetrics m;
        m.index = i;
        m.p = draws[i];
        try {
            SimulationResult sim =
                simulate_closed_loop(x0, draws[i], traj, gains, policy);
            const int last = traj.size() - 1;
            m.final_zeta = sim.zeta[last];
            m.final_x_com = std::abs(sim.zeta[last][1]);
            m.final_speed = std::hypot(sim.zeta[last][4], sim.zeta[last][5]);
            for (int k = 0; k < traj.size(); ++k)
                m.max_input_dev =
                    m.max_input_dev.cwiseMax((sim.u[k] - traj.u[k]).cwiseAbs());
        } catch (const DivergenceError&) {
            m.diverged = true;
        }
        report.draws[i] = m;
    });

    for (const DrawMetrics& m : report.draws) {
        if (m.diverged) {
            ++report.n_diverged;
            continue;
        }
        if (m.final_x_com <= kXComThreshold) ++report.n_pass_x_com;
        if (m.final_speed <= kSpeedThreshold) ++report.n_pass_speed;
        if (m.passes()) ++report.n_pass;
    }
    return report;
}

}  // namespace sts
