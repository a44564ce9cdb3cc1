#pragma once

#include <algorithm>
#include <cmath>

namespace sts {

// One classic Runge-Kutta 4 step for y' = f(t, y). State must support
// scalar multiplication and addition (doubles and Eigen types both do).
template <class State, class Rhs>
State rk4_step(Rhs&& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, State(y + (0.5 * h) * k1));
    const State k3 = f(t + 0.5 * h, State(y + (0.5 * h) * k2));
    const State k4 = f(t + h, State(y + h * k3));
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Numeric policy for stiffness-adaptive substepping of explicit RK4 on a
// fixed output grid: a grid interval of length dt is split into
// ceil(lambda * dt / target) equal substeps, clamped to [1, cap]. lambda is
// a per-interval estimate of the fastest local rate (spectral abscissa
// magnitude); target keeps lambda * h inside the RK4 stability region with
// margin. Integrations that still blow up under the cap are reported through
// the caller's divergence guard.
struct SubstepPolicy {
    double target = 1.5;
    int cap = 4096;

    int count(double lambda, double dt) const {
        if (!(lambda > 0.0)) return 1;
        const double n = std::ceil(lambda * dt / target);
        if (n >= static_cast<double>(cap)) return cap;
        return std::max(1, static_cast<int>(n));
    }
};

}  // namespace sts
