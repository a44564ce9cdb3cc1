#include "sts/lqr.hpp"

#include <cmath>
#include <string>

#include "sts/errors.hpp"

namespace sts {

namespace {

constexpr double kDivergenceGuard = 1e12;

}  // namespace

void LqrWeights::validate(int n_states, int n_inputs) const {
    if (Q.size() != n_states || S.size() != n_states || R.size() != n_inputs) {
        throw DomainError("LQR weight sizes do not match the system");
    }
    if ((Q.array() < 0.0).any() || (S.array() < 0.0).any()) {
        throw DomainError("Q and S diagonals must be nonnegative");
    }
    if (!(R.array() > 0.0).all()) {
        throw DomainError("R diagonal must be positive");
    }
}

std::vector<Eigen::MatrixXd> solve_riccati(const LtvSystem& ltv,
                                           const LqrWeights& w,
                                           const SubstepPolicy& policy) {
    const int n = ltv.size();
    if (n < 2) throw DomainError("Riccati solve needs at least 2 grid points");
    const int nx = static_cast<int>(ltv.A[0].rows());
    const int nu = static_cast<int>(ltv.B2[0].cols());
    w.validate(nx, nu);

    const Eigen::MatrixXd Qd = w.Q.asDiagonal();
    const Eigen::VectorXd r_inv = w.R.cwiseInverse();

    std::vector<Eigen::MatrixXd> P(n);
    Eigen::MatrixXd Pk = w.S.asDiagonal();
    P[n - 1] = Pk;

    Eigen::MatrixXd PA(nx, nx), PB(nx, nu), k1(nx, nx), k2(nx, nx), k3(nx, nx),
        k4(nx, nx), Ps(nx, nx), As(nx, nx), Bs(nx, nu);

    // RHS in reversed time sigma = t_f - t:
    // dP/dsigma = P A + A' P - P B2 R^{-1} B2' P + Q.
    auto rhs = [&](const Eigen::MatrixXd& Pc, const Eigen::MatrixXd& A,
                   const Eigen::MatrixXd& B, Eigen::MatrixXd& out) {
        PA.noalias() = Pc * A;
        PB.noalias() = Pc * B;
        out = PA + PA.transpose() + Qd;
        out.noalias() -= PB * r_inv.asDiagonal() * PB.transpose();
    };

    for (int k = n - 1; k > 0; --k) {
        const double dt = ltv.times[k] - ltv.times[k - 1];
        const Eigen::MatrixXd& A0 = ltv.A[k];      // sigma start of the interval
        const Eigen::MatrixXd& A1 = ltv.A[k - 1];  // sigma end
        const Eigen::MatrixXd& B0 = ltv.B2[k];
        const Eigen::MatrixXd& B1 = ltv.B2[k - 1];

        // Local stiffness: the linearized Riccati flow contracts at roughly
        // 2 |A - B2 R^{-1} B2' P|; bound it via Frobenius norms.
        const double gq_norm =
            (B0 * r_inv.asDiagonal() * B0.transpose()).norm();
        const double lambda = 2.0 * (A0.norm() + gq_norm * Pk.norm());
        const int ns = policy.count(lambda, dt);
        const double h = dt / ns;

        for (int j = 0; j < ns; ++j) {
            const double u0 = static_cast<double>(j) / ns;
            const double um = (j + 0.5) / ns;
            const double u1 = static_cast<double>(j + 1) / ns;

            As = (1.0 - u0) * A0 + u0 * A1;
            Bs = (1.0 - u0) * B0 + u0 * B1;
            rhs(Pk, As, Bs, k1);
            As = (1.0 - um) * A0 + um * A1;
            Bs = (1.0 - um) * B0 + um * B1;
            Ps = Pk + (0.5 * h) * k1;
            rhs(Ps, As, Bs, k2);
            Ps = Pk + (0.5 * h) * k2;
            rhs(Ps, As, Bs, k3);
            As = (1.0 - u1) * A0 + u1 * A1;
            Bs = (1.0 - u1) * B0 + u1 * B1;
            Ps = Pk + h * k3;
            rhs(Ps, As, Bs, k4);

            Pk += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            Pk = 0.5 * (Pk + Pk.transpose()).eval();

            const double peak = Pk.cwiseAbs().maxCoeff();
            if (!std::isfinite(peak) || peak > kDivergenceGuard) {
                throw DivergenceError("Riccati solution diverged near t = " +
                                      std::to_string(ltv.times[k - 1]));
            }
        }
        P[k - 1] = Pk;
    }
    return P;
}

GainSchedule lqr_gain(const std::vector<Eigen::MatrixXd>& P,
                      const LtvSystem& ltv, const LqrWeights& w) {
    const int n = ltv.size();
    GainSchedule sched;
    sched.times = ltv.times;
    sched.weights = w;
    sched.K.resize(n);
    const Eigen::VectorXd r_inv = w.R.cwiseInverse();
    for (int i = 0; i < n; ++i) {
        sched.K[i] = r_inv.asDiagonal() * ltv.B2[i].transpose() * P[i];
    }
    return sched;
}

GainSchedule zero_gain_schedule(const Eigen::VectorXd& times, int n_inputs,
                                int n_states) {
    GainSchedule sched;
    sched.times = times;
    sched.K.assign(static_cast<size_t>(times.size()),
                   Eigen::MatrixXd::Zero(n_inputs, n_states));
    sched.weights.Q = Eigen::VectorXd::Zero(n_states);
    sched.weights.R = Eigen::VectorXd::Ones(n_inputs);
    sched.weights.S = Eigen::VectorXd::Zero(n_states);
    return sched;
}

Eigen::MatrixXd interpolate_gain(const GainSchedule& K, double t) {
    const int n = K.size();
    if (t <= K.times[0]) return K.K[0];
    if (t >= K.times[n - 1]) return K.K[n - 1];
    const double dt = K.times[1] - K.times[0];
    int k = static_cast<int>((t - K.times[0]) / dt);
    if (k > n - 2) k = n - 2;
    const double s = (t - K.times[k]) / dt;
    return (1.0 - s) * K.K[k] + s * K.K[k + 1];
}

}  // namespace sts
