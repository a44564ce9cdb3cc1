#include "sts/robust.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sts/errors.hpp"

namespace sts {

namespace {

int nearest_grid_index(const Eigen::VectorXd& times, double T) {
    const int n = static_cast<int>(times.size());
    const double dt = times[1] - times[0];
    int idx = static_cast<int>(std::lround((T - times[0]) / dt));
    if (idx < 0) idx = 0;
    if (idx > n - 1) idx = n - 1;
    return idx;
}

double gain_at(const ExtendedLtv& ext, const Eigen::MatrixXd& W, int idx) {
    const Eigen::MatrixXd& Cb = ext.Cbar[idx];
    const Eigen::MatrixXd G = Cb * W * Cb.transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
        0.5 * (G + G.transpose()));
    const double lam = eig.eigenvalues().maxCoeff();
    return std::sqrt(std::max(lam, 0.0));
}

// Integrates the Gramian ODE Wdot = Abar W + W Abar' + Bbar Bbar' from
// W(0) = 0 up to grid index `last`, invoking `record` at every grid node.
template <class Record>
void integrate_gramian(const ExtendedLtv& ext, int last,
                       const SubstepPolicy& policy, Record&& record) {
    const int nx = static_cast<int>(ext.Abar[0].rows());
    const Eigen::MatrixXd BBt = ext.Bbar * ext.Bbar.transpose();
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(nx, nx);
    record(0, W);

    Eigen::MatrixXd AW(nx, nx), k1(nx, nx), k2(nx, nx), k3(nx, nx), k4(nx, nx),
        Ws(nx, nx), As(nx, nx);
    auto rhs = [&](const Eigen::MatrixXd& Wc, const Eigen::MatrixXd& A,
                   Eigen::MatrixXd& out) {
        AW.noalias() = A * Wc;
        out = AW + AW.transpose() + BBt;
    };

    for (int k = 0; k < last; ++k) {
        const double dt = ext.times[k + 1] - ext.times[k];
        const Eigen::MatrixXd& A0 = ext.Abar[k];
        const Eigen::MatrixXd& A1 = ext.Abar[k + 1];
        // Both endpoints: near t_f the terminal Riccati layer makes |Abar|
        // ramp by orders of magnitude within one interval, and a left-only
        // estimate under-substeps straight into RK4 instability.
        const double lambda = 2.0 * std::max(A0.norm(), A1.norm());
        const int ns = policy.count(lambda, dt);
        const double h = dt / ns;

        for (int j = 0; j < ns; ++j) {
            const double u0 = static_cast<double>(j) / ns;
            const double um = (j + 0.5) / ns;
            const double u1 = static_cast<double>(j + 1) / ns;

            As = (1.0 - u0) * A0 + u0 * A1;
            rhs(W, As, k1);
            As = (1.0 - um) * A0 + um * A1;
            Ws = W + (0.5 * h) * k1;
            rhs(Ws, As, k2);
            Ws = W + (0.5 * h) * k2;
            rhs(Ws, As, k3);
            As = (1.0 - u1) * A0 + u1 * A1;
            Ws = W + h * k3;
            rhs(Ws, As, k4);

            W += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            W = 0.5 * (W + W.transpose()).eval();
        }
        if (!W.allFinite()) {
            throw DivergenceError("Gramian diverged near t = " +
                                  std::to_string(ext.times[k + 1]));
        }
        record(k + 1, W);
    }
}

}  // namespace

ParameterFilter build_parameter_filter(const ParameterBox& box, double a) {
    if (!(a > 0.0)) throw DomainError("filter bandwidth must be positive");
    const int np = static_cast<int>(box.half_widths.size());
    ParameterFilter filt;
    filt.a = a;
    filt.A_d = -a * Eigen::MatrixXd::Identity(np, np);
    filt.B_d = Eigen::MatrixXd::Identity(np, np);
    filt.C_d = (a * box.half_widths).asDiagonal();
    return filt;
}

ExtendedLtv assemble_extended_ltv(const LtvSystem& ltv, const GainSchedule& K,
                                  const ParameterFilter& filt,
                                  const Eigen::VectorXd& W_e) {
    const int n = ltv.size();
    if (K.size() != n || (K.times - ltv.times).cwiseAbs().maxCoeff() > 1e-12) {
        throw GridMismatchError("gain schedule grid differs from the LTV grid");
    }
    const int nx = static_cast<int>(ltv.A[0].rows());
    const int np = static_cast<int>(filt.A_d.rows());
    const int nz = static_cast<int>(ltv.C[0].rows());
    if (W_e.size() != nz) throw DomainError("W_e size mismatch");

    ExtendedLtv ext;
    ext.times = ltv.times;
    ext.Bbar = Eigen::MatrixXd::Zero(nx + np, np);
    ext.Bbar.bottomRows(np) = filt.B_d;
    ext.Abar.resize(n);
    ext.Cbar.resize(n);
    for (int i = 0; i < n; ++i) {
        Eigen::MatrixXd Ab = Eigen::MatrixXd::Zero(nx + np, nx + np);
        Ab.topLeftCorner(nx, nx) = ltv.A[i];
        Ab.topLeftCorner(nx, nx).noalias() -= ltv.B2[i] * K.K[i];
        Ab.topRightCorner(nx, np).noalias() = ltv.B1[i] * filt.C_d;
        Ab.bottomRightCorner(np, np) = filt.A_d;
        ext.Abar[i] = std::move(Ab);

        Eigen::MatrixXd Cb(nz, nx + np);
        Cb.leftCols(nx) = W_e.asDiagonal() * ltv.C[i];
        Cb.rightCols(np) = W_e.asDiagonal() * ltv.D1[i] * filt.C_d;
        ext.Cbar[i] = std::move(Cb);
    }
    return ext;
}

double l2_to_euclidean_gain(const ExtendedLtv& ext, double T,
                            const SubstepPolicy& policy) {
    if (!(T > 0.0)) throw DomainError("gain horizon must be positive");
    const int idx = nearest_grid_index(ext.times, T);
    double gamma = 0.0;
    integrate_gramian(ext, idx, policy,
                      [&](int k, const Eigen::MatrixXd& W) {
                          if (k == idx) gamma = gain_at(ext, W, idx);
                      });
    return gamma;
}

double robust_metric(double gamma_tm, double gamma_tf, double alpha) {
    if (alpha < 0.0 || alpha > 1.0) throw DomainError("alpha must be in [0, 1]");
    if (gamma_tm < 0.0 || gamma_tf < 0.0) throw DomainError("gains must be nonnegative");
    return (1.0 - alpha) * gamma_tm + alpha * gamma_tf;
}

GainReport evaluate_robust_performance(const ExtendedLtv& ext, double t_m,
                                       double alpha,
                                       const SubstepPolicy& policy) {
    const int n = ext.size();
    const int idx_m = nearest_grid_index(ext.times, t_m);
    const int idx_f = n - 1;
    GainReport report;
    report.alpha = alpha;
    report.t_m = ext.times[idx_m];
    report.t_f = ext.times[idx_f];
    integrate_gramian(ext, idx_f, policy,
                      [&](int k, const Eigen::MatrixXd& W) {
                          if (k == idx_m) report.gamma_tm = gain_at(ext, W, idx_m);
                          if (k == idx_f) report.gamma_tf = gain_at(ext, W, idx_f);
                      });
    report.J_RP = robust_metric(report.gamma_tm, report.gamma_tf, alpha);
    return report;
}

}  // namespace sts
