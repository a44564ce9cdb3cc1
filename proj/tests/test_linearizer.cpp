#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "sts/errors.hpp"
#include "sts/linearizer.hpp"
#include "sts/model.hpp"
#include "sts/planner.hpp"
#include "sts/rng.hpp"

using namespace sts;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

const ReferenceTrajectory& sts1_reference() {
    static ReferenceTrajectory traj = [] {
        ManeuverSpec spec;
        spec.theta0 = Vec3(90.0 * kDeg, -90.0 * kDeg, 90.0 * kDeg);
        spec.z_final = Vec3(-5.0 * kDeg, 0.0, 0.974);
        AllocationSpec alloc;
        alloc.W_u = Vec4(1.0, 1.0, 10.0, 1.0);
        alloc.u_min = Vec4(-kInf, -kInf, -kInf, 0.0);
        return build_reference(spec, alloc, nominal_parameter_box().nominal);
    }();
    return traj;
}

const LtvSystem& sts1_ltv() {
    static LtvSystem ltv =
        linearize(sts1_reference(), nominal_parameter_box().nominal);
    return ltv;
}

}  // namespace

TEST_CASE("state Jacobian has the integrator block structure") {
    const LtvSystem& ltv = sts1_ltv();
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        int i = static_cast<int>(rng.integer(ltv.size()));
        const Eigen::MatrixXd& A = ltv.A[i];
        CHECK(A.rows() == 6);
        CHECK(A.cols() == 6);
        CHECK(A.topLeftCorner<3, 3>().norm() == 0.0);
        CHECK((A.topRightCorner<3, 3>() - Mat3::Identity()).norm() == 0.0);
        CHECK(A.allFinite());
        CHECK(ltv.B1[i].allFinite());
        CHECK(ltv.B2[i].allFinite());
        CHECK(ltv.C[i].allFinite());
        CHECK(ltv.D1[i].allFinite());
    }
}

TEST_CASE("input Jacobian is the analytic mass-matrix solve") {
    const ReferenceTrajectory& traj = sts1_reference();
    ParameterVector p = nominal_parameter_box().nominal;
    const LtvSystem& ltv = sts1_ltv();
    Rng rng(32);
    for (int trial = 0; trial < 25; ++trial) {
        int i = static_cast<int>(rng.integer(ltv.size()));
        Mat3 M = mass_matrix(traj.theta[i], p);
        Mat34 At = generalized_force_matrix(traj.theta[i], p);
        Mat6x4 expected = Mat6x4::Zero();
        expected.bottomRows<3>() = M.llt().solve(Mat3::Identity()) * At;
        CHECK((ltv.B2[i] - expected).norm() < 1e-10);

        // FD cross-check of the analytic u-partial.
        Vec6 x = traj.x(i);
        const double h = 1e-6;
        Mat6x4 fd;
        for (int j = 0; j < 4; ++j) {
            Vec4 up = traj.u[i], um = traj.u[i];
            up[j] += h;
            um[j] -= h;
            fd.col(j) =
                (forward_dynamics(x, p, up) - forward_dynamics(x, p, um)) /
                (2 * h);
        }
        CHECK((ltv.B2[i] - fd).norm() < 1e-6);
    }
}

TEST_CASE("output Jacobian rows project the trunk coordinates") {
    const LtvSystem& ltv = sts1_ltv();
    Eigen::Matrix<double, 1, 6> row1, row4;
    row1 << 0, 1, 0, 0, 0, 0;
    row4 << 0, 0, 0, 0, 1, 0;
    for (int i = 0; i < ltv.size(); i += 35) {
        CHECK((ltv.C[i].row(0) - row1).norm() == 0.0);
        CHECK((ltv.C[i].row(3) - row4).norm() == 0.0);
    }
}

TEST_CASE("analytic C and D1 match finite differences of the output map") {
    const ReferenceTrajectory& traj = sts1_reference();
    ParameterVector p = nominal_parameter_box().nominal;
    const LtvSystem& ltv = sts1_ltv();
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        int i = static_cast<int>(rng.integer(ltv.size()));
        Vec6 x = traj.x(i);
        const double h = 1e-6;

        Mat6 fdC;
        for (int j = 0; j < 6; ++j) {
            Vec6 xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            fdC.col(j) = (task_outputs(xp, p).zeta() -
                          task_outputs(xm, p).zeta()) /
                         (2 * h);
        }
        CHECK((ltv.C[i] - fdC).norm() / fdC.norm() < 1e-6);

        Mat6x12 fdD;
        for (int j = 0; j < 12; ++j) {
            ParameterVector pp = p, pm = p;
            const double hj = 1e-6 * std::max(1.0, std::abs(p[j]));
            pp[j] += hj;
            pm[j] -= hj;
            fdD.col(j) = (task_outputs(x, pp).zeta() -
                          task_outputs(x, pm).zeta()) /
                         (2 * hj);
        }
        CHECK((ltv.D1[i] - fdD).norm() / fdD.norm() < 1e-6);
    }
}

TEST_CASE("directional derivative remainder is second order") {
    const ReferenceTrajectory& traj = sts1_reference();
    ParameterVector p = nominal_parameter_box().nominal;
    const LtvSystem& ltv = sts1_ltv();
    Rng rng(34);

    for (int trial = 0; trial < 10; ++trial) {
        int i = static_cast<int>(rng.integer(ltv.size()));
        Vec6 dx;
        Vec12 dp;
        Vec4 du;
        for (int j = 0; j < 6; ++j) dx[j] = rng.uniform(-1, 1);
        for (int j = 0; j < 12; ++j) dp[j] = rng.uniform(-1, 1);
        for (int j = 0; j < 4; ++j) du[j] = rng.uniform(-1, 1);
        dx.normalize();
        dp.normalize();
        du.normalize();

        Vec6 x = traj.x(i);
        Vec4 u = traj.u[i];
        Vec6 f0 = forward_dynamics(x, p, u);
        Vec6 z0 = task_outputs(x, p).zeta();

        auto dyn_remainder = [&](double s) {
            Vec6 fs = forward_dynamics(x + s * dx,
                                       (p + s * dp).eval(), u + s * du);
            Vec6 lin = f0 + s * (ltv.A[i] * dx + ltv.B1[i] * dp +
                                 ltv.B2[i] * du);
            return (fs - lin).norm();
        };
        auto out_remainder = [&](double s) {
            Vec6 zs = task_outputs(x + s * dx, (p + s * dp).eval()).zeta();
            Vec6 lin = z0 + s * (ltv.C[i] * dx + ltv.D1[i] * dp);
            return (zs - lin).norm();
        };

        // Quartering s divides an O(s^2) remainder by ~16; FD noise in A and
        // B1 (~1e-10 absolute) keeps the observed ratio a bit lower.
        double r1 = dyn_remainder(1e-3), r2 = dyn_remainder(2.5e-4);
        CHECK(r1 / r2 > 8.0);
        CHECK(r1 / r2 < 32.0);
        double q1 = out_remainder(1e-3), q2 = out_remainder(2.5e-4);
        CHECK(q1 / q2 > 8.0);
        CHECK(q1 / q2 < 32.0);
    }
}

TEST_CASE("finite-difference Jacobians converge at second order") {
    // Richardson check on the raw FD kernel: recompute the acceleration-row
    // state Jacobian at steps h and h/2 against a tight reference.
    const ReferenceTrajectory& traj = sts1_reference();
    ParameterVector p = nominal_parameter_box().nominal;
    const int i = 350;
    Vec6 x = traj.x(i);
    Vec4 u = traj.u[i];

    auto fd_jacobian = [&](double h) {
        Mat6 J;
        for (int j = 0; j < 6; ++j) {
            Vec6 xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            J.col(j) = (forward_dynamics(xp, p, u) -
                        forward_dynamics(xm, p, u)) /
                       (2 * h);
        }
        return J;
    };

    Mat6 ref = fd_jacobian(1e-7);  // near the roundoff sweet spot
    double e1 = (fd_jacobian(1e-3) - ref).norm();
    double e2 = (fd_jacobian(5e-4) - ref).norm();
    CHECK(e1 / e2 > 3.0);  // ~4 expected for O(h^2)
    CHECK(e1 / e2 < 5.0);
}

TEST_CASE("grid and matrix dimensions stay aligned") {
    const LtvSystem& ltv = sts1_ltv();
    const ReferenceTrajectory& traj = sts1_reference();
    CHECK(ltv.size() == traj.size());
    CHECK(ltv.dt() == doctest::Approx(traj.dt()).epsilon(1e-15));
    CHECK(static_cast<int>(ltv.A.size()) == ltv.size());
    CHECK(static_cast<int>(ltv.B1.size()) == ltv.size());
    CHECK(static_cast<int>(ltv.B2.size()) == ltv.size());
    CHECK(static_cast<int>(ltv.C.size()) == ltv.size());
    CHECK(static_cast<int>(ltv.D1.size()) == ltv.size());
    CHECK(ltv.B1[0].rows() == 6);
    CHECK(ltv.B1[0].cols() == 12);
    CHECK(ltv.D1[0].rows() == 6);
    CHECK(ltv.D1[0].cols() == 12);
}
