#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "sts/errors.hpp"
#include "sts/model.hpp"
#include "sts/rng.hpp"
#include "sts/search.hpp"

using namespace sts;

namespace {

// Flattened view in sampler dimension order Q1..Q6, R1..R4, S1..S6.
double coord(const LqrWeights& w, int d) {
    if (d < 6) return w.Q[d];
    if (d < 10) return w.R[d - 6];
    return w.S[d - 10];
}

void range_of(const SearchSpace& s, int d, double& lo, double& hi) {
    if (d < 6) {
        lo = s.q_min;
        hi = s.q_max;
    } else if (d < 10) {
        lo = s.r_min;
        hi = s.r_max;
    } else {
        lo = s.s_min;
        hi = s.s_max;
    }
}

// Exactly one sample per equal-width bin in every 1-D projection, the
// defining Latin hypercube property. `transform` maps a coordinate to the
// space the bins are equal-width in (identity or log10).
void check_stratified(const std::vector<LqrWeights>& pts, const SearchSpace& s,
                      double (*transform)(double)) {
    const int n = static_cast<int>(pts.size());
    for (int d = 0; d < 16; ++d) {
        double lo, hi;
        range_of(s, d, lo, hi);
        const double a = transform(lo), b = transform(hi);
        std::vector<int> count(static_cast<size_t>(n), 0);
        for (const LqrWeights& w : pts) {
            const double v = transform(coord(w, d));
            REQUIRE(v >= a);
            REQUIRE(v < b);
            int bin = static_cast<int>((v - a) / (b - a) * n);
            if (bin >= n) bin = n - 1;
            ++count[static_cast<size_t>(bin)];
        }
        for (int k = 0; k < n; ++k) {
            CAPTURE(d);
            CAPTURE(k);
            CHECK(count[static_cast<size_t>(k)] == 1);
        }
    }
}

double identity(double v) { return v; }

// Scalar plant shell with the 12 disturbance columns the STS filter expects.
LtvSystem scalar_plant(double a, double b2, double t_f, int n_points) {
    LtvSystem ltv;
    ltv.times.setLinSpaced(n_points, 0.0, t_f);
    ltv.A.assign(n_points, Eigen::MatrixXd::Constant(1, 1, a));
    ltv.B2.assign(n_points, Eigen::MatrixXd::Constant(1, 1, b2));
    ltv.B1.assign(n_points, Eigen::MatrixXd::Ones(1, 12));
    ltv.C.assign(n_points, Eigen::MatrixXd::Identity(1, 1));
    ltv.D1.assign(n_points, Eigen::MatrixXd::Zero(1, 12));
    return ltv;
}

RobustContext context_for(const LtvSystem& ltv) {
    RobustContext ctx;
    ctx.ltv = &ltv;
    ParameterBox box = nominal_parameter_box();
    ctx.filter = build_parameter_filter(box, 100.0 * M_PI);
    ctx.W_e = Eigen::VectorXd::Ones(1);
    ctx.alpha = 0.7;
    ctx.t_m = 0.5 * ltv.times[ltv.size() - 1];
    return ctx;
}

LqrWeights scalar_weights(double q, double r, double s) {
    LqrWeights w;
    w.Q = Eigen::VectorXd::Constant(1, q);
    w.R = Eigen::VectorXd::Constant(1, r);
    w.S = Eigen::VectorXd::Constant(1, s);
    return w;
}

}  // namespace

TEST_CASE("four samples stratify every axis into quartiles") {
    SearchSpace space;
    space.n_candidates = 4;
    space.seed = 3;
    const std::vector<LqrWeights> pts = latin_hypercube(space);
    REQUIRE(pts.size() == 4);
    check_stratified(pts, space, identity);
}

TEST_CASE("full-size sample has exactly uniform marginals") {
    SearchSpace space;  // defaults: 1350 candidates, seed 1
    const std::vector<LqrWeights> pts = latin_hypercube(space);
    REQUIRE(static_cast<int>(pts.size()) == 1350);
    check_stratified(pts, space, identity);
}

TEST_CASE("sampling is a deterministic function of the seed") {
    SearchSpace space;
    space.n_candidates = 50;
    space.seed = 77;
    const std::vector<LqrWeights> a = latin_hypercube(space);
    const std::vector<LqrWeights> b = latin_hypercube(space);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].Q == b[i].Q);
        CHECK(a[i].R == b[i].R);
        CHECK(a[i].S == b[i].S);
    }

    space.seed = 78;
    const std::vector<LqrWeights> c = latin_hypercube(space);
    bool any_differs = false;
    for (size_t i = 0; i < a.size() && !any_differs; ++i)
        any_differs = a[i].Q != c[i].Q || a[i].R != c[i].R || a[i].S != c[i].S;
    CHECK(any_differs);
}

TEST_CASE("log-space sampling stratifies the exponent") {
    SearchSpace space;
    space.n_candidates = 20;
    space.seed = 5;
    space.log_space = true;
    const std::vector<LqrWeights> pts = latin_hypercube(space);
    check_stratified(pts, space, std::log10);

    // Uniform-in-exponent puts half the Q samples below sqrt(lo*hi); plain
    // uniform sampling would put ~all of them above it.
    const double mid = std::sqrt(space.q_min * space.q_max);
    int below = 0;
    for (const LqrWeights& w : pts)
        if (w.Q[0] < mid) ++below;
    CHECK(below == 10);
}

TEST_CASE("invalid search spaces are rejected") {
    SearchSpace space;
    space.n_candidates = 0;
    CHECK_THROWS_AS(latin_hypercube(space), DomainError);
    space = SearchSpace{};
    space.q_min = 0.0;
    CHECK_THROWS_AS(latin_hypercube(space), DomainError);
    space = SearchSpace{};
    space.r_min = 2.0;  // above r_max
    CHECK_THROWS_AS(latin_hypercube(space), DomainError);
}

TEST_CASE("single candidate is returned with its own metric") {
    const LtvSystem ltv = scalar_plant(-1.0, 1.0, 1.0, 51);
    const RobustContext ctx = context_for(ltv);
    const std::vector<LqrWeights> one = {scalar_weights(1.0, 0.5, 1.0)};
    const SearchResult res = select_weights(one, ctx);
    CHECK(res.best_index == 0);
    REQUIRE(res.all.size() == 1);
    CHECK(res.best_metric.J_RP == res.all[0].j_rp);
    CHECK(std::isfinite(res.best_metric.J_RP));
    CHECK(res.best_metric.alpha == 0.7);
    CHECK(res.best_metric.t_f == 1.0);
}

TEST_CASE("winner attains the minimum with lowest-index tie-break") {
    const LtvSystem ltv = scalar_plant(-1.0, 1.0, 1.0, 51);
    const RobustContext ctx = context_for(ltv);
    std::vector<LqrWeights> candidates;
    Rng rng(11);
    for (int i = 0; i < 12; ++i)
        candidates.push_back(scalar_weights(rng.uniform(0.1, 10.0),
                                            rng.uniform(0.1, 1.0),
                                            rng.uniform(0.1, 10.0)));
    // Exact duplicate of an existing candidate at the end: whatever wins, a
    // later tie must not displace an earlier index.
    candidates.push_back(candidates[4]);

    const SearchResult res = select_weights(candidates, ctx);
    for (const CandidateMetrics& m : res.all) {
        if (!m.diverged) CHECK(res.best_metric.J_RP <= m.j_rp);
    }
    if (res.best_index == 4 || res.best_index == 12) {
        CHECK(res.best_index == 4);
        CHECK(res.all[12].j_rp == res.all[4].j_rp);
    }
}

TEST_CASE("adding candidates never increases the best metric") {
    const LtvSystem ltv = scalar_plant(-1.0, 1.0, 1.0, 51);
    const RobustContext ctx = context_for(ltv);
    std::vector<LqrWeights> pool;
    Rng rng(13);
    for (int i = 0; i < 16; ++i)
        pool.push_back(scalar_weights(rng.uniform(0.1, 10.0),
                                      rng.uniform(0.1, 1.0),
                                      rng.uniform(0.1, 10.0)));
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 4; k <= 16; k += 4) {
        const std::vector<LqrWeights> prefix(pool.begin(), pool.begin() + k);
        const double best = select_weights(prefix, ctx).best_metric.J_RP;
        CHECK(best <= prev);
        prev = best;
    }
}

TEST_CASE("diverging candidates are skipped, not fatal") {
    // Uncontrollable unstable plant: any Q > 0 sends the Riccati solution
    // unbounded, while Q = S = 0 keeps P identically zero.
    const LtvSystem ltv = scalar_plant(1.0, 0.0, 16.0, 161);
    const RobustContext ctx = context_for(ltv);
    const std::vector<LqrWeights> candidates = {
        scalar_weights(1.0, 0.5, 0.0),  // diverges
        scalar_weights(0.0, 0.5, 0.0),  // P = 0, open loop, finite gamma
        scalar_weights(2.0, 0.5, 1.0),  // diverges
    };
    const SearchResult res = select_weights(candidates, ctx);
    CHECK(res.best_index == 1);
    CHECK(res.all[0].diverged);
    CHECK(res.all[0].j_rp == std::numeric_limits<double>::infinity());
    CHECK(res.all[2].diverged);
    CHECK_FALSE(res.all[1].diverged);
    CHECK(std::isfinite(res.all[1].j_rp));
}

TEST_CASE("search fails loudly when every candidate diverges") {
    const LtvSystem ltv = scalar_plant(1.0, 0.0, 16.0, 161);
    const RobustContext ctx = context_for(ltv);
    const std::vector<LqrWeights> candidates = {scalar_weights(1.0, 0.5, 0.0),
                                                scalar_weights(2.0, 0.5, 0.0)};
    CHECK_THROWS_AS(select_weights(candidates, ctx), SearchFailedError);
    CHECK_THROWS_AS(select_weights({}, ctx), DomainError);
}

TEST_CASE("result is invariant under the worker count") {
    const LtvSystem ltv = scalar_plant(-1.0, 1.0, 1.0, 51);
    const RobustContext ctx = context_for(ltv);
    std::vector<LqrWeights> candidates;
    Rng rng(17);
    for (int i = 0; i < 24; ++i)
        candidates.push_back(scalar_weights(rng.uniform(0.1, 10.0),
                                            rng.uniform(0.1, 1.0),
                                            rng.uniform(0.1, 10.0)));

    const SearchResult base = select_weights(candidates, ctx, 1);
    for (int workers : {2, 3, 7}) {
        CAPTURE(workers);
        const SearchResult res = select_weights(candidates, ctx, workers);
        CHECK(res.best_index == base.best_index);
        CHECK(res.best_metric.J_RP == base.best_metric.J_RP);
        REQUIRE(res.all.size() == base.all.size());
        for (size_t i = 0; i < res.all.size(); ++i) {
            CHECK(res.all[i].j_rp == base.all[i].j_rp);
            CHECK(res.all[i].gamma_tm == base.all[i].gamma_tm);
            CHECK(res.all[i].gamma_tf == base.all[i].gamma_tf);
            CHECK(res.all[i].diverged == base.all[i].diverged);
        }
    }
}
