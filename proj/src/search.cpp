#include "sts/search.hpp"

#include <cmath>
#include <limits>

#include "sts/errors.hpp"
#include "sts/parallel.hpp"
#include "sts/rng.hpp"

namespace sts {

void SearchSpace::validate() const {
    if (n_candidates < 1) throw DomainError("search needs at least one candidate");
    if (!(q_min > 0.0 && q_min < q_max) || !(r_min > 0.0 && r_min < r_max) ||
        !(s_min > 0.0 && s_min < s_max)) {
        throw DomainError("search ranges must satisfy 0 < lo < hi");
    }
}

std::vector<LqrWeights> latin_hypercube(const SearchSpace& space) {
    space.validate();
    const int n = space.n_candidates;
    Rng rng(space.seed);

    // Dimension order: Q1..Q6, R1..R4, S1..S6. For each dimension draw a bin
    // permutation, then one in-bin offset per sample.
    double lo[16], hi[16];
    for (int d = 0; d < 6; ++d) { lo[d] = space.q_min; hi[d] = space.q_max; }
    for (int d = 6; d < 10; ++d) { lo[d] = space.r_min; hi[d] = space.r_max; }
    for (int d = 10; d < 16; ++d) { lo[d] = space.s_min; hi[d] = space.s_max; }

    Eigen::MatrixXd points(n, 16);
    for (int d = 0; d < 16; ++d) {
        double a = lo[d], b = hi[d];
        if (space.log_space) {
            a = std::log10(a);
            b = std::log10(b);
        }
        const std::vector<int> perm = random_permutation(n, rng);
        for (int i = 0; i < n; ++i) {
            const double v = a + (perm[i] + rng.uniform()) * (b - a) / n;
            points(i, d) = space.log_space ? std::pow(10.0, v) : v;
        }
    }

    std::vector<LqrWeights> out(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        out[i].Q = points.row(i).segment<6>(0).transpose();
        out[i].R = points.row(i).segment<4>(6).transpose();
        out[i].S = points.row(i).segment<6>(10).transpose();
    }
    return out;
}

CandidateMetrics evaluate_candidate(const LqrWeights& w, int index,
                                    const RobustContext& ctx) {
    CandidateMetrics m;
    m.index = index;
    m.weights = w;
    try {
        const std::vector<Eigen::MatrixXd> P = solve_riccati(*ctx.ltv, w, ctx.policy);
        const GainSchedule K = lqr_gain(P, *ctx.ltv, w);
        const ExtendedLtv ext = assemble_extended_ltv(*ctx.ltv, K, ctx.filter, ctx.W_e);
        const GainReport report =
            evaluate_robust_performance(ext, ctx.t_m, ctx.alpha, ctx.policy);
        m.gamma_tm = report.gamma_tm;
        m.gamma_tf = report.gamma_tf;
        m.j_rp = report.J_RP;
    } catch (const DivergenceError&) {
        m.diverged = true;
        m.gamma_tm = std::numeric_limits<double>::infinity();
        m.gamma_tf = std::numeric_limits<double>::infinity();
        m.j_rp = std::numeric_limits<double>::infinity();
    }
    return m;
}

SearchResult select_weights(const std::vector<LqrWeights>& candidates,
                            const RobustContext& ctx, int workers) {
    if (candidates.empty()) throw DomainError("candidate list is empty");
    const int n = static_cast<int>(candidates.size());

    SearchResult result;
    result.all.resize(static_cast<size_t>(n));
    parallel_for(n, workers, [&](int i) {
        result.all[static_cast<size_t>(i)] = evaluate_candidate(candidates[i], i, ctx);
    });

    int best = -1;
    for (int i = 0; i < n; ++i) {
        const CandidateMetrics& m = result.all[static_cast<size_t>(i)];
        if (m.diverged) continue;
        if (best < 0 || m.j_rp < result.all[static_cast<size_t>(best)].j_rp) best = i;
    }
    if (best < 0) throw SearchFailedError("every weight candidate diverged");

    const CandidateMetrics& bm = result.all[static_cast<size_t>(best)];
    result.best_index = best;
    result.best_weights = bm.weights;
    result.best_metric.gamma_tm = bm.gamma_tm;
    result.best_metric.gamma_tf = bm.gamma_tf;
    result.best_metric.alpha = ctx.alpha;
    result.best_metric.t_m = ctx.t_m;
    result.best_metric.t_f = ctx.ltv->times[ctx.ltv->size() - 1];
    result.best_metric.J_RP = bm.j_rp;
    return result;
}

}  // namespace sts
