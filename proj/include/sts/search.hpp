#pragma once

#include <cstdint>
#include <vector>

#include "sts/lqr.hpp"
#include "sts/robust.hpp"

namespace sts {

// Latin-hypercube sampling box over the 16 weight entries (6 Q, 4 R, 6 S).
// Open lower endpoints are realized as 1e-6. Sampling is uniform in raw
// value by default; log_space stratifies the base-10 exponent instead.
struct SearchSpace {
    int n_candidates = 1350;
    double q_min = 1e-6, q_max = 1e4;
    double r_min = 1e-6, r_max = 1.0;
    double s_min = 1e-6, s_max = 1e4;
    std::uint64_t seed = 1;
    bool log_space = false;

    void validate() const;  // throws DomainError
};

// Deterministic Latin hypercube: every 1-D projection of the candidate set
// has exactly one sample per equal-width bin of its range.
std::vector<LqrWeights> latin_hypercube(const SearchSpace& space);

// Everything needed to score one weight candidate.
struct RobustContext {
    const LtvSystem* ltv = nullptr;
    ParameterFilter filter;
    Eigen::VectorXd W_e;
    double alpha = 0.7;
    double t_m = 2.0;
    SubstepPolicy policy;
};

// Per-candidate outcome; diverged candidates carry J_RP = +infinity.
struct CandidateMetrics {
    int index = -1;
    LqrWeights weights;
    double gamma_tm = 0.0;
    double gamma_tf = 0.0;
    double j_rp = 0.0;
    bool diverged = false;
};

struct SearchResult {
    int best_index = -1;
    LqrWeights best_weights;
    GainReport best_metric;
    std::vector<CandidateMetrics> all;
    std::uint64_t seed = 0;
};

// Scores one candidate: Riccati -> gain -> extended LTV -> J_RP.
CandidateMetrics evaluate_candidate(const LqrWeights& w, int index,
                                    const RobustContext& ctx);

// Exhaustive evaluation; argmin with lowest-index tie-break. Results are
// independent of `workers`. Throws SearchFailedError if every candidate
// diverges.
SearchResult select_weights(const std::vector<LqrWeights>& candidates,
                            const RobustContext& ctx, int workers = 1);

}  // namespace sts
