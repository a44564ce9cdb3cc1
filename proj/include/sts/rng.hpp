#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace sts {

// Deterministic random source. All randomized components (Latin hypercube,
// Monte Carlo draws, test instances) draw through this wrapper so that
// results depend only on the seed, not on standard-library distribution
// implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    // Uniform integer in [0, n).
    std::uint64_t integer(std::uint64_t n) { return eng_() % n; }

  private:
    std::mt19937_64 eng_;
};

// Fisher-Yates permutation of {0, ..., n-1}.
inline std::vector<int> random_permutation(int n, Rng& rng) {
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.integer(static_cast<std::uint64_t>(i) + 1));
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

}  // namespace sts
