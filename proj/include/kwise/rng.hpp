#pragma once

#include <cmath>
#include <cstdint>

namespace kwise {

// MurmurHash3 64-bit finalizer. Good enough avalanche to derive
// independent-looking generator states from (seed, stream) pairs.
inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 33;
    x *= 0xff51afd7ed558ccdULL;
    x ^= x >> 33;
    x *= 0xc4ceb9fe1a85ec53ULL;
    x ^= x >> 33;
    return x;
}

// xoshiro256** seeded through SplitMix64. One instance per replication
// stream: stream k of a run with seed s is Rng(s, k), so the output of a
// simulation is a pure function of (seed, replication index) and does not
// depend on thread scheduling.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = mix64(seed ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
        for (auto& word : state_) {
            sm += 0x9e3779b97f4a7c15ULL;
            word = mix64(sm);
        }
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Unbiased integer on [0, bound) by masked rejection.
    std::uint64_t uniform_int(std::uint64_t bound) {
        if (bound <= 1) return 0;
        std::uint64_t mask = ~std::uint64_t{0} >> __builtin_clzll((bound - 1) | 1);
        for (;;) {
            std::uint64_t v = next() & mask;
            if (v < bound) return v;
        }
    }

    bool bernoulli(double p) { return uniform01() < p; }

    // Box-Muller; the second variate of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        cached_ = radius * std::sin(angle);
        have_cached_ = true;
        return radius * std::cos(angle);
    }

    // Sum of Bernoulli trials. O(m), which is what the fast sampling paths
    // budget for; m stays in the thousands at desk scale.
    long long binomial(long long m, double p) {
        long long hits = 0;
        for (long long i = 0; i < m; ++i)
            if (uniform01() < p) ++hits;
        return hits;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t state_[4];
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace kwise
