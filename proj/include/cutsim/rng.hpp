#pragma once

#include <cstdint>

namespace cutsim {

// SplitMix64 counter generator. Hand-rolled so streams are bit-identical
// across compilers and standard libraries; std::uniform_real_distribution is
// implementation-defined and would break record replayability.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [lo, hi); returns lo exactly when lo == hi.
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Uniform integer in [0, n).
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next_u64() % n; }

    // Derives an independent substream; drawing from the child does not
    // perturb the parent beyond this single call.
    Rng split() { return Rng(next_u64()); }

private:
    uint64_t state_;
};

}  // namespace cutsim
