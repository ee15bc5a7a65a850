#pragma once

// Deterministic pseudorandom stream. We draw uniforms directly from the
// mt19937_64 word stream instead of std::uniform_real_distribution so that
// identical seeds reproduce identical graphs across standard libraries.

#include <cstdint>
#include <random>

namespace forge {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // Uniform in [0, 1) with 53 bits of precision.
    double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, bound) via rejection.
    std::uint64_t below(std::uint64_t bound) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % bound;
    }

    bool coin(double p) { return unit() < p; }

private:
    std::mt19937_64 eng_;
};

}  // namespace forge
