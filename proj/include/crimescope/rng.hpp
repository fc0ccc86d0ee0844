#pragma once

#include <cmath>
#include <cstdint>

namespace crimescope::rng {

// SplitMix64 finalizer. Used both as a stream generator and as the mixing
// primitive for counter-based draws, so every value is a pure function of
// its integer inputs and identical on every platform.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Collision-resistant mix of up to three 64-bit keys.
inline std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(a) ^ (b + 0x9e3779b97f4a7c15ull));
}

inline std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix(mix(a, b), c);
}

// Uniform double in [0, 1) from the top 53 bits.
inline double to_unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Counter-based Bernoulli/uniform draw keyed by (seed, i, j); independent of
// evaluation order and worker count.
inline double uniform_at(std::uint64_t seed, std::uint64_t i, std::uint64_t j) {
    return to_unit_double(mix(seed, i, j));
}

// Small sequential stream for jittered parameters (phantom geometry, patch
// draws). State advances through splitmix64, so a fixed seed fully
// determines the sequence.
class Stream {
public:
    explicit Stream(std::uint64_t seed) : state_(splitmix64(seed)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        return splitmix64(state_);
    }

    double uniform() { return to_unit_double(next_u64()); }

    // uniform in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // index in [0, n)
    std::uint64_t index(std::uint64_t n) { return next_u64() % n; }

    // standard normal via Box-Muller
    double gaussian() {
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace crimescope::rng
