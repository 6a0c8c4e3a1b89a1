// Deterministic pseudo-random stream. One instance per run; every stochastic
// draw in a simulation comes from it in a fixed order, so a (config, seed)
// pair always reproduces the same trace regardless of platform or standard
// library. xoshiro256** seeded through splitmix64.
#pragma once

#include <cmath>
#include <cstdint>

namespace crsn {

class DetRng {
public:
    explicit DetRng(std::uint64_t seed = 1) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
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

    // Uniform in [0, 1) with 53 significant bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n). n must be > 0.
    std::uint64_t uniform_int(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    double exponential(double mean) { return -mean * std::log(1.0 - uniform01()); }

    // Box-Muller; draws two uniforms per call.
    double normal(double mean, double stddev) {
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        return mean + stddev * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(6.283185307179586 * u2);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4] = {};
};

}  // namespace crsn
