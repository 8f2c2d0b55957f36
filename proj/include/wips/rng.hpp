#pragma once

#include <cstdint>
#include <cmath>

namespace wips {

// xoshiro256** (Blackman & Vigna), seeded through splitmix64. Chosen over
// std::mt19937 so that streams are bit-identical across platforms and
// standard-library versions. Single-owner: concurrent use requires
// independent instances with distinct seeds.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : seed_(seed) {
        std::uint64_t x = seed;
        for (auto& s : state_) s = splitmix64(x);
    }

    std::uint64_t seed() const { return seed_; }

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

    // Uniform double in [0, 1), 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform double in (lo, hi]; never returns lo exactly.
    double uniform_open(double lo, double hi) { return lo + (1.0 - uniform()) * (hi - lo); }

    // Unbiased integer in [0, n) via bitmask rejection.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n <= 1) return 0;
        std::uint64_t mask = n - 1;
        mask |= mask >> 1; mask |= mask >> 2; mask |= mask >> 4;
        mask |= mask >> 8; mask |= mask >> 16; mask |= mask >> 32;
        for (;;) {
            const std::uint64_t x = next_u64() & mask;
            if (x < n) return x;
        }
    }

    // Standard normal via Box-Muller; consumes exactly two raw draws (no
    // cached spare, so the raw stream position is a pure function of the
    // call count).
    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Independent child stream; deterministic in (seed, salt).
    Rng fork(std::uint64_t salt) const {
        std::uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ULL + salt * 0xbf58476d1ce4e5b9ULL);
        return Rng(splitmix64(x));
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::uint64_t state_[4];
};

}  // namespace wips
