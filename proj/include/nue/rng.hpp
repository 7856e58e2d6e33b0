#pragma once

#include <cstdint>

namespace nue {

// splitmix64 finalizer. Used to derive well-spread per-block and per-lane
// seeds from a user seed; the statistical stream itself is xoshiro-free:
// blocks use mt19937_64 (bit-exact across platforms) and the digit-stream
// orbit engines use xorshift64 lanes seeded through this mix.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// Deterministic seed for block `index` of a run with user seed `seed`.
inline std::uint64_t block_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    std::uint64_t s = seed ^ (0xA0761D6478BD642Full * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b << 1);
}

// xorshift64: cheap per-lane generator with shift/xor ops only, so the AVX2
// path can run it verbatim. State must be nonzero.
inline std::uint64_t xorshift64(std::uint64_t x) noexcept {
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    return x;
}

// Nonzero lane seed derived from a block seed.
inline std::uint64_t lane_seed(std::uint64_t bseed, std::uint64_t lane) noexcept {
    std::uint64_t s = bseed + 0x9E3779B97F4A7C15ull * (lane + 1);
    std::uint64_t v = splitmix64(s);
    return v ? v : 0x1234567DEFull;
}

// Uniform double in [0,1) from 53 random bits; portable and exact.
inline double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace nue
