#pragma once

#include <array>
#include <cstdint>
#include <cstring>

namespace levalarm {

// Philox4x32-10 (Salmon et al. 2011). Counter-based, so any (path, step)
// draw can be produced directly without stepping a sequential state.
//
// Stream layout used by the simulators:
//   key     = (seed low 32 bits, seed high 32 bits)
//   counter = (step, path low 32 bits, path high 32 bits, stream tag)
// Each counter yields two uniforms: words (0,1) and words (2,3). A kernel that
// needs a third draw per step uses the same counter with kAuxStream set in the tag.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

inline constexpr std::uint32_t kAuxStream = 0x80000000u;

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline PhiloxCounter philox4x32_10(PhiloxCounter c, PhiloxKey k) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

inline PhiloxKey philox_key(std::uint64_t seed) {
    return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

// 52 random mantissa bits mapped to (m + 1/2) 2^-52, strictly inside (0, 1).
inline double uniform_open(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t m =
        (static_cast<std::uint64_t>(hi) << 20) | (static_cast<std::uint64_t>(lo) >> 12);
    const std::uint64_t bits = m | 0x3FF0000000000000ull;
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return (d - 1.0) + 0x1p-53;
}

}  // namespace levalarm
