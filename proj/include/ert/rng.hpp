#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace ert {

/// Philox 4x32-10 counter-based generator (Salmon et al., Random123).
/// A pure function of (counter, key): any draw index can be generated
/// independently and in any order, which makes parallel simulation
/// reproducible by construction.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::uint32_t key0, std::uint32_t key1) {
    constexpr std::uint32_t kMul0 = 0xD2511F53u;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key0 += kWeyl0;
            key1 += kWeyl1;
        }
        const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
        ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key0,
               static_cast<std::uint32_t>(p1),
               static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key1,
               static_cast<std::uint32_t>(p0)};
    }
    return ctr;
}

/// Counter-based stream keyed on (seed, stream). Draw index i yields two
/// independent uniform doubles (or one standard gaussian) regardless of
/// evaluation order.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint32_t stream) : seed_(seed), stream_(stream) {}

    /// Two independent U[0,1) variates for draw index i.
    std::pair<double, double> uniform_pair(std::uint64_t i) const {
        const auto block = philox4x32(
            {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32), stream_, 0u},
            static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32));
        const std::uint64_t a =
            (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
        const std::uint64_t b =
            (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
        return {to_unit(a), to_unit(b)};
    }

    /// Standard normal variate for draw index i (Box-Muller, cosine branch).
    double gaussian(std::uint64_t i) const {
        const auto [u, v] = uniform_pair(i);
        // map u into (0, 1] so the log is finite
        const double u_pos = 1.0 - u;
        return std::sqrt(-2.0 * std::log(u_pos)) * std::cos(2.0 * std::numbers::pi * v);
    }

  private:
    static double to_unit(std::uint64_t x) {
        return static_cast<double>(x >> 11) * 0x1.0p-53;
    }

    std::uint64_t seed_;
    std::uint32_t stream_;
};

/// SplitMix64-style mix for deriving child seeds, e.g. per (master, n, trial).
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
    std::uint64_t z = a;
    for (std::uint64_t add : {b, c}) {
        z += 0x9E3779B97F4A7C15ull + add;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
    }
    return z;
}

}  // namespace ert
