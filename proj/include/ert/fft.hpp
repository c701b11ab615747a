#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ert {

inline bool is_power_of_two(std::size_t n) { return n != 0 && std::has_single_bit(n); }

/// In-place radix-2 complex FFT. sign = -1 gives the forward transform
/// (e^{-2*pi*i*jk/N}), sign = +1 the unnormalized inverse.
inline void fft_inplace(std::vector<std::complex<double>>& a, int sign = -1) {
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) throw std::invalid_argument("fft: size must be a power of two");
    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double angle = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

/// Forward 2-D FFT of a square row-major array (side a power of two).
inline void fft2_inplace(std::vector<std::complex<double>>& a, std::size_t side,
                         int sign = -1) {
    if (a.size() != side * side) throw std::invalid_argument("fft2: size mismatch");
    if (!is_power_of_two(side)) throw std::invalid_argument("fft2: side must be a power of two");
    std::vector<std::complex<double>> scratch(side);
    // rows
    for (std::size_t r = 0; r < side; ++r) {
        scratch.assign(a.begin() + static_cast<std::ptrdiff_t>(r * side),
                       a.begin() + static_cast<std::ptrdiff_t>((r + 1) * side));
        fft_inplace(scratch, sign);
        std::copy(scratch.begin(), scratch.end(), a.begin() + static_cast<std::ptrdiff_t>(r * side));
    }
    // columns
    for (std::size_t c = 0; c < side; ++c) {
        for (std::size_t r = 0; r < side; ++r) scratch[r] = a[r * side + c];
        fft_inplace(scratch, sign);
        for (std::size_t r = 0; r < side; ++r) a[r * side + c] = scratch[r];
    }
}

}  // namespace ert
