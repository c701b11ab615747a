#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ert/accumulate.hpp"
#include "ert/fft.hpp"
#include "ert/grid.hpp"

namespace ert {

/// Sobolev-type smoothness class H(beta, L): functions supported in the unit
/// ball whose Fourier energy with weight (1 + ||xi||^2)^beta is at most L.
struct SmoothnessClass {
    double beta;
    double big_l;

    SmoothnessClass(double beta_, double big_l_) : beta(beta_), big_l(big_l_) {
        if (!(beta > 1.0)) throw std::invalid_argument("SmoothnessClass: beta must be > 1");
        if (!(big_l > 0.0)) throw std::invalid_argument("SmoothnessClass: L must be > 0");
    }
};

/// Discrete approximation of int (1 + ||xi||^2)^beta |f~(xi)|^2 dxi with the
/// convention f~(xi) = int f(x) e^{-i xi.x} dx, evaluated via the grid's DFT.
/// With the [-1,1]^2 domain the frequency lattice is xi = pi*(k1, k2),
/// k in [-n/2, n/2), and f~(xi) = (pixel area) * |DFT coefficient| up to a
/// unimodular phase.
inline double sobolev_weight_integral(const ImageGrid& image, double beta) {
    if (beta < 0.0) throw std::invalid_argument("sobolev_weight_integral: beta must be >= 0");
    const int n = image.n_side();
    if (!is_power_of_two(static_cast<std::size_t>(n)))
        throw std::invalid_argument("sobolev_weight_integral: n_side must be a power of two");

    std::vector<std::complex<double>> a(image.values().begin(), image.values().end());
    fft2_inplace(a, static_cast<std::size_t>(n), -1);

    const double pi = std::numbers::pi;
    const double pixel_area = sq(2.0 / n);
    const double freq_cell = pi * pi;  // frequency spacing is pi in each axis
    double total = 0.0;
    for (int j = 0; j < n; ++j) {
        const int k1 = j < n / 2 ? j : j - n;  // wraparound index -> signed frequency
        for (int k = 0; k < n; ++k) {
            const int k2 = k < n / 2 ? k : k - n;
            const double xi_sq = pi * pi * (static_cast<double>(k1) * k1 + static_cast<double>(k2) * k2);
            const double mag = std::abs(a[static_cast<std::size_t>(j) * n + k]) * pixel_area;
            total += std::pow(1.0 + xi_sq, beta) * mag * mag;
        }
    }
    return total * freq_cell;
}

}  // namespace ert
