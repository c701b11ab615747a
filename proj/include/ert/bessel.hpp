#pragma once

#include <cmath>

namespace ert {

/// Bessel J0. Backed by the C++17 special-math implementation (accurate to
/// ~2e-13 absolute over the argument ranges used here); extended to negative
/// arguments by symmetry.
inline double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::abs(x)); }

/// Bessel J1, odd in x.
inline double bessel_j1(double x) {
    const double v = std::cyl_bessel_j(1.0, std::abs(x));
    return x < 0.0 ? -v : v;
}

/// Modified Bessel I0 by its power series (entire function, all terms
/// positive); used by tests of the dual transform.
inline double bessel_i0(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        term *= q / (static_cast<double>(k) * k);
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return sum;
}

}  // namespace ert
