#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "ert/parallel.hpp"
#include "ert/sinogram.hpp"

namespace ert {

/// Band-pass reconstruction filter parameters: bandwidth rho > 0 and
/// attenuation mu with 0 < |mu| < 1/rho (mu = 0 additionally admitted for the
/// classical reduction). The pass band is |mu| < |t| < B with
/// B = sqrt(1/rho^2 + mu^2).
struct FilterParams {
    double rho;
    double mu;

    FilterParams(double rho_, double mu_) : rho(rho_), mu(mu_) {
        if (!(rho > 0.0)) throw std::invalid_argument("FilterParams: rho must be > 0");
        if (mu != 0.0 && !(std::abs(mu) < 1.0 / rho))
            throw std::invalid_argument("FilterParams: need |mu| < 1/rho (or mu = 0)");
    }

    double band_edge() const { return std::sqrt(1.0 / (rho * rho) + mu * mu); }
};

/// K_rho(s) = (1/pi) int_{|mu|}^{B} r cos(s r) dr, evaluated in closed form.
/// The antiderivative is rearranged with the cosine-difference identity into
///   (1/pi) [ (B sin(sB) - m sin(sm))/s - 2 sin(s(B+m)/2) sin(s(B-m)/2) / s^2 ]
/// which stays cancellation-free for all s (|mu| < 1/rho keeps B - m away
/// from 0). Below |s| < 1e-6 the Taylor limit 1/(2 pi rho^2) with its
/// second-order correction is used.
inline double kernel_value(const FilterParams& p, double s) {
    const double B = p.band_edge();
    const double m = std::abs(p.mu);
    const double pi = std::numbers::pi;
    if (std::abs(s) < 1e-6) {
        // B^2 - m^2 = 1/rho^2 identically; keeps K(0) = 1/(2 pi rho^2) exact
        const double band_sq = 1.0 / (p.rho * p.rho);
        return 1.0 / (2.0 * pi * p.rho * p.rho) -
               s * s * band_sq * (band_sq + 2.0 * m * m) / (8.0 * pi);
    }
    const double t1 = (B * std::sin(s * B) - m * std::sin(s * m)) / s;
    const double t2 = -2.0 * std::sin(0.5 * s * (B + m)) * std::sin(0.5 * s * (B - m)) / (s * s);
    return (t1 + t2) / pi;
}

/// Fourier transform of K_rho in s: |t| on the pass band, 0 elsewhere.
inline double kernel_fourier(const FilterParams& p, double t) {
    const double at = std::abs(t);
    return (at > std::abs(p.mu) && at < p.band_edge()) ? at : 0.0;
}

/// |I_rho(t) - 1| for the band indicator I_rho(t) = 1 on |t| < 1/rho.
inline double indicator_gap(double rho, double t) {
    if (!(rho > 0.0)) throw std::invalid_argument("indicator_gap: rho must be > 0");
    return std::abs(t) < 1.0 / rho ? 0.0 : 1.0;
}

namespace detail {

/// Kernel samples at the lattice offsets (k - j) * s_step, k - j in
/// [-(n_s-1), n_s-1]; entry [i + n_s - 1] holds offset i.
inline std::vector<double> kernel_offsets(const FilterParams& p, int n_s, double s_step) {
    std::vector<double> row(2 * static_cast<std::size_t>(n_s) - 1);
    for (int i = -(n_s - 1); i <= n_s - 1; ++i)
        row[static_cast<std::size_t>(i + n_s - 1)] = kernel_value(p, i * s_step);
    return row;
}

}  // namespace detail

/// Row-wise discrete convolution (K_rho * g)(theta, s_k) ~= ds * sum_j K(s_k - s_j) g(theta, s_j).
/// Direct evaluation over the n_s samples; the data vanishes outside [-1,1]
/// so plain zero extension is exact.
inline Sinogram convolve_sinogram(const Sinogram& g, const FilterParams& p,
                                  unsigned threads = 0) {
    if (g.mu() != p.mu)
        throw std::invalid_argument("convolve_sinogram: filter mu must match sinogram mu");
    const int n_theta = g.n_theta();
    const int n_s = g.n_s();
    const double ds = g.s_step();
    const auto kernel = detail::kernel_offsets(p, n_s, ds);
    std::vector<double> out(static_cast<std::size_t>(n_theta) * n_s);
    parallel_for(static_cast<std::size_t>(n_theta), [&](std::size_t j) {
        const double* row = g.values().data() + j * n_s;
        for (int k = 0; k < n_s; ++k) {
            double acc = 0.0;
            const double* kk = kernel.data() + (k + n_s - 1);
            for (int i = 0; i < n_s; ++i) acc += kk[-i] * row[i];
            out[j * n_s + k] = acc * ds;
        }
    }, threads);
    return Sinogram(n_theta, n_s, g.mu(), std::move(out));
}

}  // namespace ert
