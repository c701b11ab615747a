#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <type_traits>
#include <variant>
#include <vector>

#include "ert/geometry.hpp"
#include "ert/grid.hpp"
#include "ert/parallel.hpp"
#include "ert/phantom.hpp"
#include "ert/quadrature.hpp"
#include "ert/sinogram.hpp"

namespace ert {

namespace detail {

/// Exponential chord integral of a constant disk:
///   a * e^{mu*tc} * 2*sinh(mu*w)/mu,  w = half chord length,
/// with the removable mu -> 0 limit 2*a*w taken below |mu*w| < 1e-8.
inline double forward_disk(const DiskComponent& d, Ray ray, double mu) {
    const Vec2 theta = ray.theta();
    const double dist = ray.s - d.center.dot(theta);
    if (std::abs(dist) >= d.radius) return 0.0;
    const double w = std::sqrt(d.radius * d.radius - dist * dist);
    const double tc = d.center.dot(theta.perp());
    const double weight = d.amplitude * std::exp(mu * tc);
    if (std::abs(mu * w) < 1e-8) return weight * 2.0 * w;
    return weight * 2.0 * std::sinh(mu * w) / mu;
}

/// Chord integral of a bump by adaptive quadrature over the component's
/// support interval (the integrand vanishes identically outside it).
inline double forward_bump(const BumpComponent& b, Ray ray, double mu,
                           double abs_tol = 1e-10) {
    const Vec2 theta = ray.theta();
    const double dist = ray.s - b.center.dot(theta);
    if (std::abs(dist) >= b.scale) return 0.0;
    const double w = std::sqrt(b.scale * b.scale - dist * dist);
    const double tc = b.center.dot(theta.perp());
    const double inv_scale_sq = 1.0 / (b.scale * b.scale);
    const double d_sq = dist * dist;
    const auto integrand = [&](double t) {
        const double u = t - tc;
        const double r2 = (d_sq + u * u) * inv_scale_sq;
        if (r2 >= 1.0) return 0.0;
        return b.amplitude * std::exp(mu * t) * std::exp(1.0 - 1.0 / (1.0 - r2));
    };
    return integrate_adaptive(integrand, tc - w, tc + w, abs_tol);
}

}  // namespace detail

/// Exponential Radon transform T_mu f(theta, s) = int_{x.theta=s} e^{mu x.theta_perp} f(x) dx.
/// Disks use the closed form, bumps adaptive quadrature to 1e-10 absolute.
inline double forward_point(const Phantom& phantom, Ray ray, double mu) {
    double total = 0.0;
    for (const auto& comp : phantom.components()) {
        if (const auto* d = std::get_if<DiskComponent>(&comp))
            total += detail::forward_disk(*d, ray, mu);
        else
            total += detail::forward_bump(std::get<BumpComponent>(comp), ray, mu);
    }
    return total;
}

/// Transform of a sampled image: composite midpoint rule along the ray with
/// step = half a pixel, bilinear interpolation, zero outside [-1,1]^2.
inline double forward_grid_point(const ImageGrid& image, Ray ray, double mu) {
    if (std::abs(ray.s) >= 1.0) return 0.0;
    const double t_max = std::sqrt(1.0 - ray.s * ray.s);
    const double step_target = 0.5 * image.pixel_size();
    const int m = std::max(1, static_cast<int>(std::ceil(2.0 * t_max / step_target)));
    const double step = 2.0 * t_max / m;
    const Vec2 theta = ray.theta();
    const Vec2 origin{ray.s * theta.x, ray.s * theta.y};
    const Vec2 dir = theta.perp();
    double sum = 0.0;
    for (int i = 0; i < m; ++i) {
        const double t = -t_max + (i + 0.5) * step;
        sum += std::exp(mu * t) * image.sample_bilinear(origin + t * dir);
    }
    return sum * step;
}

namespace detail {

template <typename Source>
Sinogram forward_sinogram_impl(const Source& source, int n_theta, int n_s, double mu,
                               unsigned threads) {
    if (n_theta < 2 || n_s < 2)
        throw std::invalid_argument("forward_sinogram: n_theta and n_s must be >= 2");
    std::vector<double> values(static_cast<std::size_t>(n_theta) * n_s);
    const double s_step = 2.0 / n_s;
    parallel_for(static_cast<std::size_t>(n_theta), [&](std::size_t j) {
        const double phi = 2.0 * std::numbers::pi * static_cast<double>(j) / n_theta;
        for (int k = 0; k < n_s; ++k) {
            const double s = -1.0 + (k + 0.5) * s_step;
            double v;
            if constexpr (std::is_same_v<Source, Phantom>)
                v = forward_point(source, Ray{phi, s}, mu);
            else
                v = forward_grid_point(source, Ray{phi, s}, mu);
            values[j * n_s + k] = v;
        }
    }, threads);
    return Sinogram(n_theta, n_s, mu, std::move(values));
}

}  // namespace detail

inline Sinogram forward_sinogram(const Phantom& phantom, int n_theta, int n_s, double mu,
                                 unsigned threads = 0) {
    return detail::forward_sinogram_impl(phantom, n_theta, n_s, mu, threads);
}

inline Sinogram forward_sinogram(const ImageGrid& image, int n_theta, int n_s, double mu,
                                 unsigned threads = 0) {
    return detail::forward_sinogram_impl(image, n_theta, n_s, mu, threads);
}

/// Dual transform T#_mu g(x) = int_{S^1} e^{mu x.theta_perp} g(theta, x.theta) dtheta,
/// by the trapezoid rule over the sinogram's angles (exact spacing 2*pi/n_theta,
/// periodic) with linear interpolation in s.
inline double dual_point(const Sinogram& g, Vec2 x, double mu) {
    if (x.norm_sq() > 1.0) throw std::domain_error("dual_point: ||x|| must be <= 1");
    const int n_theta = g.n_theta();
    double sum = 0.0;
    for (int j = 0; j < n_theta; ++j) {
        const double phi = g.phi(j);
        const double c = std::cos(phi);
        const double sn = std::sin(phi);
        const double x_dot_theta = x.x * c + x.y * sn;
        const double x_dot_perp = -x.x * sn + x.y * c;
        sum += std::exp(mu * x_dot_perp) * g.interp_s(j, x_dot_theta);
    }
    return sum * (2.0 * std::numbers::pi / n_theta);
}

}  // namespace ert
