#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include "ert/bessel.hpp"
#include "ert/filter.hpp"
#include "ert/geometry.hpp"
#include "ert/grid.hpp"
#include "ert/parallel.hpp"
#include "ert/phantom.hpp"
#include "ert/quadrature.hpp"
#include "ert/sinogram.hpp"
#include "ert/transform.hpp"

namespace ert {

/// Band-limited approximate delta at radius r:
///   delta^{1/rho}(x) = (2 pi)^{-2} int_{||t|| < 1/rho} e^{i x.t} dt
///                    = (1/(2 pi rho)) J1(r/rho) / r,   r = ||x||,
/// with the limit 1/(4 pi rho^2) at r = 0.
inline double approx_delta(double rho, double r) {
    if (!(rho > 0.0)) throw std::invalid_argument("approx_delta: rho must be > 0");
    if (r < 0.0) throw std::invalid_argument("approx_delta: r must be >= 0");
    if (r <= 1e-12) return 1.0 / (4.0 * std::numbers::pi * rho * rho);
    return bessel_j1(r / rho) / (2.0 * std::numbers::pi * rho * r);
}

namespace detail {

struct ComponentGeometry {
    Vec2 center;
    double radius;  // disk radius or bump scale
};

inline ComponentGeometry component_geometry(const PhantomComponent& comp) {
    if (const auto* d = std::get_if<DiskComponent>(&comp)) return {d->center, d->radius};
    const auto& b = std::get<BumpComponent>(comp);
    return {b.center, b.scale};
}

/// Mean of a component over the circle of radius r centered at x.
/// Disks reduce to the exact arc fraction; bumps are integrated adaptively
/// over the (symmetric) arc that meets their support.
inline double circle_mean(const PhantomComponent& comp, Vec2 x, double r, double ang_tol) {
    const auto geom = component_geometry(comp);
    const Vec2 offset = geom.center - x;
    const double dist = offset.norm();
    const double pi = std::numbers::pi;

    if (r <= 0.0) return eval_component(comp, x);
    // circle misses the support annulus entirely
    if (r <= dist - geom.radius || r >= dist + geom.radius) return 0.0;

    if (dist < 1e-14) {
        // concentric circle: the component is radial about x
        return eval_component(comp, {x.x + r, x.y});
    }

    // half-angle of the arc inside the component's support circle
    double cos_gamma = (dist * dist + r * r - geom.radius * geom.radius) / (2.0 * dist * r);
    cos_gamma = std::clamp(cos_gamma, -1.0, 1.0);
    const double gamma = std::acos(cos_gamma);

    if (std::get_if<DiskComponent>(&comp)) {
        const auto& d = std::get<DiskComponent>(comp);
        return d.amplitude * gamma / pi;  // exact angular integration of the indicator
    }

    const auto& b = std::get<BumpComponent>(comp);
    const double alpha0 = std::atan2(offset.y, offset.x);
    const auto arc_value = [&](double a) {
        const Vec2 p{x.x + r * std::cos(alpha0 + a), x.y + r * std::sin(alpha0 + a)};
        const double rr = (p - b.center).norm_sq() / (b.scale * b.scale);
        if (rr >= 1.0) return 0.0;
        return b.amplitude * std::exp(1.0 - 1.0 / (1.0 - rr));
    };
    // integrand is even in the arc parameter
    if (gamma <= 0.0) return 0.0;
    const double integral = integrate_adaptive(arc_value, 0.0, gamma, 0.5 * pi * ang_tol);
    return integral / pi;
}

inline double smoothed_component(const PhantomComponent& comp, double rho, Vec2 x,
                                 double abs_tol) {
    const auto geom = component_geometry(comp);
    const double dist = (geom.center - x).norm();
    const double r_lo = std::max(0.0, dist - geom.radius);
    const double r_hi = dist + geom.radius;
    if (r_hi <= r_lo) return 0.0;

    // F = int_{r_lo}^{r_hi} (J1(r/rho)/rho) * mean_on_circle(r) dr,
    // split at the oscillation scale of J1 (and at the disk kink radii, which
    // coincide with the segment endpoints).
    const double seg_target = std::numbers::pi * rho;
    const int n_seg = std::max(1, static_cast<int>(std::ceil((r_hi - r_lo) / seg_target)));
    const double seg_len = (r_hi - r_lo) / n_seg;
    const double ang_tol = abs_tol / 50.0;
    const auto radial = [&](double r) {
        return bessel_j1(r / rho) / rho * circle_mean(comp, x, r, ang_tol);
    };
    double total = 0.0;
    const double seg_tol = 0.5 * abs_tol / n_seg;
    for (int i = 0; i < n_seg; ++i)
        total += integrate_adaptive(radial, r_lo + i * seg_len, r_lo + (i + 1) * seg_len, seg_tol);
    return total;
}

}  // namespace detail

/// f_rho(x) = (delta^{1/rho} * f)(x) by 2-D adaptive quadrature (adaptive
/// radial panels around x, adaptive angular integration on each circle).
/// This equals the exact FBP output at bandwidth rho and the exact
/// expectation of the stochastic estimator, which makes it the oracle for
/// both.
inline double approx_smoothed(const Phantom& phantom, double rho, Vec2 x,
                              double abs_tol = 1e-8) {
    if (!(rho > 0.0)) throw std::invalid_argument("approx_smoothed: rho must be > 0");
    if (phantom.empty()) return 0.0;
    const double comp_tol = abs_tol / static_cast<double>(phantom.components().size());
    double total = 0.0;
    for (const auto& comp : phantom.components())
        total += detail::smoothed_component(comp, rho, x, comp_tol);
    return total;
}

/// Filtered backprojection f_rho = (1/4pi) T#_{-mu} (K_rho * T_mu f): convolve
/// the sinogram rows with K_rho, then apply the dual transform with weight
/// -mu at every pixel center inside the unit ball (outside pixels are 0,
/// where the data support is incomplete and f vanishes by assumption).
inline ImageGrid reconstruct(const Sinogram& g, const FilterParams& p, int n_side,
                             unsigned threads = 0) {
    if (g.mu() != p.mu)
        throw std::invalid_argument("reconstruct: filter mu must match sinogram mu");
    if (n_side < 2) throw std::invalid_argument("reconstruct: n_side must be >= 2");
    const Sinogram filtered = convolve_sinogram(g, p, threads);
    std::vector<double> values(static_cast<std::size_t>(n_side) * n_side, 0.0);
    const double h = 2.0 / n_side;
    const double scale = 1.0 / (4.0 * std::numbers::pi);
    parallel_for(static_cast<std::size_t>(n_side), [&](std::size_t j) {
        const double x = -1.0 + (static_cast<double>(j) + 0.5) * h;
        for (int k = 0; k < n_side; ++k) {
            const double y = -1.0 + (k + 0.5) * h;
            if (x * x + y * y > 1.0) continue;
            values[j * n_side + k] = scale * dual_point(filtered, {x, y}, -g.mu());
        }
    }, threads);
    return ImageGrid(n_side, std::move(values));
}

}  // namespace ert
