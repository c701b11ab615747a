#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace ert {

namespace detail {

// Gauss-Kronrod 15(7) nodes/weights on [-1, 1] (QUADPACK values).
// Odd-indexed nodes are the embedded 7-point Gauss rule.
inline constexpr double kGk15Nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double kGk15Weights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
inline constexpr double kGauss7Weights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

struct GkPanel {
    double a;
    double b;
    double value;
    double error;

    // worst error first; ties broken by position so the refinement order is
    // a pure function of the panel set
    bool operator<(const GkPanel& o) const {
        if (error != o.error) return error < o.error;
        return a > o.a;
    }
};

template <typename F>
GkPanel gk15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = 0.0;
    double gauss = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double offset = half * kGk15Nodes[i];
        const double fsum =
            (i == 7) ? f(center) : f(center - offset) + f(center + offset);
        kronrod += kGk15Weights[i] * fsum;
        if (i % 2 == 1) gauss += kGauss7Weights[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod 15(7) quadrature of f over [a, b]:
/// repeatedly bisects the panel with the largest error estimate until the
/// total estimated error drops below abs_tol (or the panel budget runs out,
/// which in practice means the estimate sits at the floating-point floor).
/// Deterministic: the refinement sequence depends only on (f, a, b, abs_tol).
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol,
                          std::size_t max_panels = 20000) {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate_adaptive: abs_tol must be > 0");
    if (a == b) return 0.0;

    std::priority_queue<detail::GkPanel> panels;
    panels.push(detail::gk15(f, a, b));
    double total_error = panels.top().error;
    while (total_error > abs_tol && panels.size() < max_panels) {
        const detail::GkPanel worst = panels.top();
        // splitting cannot improve a panel at the rounding floor
        if (worst.error <= 1e-16 * std::abs(worst.value) + 1e-300) break;
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::gk15(f, worst.a, mid);
        const auto right = detail::gk15(f, mid, worst.b);
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
    }
    // ordered accumulation: drain into position order for a schedule-free sum
    std::vector<detail::GkPanel> ordered;
    ordered.reserve(panels.size());
    while (!panels.empty()) {
        ordered.push_back(panels.top());
        panels.pop();
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const detail::GkPanel& x, const detail::GkPanel& y) { return x.a < y.a; });
    double total = 0.0;
    for (const auto& p : ordered) total += p.value;
    return total;
}

/// Quadrature of a smooth periodic function over one full period using the
/// trapezoid rule with doubling; converges spectrally for smooth integrands.
/// Returns once two consecutive refinements agree to abs_tol (and at least
/// min_points samples were used).
template <typename F>
double integrate_periodic(F&& f, double period, double abs_tol,
                          std::size_t min_points = 16,
                          std::size_t max_points = (1u << 20)) {
    if (!(abs_tol > 0.0)) throw std::invalid_argument("integrate_periodic: abs_tol must be > 0");
    std::size_t n = min_points;
    double sum = 0.0;
    for (std::size_t k = 0; k < n; ++k) sum += f(period * static_cast<double>(k) / static_cast<double>(n));
    double integral = sum * period / static_cast<double>(n);
    while (n < max_points) {
        // refine: add midpoints of the current sampling
        double odd = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            odd += f(period * (static_cast<double>(k) + 0.5) / static_cast<double>(n));
        n *= 2;
        sum += odd;
        const double refined = sum * period / static_cast<double>(n);
        if (std::abs(refined - integral) <= abs_tol) return refined;
        integral = refined;
    }
    return integral;
}

}  // namespace ert
