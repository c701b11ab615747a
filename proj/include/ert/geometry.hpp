#pragma once

#include <cmath>

namespace ert {

/// 2-D point / vector with double components.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double c) const { return {x * c, y * c}; }

    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm_sq() const { return x * x + y * y; }

    /// Rotation by +90 degrees; maps theta to theta-perp.
    constexpr Vec2 perp() const { return {-y, x}; }
};

constexpr Vec2 operator*(double c, Vec2 v) { return {c * v.x, c * v.y}; }

/// Line L(theta, s) = {x : x.theta = s} with theta = (cos phi, sin phi).
/// The perpendicular is fixed as the +90-degree rotation (-sin phi, cos phi).
struct Ray {
    double phi = 0.0;  // angle of theta in [0, 2*pi)
    double s = 0.0;    // signed offset in [-1, 1]

    Vec2 theta() const { return {std::cos(phi), std::sin(phi)}; }
    Vec2 theta_perp() const { return theta().perp(); }

    /// Point on the line at signed distance t along theta-perp.
    Vec2 point_at(double t) const {
        const Vec2 th = theta();
        return {s * th.x - t * th.y, s * th.y + t * th.x};
    }
};

}  // namespace ert
