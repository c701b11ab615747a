#pragma once

#include <cstddef>
#include <span>

namespace ert {

/// Pairwise (cascade) summation. Deterministic for a fixed value sequence and
/// independent of any threading around it; error grows like O(log n) instead
/// of O(n) for naive accumulation.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double acc = 0.0;
        for (double x : v) acc += x;
        return acc;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

constexpr double sq(double x) { return x * x; }

}  // namespace ert
