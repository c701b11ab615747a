#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ert/grid.hpp"

namespace ert {

/// Sampled function on the cylinder Z = S^1 x [-1,1]: uniform angles
/// phi_j = 2*pi*j/n_theta and s-samples at the centers of [-1,1] subintervals,
/// stored row-major (theta major). Carries the attenuation constant mu of the
/// transform that produced it.
class Sinogram {
  public:
    Sinogram(int n_theta, int n_s, double mu, std::vector<double> values)
        : n_theta_(n_theta), n_s_(n_s), mu_(mu), values_(std::move(values)) {
        if (n_theta_ < 2 || n_s_ < 2)
            throw std::invalid_argument("Sinogram: n_theta and n_s must be >= 2");
        if (values_.size() != static_cast<std::size_t>(n_theta_) * n_s_)
            throw std::invalid_argument("Sinogram: value count must be n_theta*n_s");
        for (double v : values_)
            if (!std::isfinite(v)) throw std::invalid_argument("Sinogram: values must be finite");
    }

    static Sinogram zeros(int n_theta, int n_s, double mu) {
        return Sinogram(n_theta, n_s, mu,
                        std::vector<double>(static_cast<std::size_t>(n_theta) * n_s, 0.0));
    }

    int n_theta() const { return n_theta_; }
    int n_s() const { return n_s_; }
    double mu() const { return mu_; }
    std::span<const double> values() const { return values_; }

    double phi(int j) const { return 2.0 * std::numbers::pi * j / n_theta_; }
    double s_step() const { return 2.0 / n_s_; }
    double s_center(int k) const { return -1.0 + (k + 0.5) * s_step(); }
    double value(int j, int k) const { return values_[static_cast<std::size_t>(j) * n_s_ + k]; }

    /// Piecewise-linear interpolation along s within one theta row; clamps to
    /// the nearest sample in the half-pixel bands next to s = -1 and s = 1,
    /// and to 0 outside [-1, 1] (data vanishes there by the support
    /// assumption on f).
    double interp_s(int j, double s) const {
        if (std::abs(s) > 1.0) return 0.0;
        const double step = s_step();
        double u = (s + 1.0) / step - 0.5;
        if (u <= 0.0) return value(j, 0);
        if (u >= n_s_ - 1) return value(j, n_s_ - 1);
        const double fu = std::floor(u);
        const int k0 = static_cast<int>(fu);
        const double a = u - fu;
        return (1.0 - a) * value(j, k0) + a * value(j, k0 + 1);
    }

  private:
    int n_theta_;
    int n_s_;
    double mu_;
    std::vector<double> values_;
};

// ---- file format ----
// "ERTSINO v1 <n_theta> <n_s> <mu>\n" then values row-major (theta major)

inline void write_sinogram(const Sinogram& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("sinogram: cannot write " + path);
    out << "ERTSINO v1 " << g.n_theta() << ' ' << g.n_s() << ' '
        << detail::format_double(g.mu()) << '\n';
    for (int j = 0; j < g.n_theta(); ++j) {
        for (int k = 0; k < g.n_s(); ++k) {
            out << detail::format_double(g.value(j, k));
            out << (k + 1 == g.n_s() ? '\n' : ' ');
        }
    }
    if (!out) throw std::runtime_error("sinogram: write failed for " + path);
}

inline Sinogram read_sinogram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("sinogram: cannot open " + path);
    std::string tag, version;
    int n_theta = 0, n_s = 0;
    double mu = 0.0;
    in >> tag >> version >> n_theta >> n_s >> mu;
    if (!in || tag != "ERTSINO" || version != "v1" || n_theta < 2 || n_s < 2)
        throw std::invalid_argument("sinogram: bad header in " + path);
    std::vector<double> values(static_cast<std::size_t>(n_theta) * n_s);
    for (auto& v : values)
        if (!(in >> v)) throw std::invalid_argument("sinogram: truncated data in " + path);
    return Sinogram(n_theta, n_s, mu, std::move(values));
}

/// CSV export with columns phi, s, value (one row per sample).
inline void write_sinogram_csv(const Sinogram& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("sinogram: cannot write " + path);
    out << "phi,s,value\n";
    for (int j = 0; j < g.n_theta(); ++j)
        for (int k = 0; k < g.n_s(); ++k)
            out << detail::format_double(g.phi(j)) << ',' << detail::format_double(g.s_center(k))
                << ',' << detail::format_double(g.value(j, k)) << '\n';
    if (!out) throw std::runtime_error("sinogram: write failed for " + path);
}

}  // namespace ert
