#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ert/accumulate.hpp"
#include "ert/filter.hpp"
#include "ert/geometry.hpp"
#include "ert/grid.hpp"
#include "ert/parallel.hpp"
#include "ert/phantom.hpp"
#include "ert/quadrature.hpp"
#include "ert/rng.hpp"
#include "ert/transform.hpp"

namespace ert {

namespace detail {
// separate Philox streams for the design and the noise
inline constexpr std::uint32_t kDesignStream = 0;
inline constexpr std::uint32_t kNoiseStream = 1;
}  // namespace detail

/// Observation noise with zero mean and variance sigma^2. The gaussian
/// satisfies the Kullback bound with I0 = 1/(2 sigma^2) exactly; the uniform
/// model (half-width sigma*sqrt(3)) demonstrates that only a finite variance
/// is required by the observation model.
struct NoiseModel {
    enum class Kind { none, gaussian, uniform };

    Kind kind = Kind::none;
    double sigma = 0.0;

    static NoiseModel none() { return {Kind::none, 0.0}; }
    static NoiseModel gaussian(double sigma) {
        if (!(sigma >= 0.0)) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
        return {Kind::gaussian, sigma};
    }
    static NoiseModel uniform(double sigma) {
        if (!(sigma >= 0.0)) throw std::invalid_argument("NoiseModel: sigma must be >= 0");
        return {Kind::uniform, sigma};
    }

    double sample(const CounterRng& rng, std::uint64_t i) const {
        switch (kind) {
            case Kind::none: return 0.0;
            case Kind::gaussian: return sigma * rng.gaussian(i);
            case Kind::uniform: {
                const auto [u, v] = rng.uniform_pair(i);
                (void)v;
                return sigma * std::sqrt(3.0) * (2.0 * u - 1.0);
            }
        }
        return 0.0;
    }
};

/// Random design plus observations Y_i = T_mu f(theta_i, s_i) + eps_i.
/// Immutable; reproducible from (seed, size, noise) alone.
struct ObservationSet {
    std::vector<Ray> rays;
    std::vector<double> y;
    double mu = 0.0;
    std::uint64_t seed = 0;
    NoiseModel noise;

    std::size_t size() const { return rays.size(); }
};

/// n design points i.i.d. uniform on Z = S^1 x [-1,1] (density 1/(4 pi)),
/// generated by a counter-based stream keyed on (seed, i): any subsequence is
/// reproducible independently of evaluation order.
inline std::vector<Ray> sample_design(std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_design: n must be >= 1");
    const CounterRng rng(seed, detail::kDesignStream);
    std::vector<Ray> rays(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < rays.size(); ++i) {
        const auto [u, v] = rng.uniform_pair(i);
        rays[i] = Ray{2.0 * std::numbers::pi * u, -1.0 + 2.0 * v};
    }
    return rays;
}

/// Evaluate the forward transform along the given rays and add noise drawn
/// from a stream independent of the design.
inline ObservationSet observe(const Phantom& phantom, std::vector<Ray> rays, double mu,
                              const NoiseModel& noise, std::uint64_t seed,
                              unsigned threads = 0) {
    if (rays.empty()) throw std::invalid_argument("observe: rays must be nonempty");
    ObservationSet obs;
    obs.rays = std::move(rays);
    obs.y.resize(obs.rays.size());
    obs.mu = mu;
    obs.seed = seed;
    obs.noise = noise;
    const CounterRng noise_rng(seed, detail::kNoiseStream);
    parallel_for(obs.rays.size(), [&](std::size_t i) {
        obs.y[i] = forward_point(phantom, obs.rays[i], mu) + noise.sample(noise_rng, i);
    }, threads);
    return obs;
}

/// Estimator configuration: attenuation, bandwidth, and the smoothness/prefactor
/// knobs that produce the bandwidth.
struct EstimatorConfig {
    double mu = 0.0;
    double rho_n = 0.0;
    double beta = 2.0;
    double alpha = 1.0;

    EstimatorConfig(double mu_, double rho_n_, double beta_ = 2.0, double alpha_ = 1.0)
        : mu(mu_), rho_n(rho_n_), beta(beta_), alpha(alpha_) {
        if (!(rho_n > 0.0)) throw std::invalid_argument("EstimatorConfig: rho_n must be > 0");
        if (!(beta > 1.0)) throw std::invalid_argument("EstimatorConfig: beta must be > 1");
    }
};

/// MSE-optimal bandwidth alpha * n^{-1/(2 beta + 1)}.
inline double bandwidth_mse(std::int64_t n, double beta, double alpha) {
    if (n < 1) throw std::invalid_argument("bandwidth_mse: n must be >= 1");
    if (!(beta > 1.0)) throw std::invalid_argument("bandwidth_mse: beta must be > 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("bandwidth_mse: alpha must be > 0");
    return alpha * std::pow(static_cast<double>(n), -1.0 / (2.0 * beta + 1.0));
}

/// MISE-optimal bandwidth alpha * n^{-1/(2 beta + 3)}.
inline double bandwidth_mise(std::int64_t n, double beta, double alpha) {
    if (n < 1) throw std::invalid_argument("bandwidth_mise: n must be >= 1");
    if (!(beta > 1.0)) throw std::invalid_argument("bandwidth_mise: beta must be > 1");
    if (!(alpha > 0.0)) throw std::invalid_argument("bandwidth_mise: alpha must be > 0");
    return alpha * std::pow(static_cast<double>(n), -1.0 / (2.0 * beta + 3.0));
}

namespace detail {

/// Per-observation precomputation shared by point and grid evaluation.
struct ObsTable {
    std::vector<double> cos_phi, sin_phi, s, y;

    explicit ObsTable(const ObservationSet& obs) {
        const std::size_t n = obs.size();
        cos_phi.resize(n);
        sin_phi.resize(n);
        s.resize(n);
        y.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            cos_phi[i] = std::cos(obs.rays[i].phi);
            sin_phi[i] = std::sin(obs.rays[i].phi);
            s[i] = obs.rays[i].s;
            y[i] = obs.y[i];
        }
    }
};

/// f_n*(x) = (1/n) sum_i e^{-mu x.theta_i_perp} K_rho(x.theta_i - s_i) Y_i,
/// with the terms materialized and pairwise-summed so the result is bitwise
/// reproducible for a fixed observation set.
inline double estimator_accumulate(const ObsTable& tab, const FilterParams& kernel_params,
                                   double mu, Vec2 x, std::vector<double>& scratch) {
    const std::size_t n = tab.s.size();
    scratch.resize(n);
    const double B = kernel_params.band_edge();
    const double m = std::abs(kernel_params.mu);
    const double pi = std::numbers::pi;
    const double half_sum = 0.5 * (B + m);
    const double half_diff = 0.5 * (B - m);
    const double band_sq = 1.0 / (kernel_params.rho * kernel_params.rho);
    const double taylor0 = 1.0 / (2.0 * pi * kernel_params.rho * kernel_params.rho);
    const double taylor2 = band_sq * (band_sq + 2.0 * m * m) / (8.0 * pi);
    for (std::size_t i = 0; i < n; ++i) {
        const double x_dot_theta = x.x * tab.cos_phi[i] + x.y * tab.sin_phi[i];
        const double x_dot_perp = -x.x * tab.sin_phi[i] + x.y * tab.cos_phi[i];
        const double s = x_dot_theta - tab.s[i];
        // inlined kernel_value (identical arithmetic)
        double kv;
        if (std::abs(s) < 1e-6) {
            kv = taylor0 - s * s * taylor2;
        } else {
            const double t1 = (B * std::sin(s * B) - m * std::sin(s * m)) / s;
            const double t2 = -2.0 * std::sin(s * half_sum) * std::sin(s * half_diff) / (s * s);
            kv = (t1 + t2) / pi;
        }
        scratch[i] = std::exp(-mu * x_dot_perp) * kv * tab.y[i];
    }
    return pairwise_sum(scratch) / static_cast<double>(n);
}

}  // namespace detail

/// Kernel estimator f_n* at a single point.
inline double estimator_eval(const ObservationSet& obs, const EstimatorConfig& cfg, Vec2 x) {
    if (x.norm_sq() > 1.0) throw std::domain_error("estimator_eval: ||x|| must be <= 1");
    if (cfg.mu != obs.mu)
        throw std::invalid_argument("estimator_eval: config mu must match observations");
    const FilterParams kernel_params(cfg.rho_n, cfg.mu);
    const detail::ObsTable tab(obs);
    std::vector<double> scratch;
    return detail::estimator_accumulate(tab, kernel_params, cfg.mu, x, scratch);
}

/// Kernel estimator evaluated at every pixel center inside the unit ball
/// (outside pixels are 0, matching the reconstruction convention).
inline ImageGrid estimator_grid(const ObservationSet& obs, const EstimatorConfig& cfg,
                                int n_side, unsigned threads = 0) {
    if (n_side < 2) throw std::invalid_argument("estimator_grid: n_side must be >= 2");
    if (cfg.mu != obs.mu)
        throw std::invalid_argument("estimator_grid: config mu must match observations");
    const FilterParams kernel_params(cfg.rho_n, cfg.mu);
    const detail::ObsTable tab(obs);
    std::vector<double> values(static_cast<std::size_t>(n_side) * n_side, 0.0);
    const double h = 2.0 / n_side;
    parallel_for(static_cast<std::size_t>(n_side), [&](std::size_t j) {
        thread_local std::vector<double> scratch;
        const double x = -1.0 + (static_cast<double>(j) + 0.5) * h;
        for (int k = 0; k < n_side; ++k) {
            const double y = -1.0 + (k + 0.5) * h;
            if (x * x + y * y > 1.0) continue;
            values[j * n_side + k] =
                detail::estimator_accumulate(tab, kernel_params, cfg.mu, {x, y}, scratch);
        }
    }, threads);
    return ImageGrid(n_side, std::move(values));
}

/// Kullback distance between the noise law G and its shift G(. + v), together
/// with the Assumption-B1 bound I0 v^2. Gaussian: both equal v^2/(2 sigma^2)
/// (the bound is tight, with no restriction on v). Uniform: the shifted
/// supports differ, so the distance is infinite for v != 0 and no finite I0
/// exists.
struct KlGap {
    double kl;
    double bound;
};

inline KlGap kl_gap_check(const NoiseModel& noise, double v) {
    switch (noise.kind) {
        case NoiseModel::Kind::gaussian: {
            if (!(noise.sigma > 0.0))
                throw std::invalid_argument("kl_gap_check: gaussian sigma must be > 0");
            const double kl = v * v / (2.0 * noise.sigma * noise.sigma);
            return {kl, kl};
        }
        case NoiseModel::Kind::uniform: {
            if (!(noise.sigma > 0.0))
                throw std::invalid_argument("kl_gap_check: uniform sigma must be > 0");
            if (v == 0.0) return {0.0, 0.0};
            const double inf = std::numeric_limits<double>::infinity();
            return {inf, inf};
        }
        case NoiseModel::Kind::none:
            throw std::invalid_argument("kl_gap_check: noise model has no density");
    }
    throw std::invalid_argument("kl_gap_check: unknown noise kind");
}

/// Direct quadrature of int ln(g(u)/g(u+v)) g(u) du for noise laws with a
/// density; the independent numerical route for checking the analytic value.
inline double kl_gap_quadrature(const NoiseModel& noise, double v, double abs_tol = 1e-10) {
    if (noise.kind == NoiseModel::Kind::gaussian) {
        if (!(noise.sigma > 0.0))
            throw std::invalid_argument("kl_gap_quadrature: gaussian sigma must be > 0");
        const double s2 = noise.sigma * noise.sigma;
        const auto integrand = [&](double u) {
            const double g = std::exp(-u * u / (2.0 * s2)) / std::sqrt(2.0 * std::numbers::pi * s2);
            const double log_ratio = ((u + v) * (u + v) - u * u) / (2.0 * s2);
            return log_ratio * g;
        };
        const double lim = 12.0 * noise.sigma + std::abs(v);
        return integrate_adaptive(integrand, -lim, lim, abs_tol);
    }
    if (noise.kind == NoiseModel::Kind::uniform) {
        if (v == 0.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    throw std::invalid_argument("kl_gap_quadrature: noise model has no density");
}

// ---- observation file format ----
// CSV "phi,s,y" plus a JSON sidecar {mu, seed, noise:{kind, sigma}, n}

inline const char* noise_kind_name(NoiseModel::Kind kind) {
    switch (kind) {
        case NoiseModel::Kind::none: return "none";
        case NoiseModel::Kind::gaussian: return "gaussian";
        case NoiseModel::Kind::uniform: return "uniform";
    }
    return "none";
}

inline NoiseModel::Kind noise_kind_from_name(const std::string& name) {
    if (name == "none") return NoiseModel::Kind::none;
    if (name == "gaussian") return NoiseModel::Kind::gaussian;
    if (name == "uniform") return NoiseModel::Kind::uniform;
    throw std::invalid_argument("unknown noise kind \"" + name + "\"");
}

inline void write_observations(const ObservationSet& obs, const std::string& csv_path,
                               const std::string& sidecar_path) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::invalid_argument("observations: cannot write " + csv_path);
    out << "phi,s,y\n";
    for (std::size_t i = 0; i < obs.size(); ++i)
        out << detail::format_double(obs.rays[i].phi) << ',' << detail::format_double(obs.rays[i].s)
            << ',' << detail::format_double(obs.y[i]) << '\n';
    if (!out) throw std::runtime_error("observations: write failed for " + csv_path);

    nlohmann::json sidecar{
        {"mu", obs.mu},
        {"seed", obs.seed},
        {"noise", {{"kind", noise_kind_name(obs.noise.kind)}, {"sigma", obs.noise.sigma}}},
        {"n", obs.size()},
    };
    std::ofstream side(sidecar_path, std::ios::binary);
    if (!side) throw std::invalid_argument("observations: cannot write " + sidecar_path);
    side << sidecar.dump(2) << '\n';
}

inline ObservationSet read_observations(const std::string& csv_path,
                                        const std::string& sidecar_path) {
    std::ifstream side(sidecar_path);
    if (!side) throw std::invalid_argument("observations: cannot open " + sidecar_path);
    nlohmann::json meta;
    side >> meta;

    ObservationSet obs;
    obs.mu = meta.at("mu").get<double>();
    obs.seed = meta.at("seed").get<std::uint64_t>();
    obs.noise.kind = noise_kind_from_name(meta.at("noise").at("kind").get<std::string>());
    obs.noise.sigma = meta.at("noise").at("sigma").get<double>();

    std::ifstream in(csv_path);
    if (!in) throw std::invalid_argument("observations: cannot open " + csv_path);
    std::string line;
    if (!std::getline(in, line) || line != "phi,s,y")
        throw std::invalid_argument("observations: bad CSV header in " + csv_path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        double phi, s, y;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &phi, &s, &y) != 3)
            throw std::invalid_argument("observations: bad CSV row in " + csv_path);
        obs.rays.push_back(Ray{phi, s});
        obs.y.push_back(y);
    }
    const auto n = meta.at("n").get<std::size_t>();
    if (obs.size() != n)
        throw std::invalid_argument("observations: row count does not match sidecar n");
    return obs;
}

}  // namespace ert
