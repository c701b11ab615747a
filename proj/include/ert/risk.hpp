#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ert/accumulate.hpp"
#include "ert/fbp.hpp"
#include "ert/grid.hpp"
#include "ert/parallel.hpp"
#include "ert/phantom.hpp"
#include "ert/rng.hpp"
#include "ert/stochastic.hpp"

namespace ert {

enum class RiskCriterion { mse, mise };

/// Monte Carlo risk study configuration. MSE studies evaluate the estimator
/// at the single point x0; MISE studies integrate squared error over the
/// in-ball pixels of an n_side grid.
struct RiskStudyConfig {
    Phantom phantom;
    double mu = 0.0;
    NoiseModel noise;
    double beta = 2.0;
    double alpha = 1.0;
    std::vector<std::int64_t> n_values;
    int trials = 0;
    Vec2 x0;
    int n_side = 32;
    std::uint64_t master_seed = 0;
    RiskCriterion criterion = RiskCriterion::mse;

    void validate() const {
        if (n_values.empty()) throw std::invalid_argument("risk study: n_values must be nonempty");
        std::int64_t prev = 0;
        for (std::int64_t n : n_values) {
            if (n < 10) throw std::invalid_argument("risk study: each n must be >= 10");
            if (n <= prev) throw std::invalid_argument("risk study: n_values must be strictly increasing");
            prev = n;
        }
        if (trials < 2) throw std::invalid_argument("risk study: trials must be >= 2");
        if (x0.norm_sq() > 1.0) throw std::invalid_argument("risk study: ||x0|| must be <= 1");
        if (criterion == RiskCriterion::mise && n_side < 2)
            throw std::invalid_argument("risk study: n_side must be >= 2");
        if (!(beta > 1.0)) throw std::invalid_argument("risk study: beta must be > 1");
        if (!(alpha > 0.0)) throw std::invalid_argument("risk study: alpha must be > 0");
    }
};

/// One sample size worth of Monte Carlo results. With the population variance
/// convention used here, risk = bias_sq + variance holds as an algebraic
/// identity; stderr quantifies the Monte Carlo uncertainty of `risk`.
struct RiskRow {
    std::int64_t n = 0;
    double rho_n = 0.0;
    double risk = 0.0;
    double stderr_risk = 0.0;
    double bias_sq = 0.0;
    double variance = 0.0;
};

/// Least-squares fit of ln(risk) against ln(n), with the theoretical slope
/// it is compared to.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double theory_slope = 0.0;
};

/// Squared-rate exponents of the two upper-bound theorems.
inline double mse_theory_slope(double beta) { return -(2.0 * beta - 2.0) / (2.0 * beta + 1.0); }
inline double mise_theory_slope(double beta) { return -2.0 * beta / (2.0 * beta + 3.0); }

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    return pairwise_sum(v) / static_cast<double>(v.size());
}

/// Population variance (divides by the count); keeps the bias-variance
/// decomposition of the risk exact.
inline double population_variance(const std::vector<double>& v, double mean) {
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = sq(v[i] - mean);
    return pairwise_sum(dev) / static_cast<double>(v.size());
}

inline double stderr_of_mean(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    std::vector<double> dev(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) dev[i] = sq(v[i] - mean);
    const double sample_var = pairwise_sum(dev) / static_cast<double>(v.size() - 1);
    return std::sqrt(sample_var / static_cast<double>(v.size()));
}

}  // namespace detail

/// Pointwise (d1) risk study: for each n, run `trials` independent
/// observation sets at bandwidth rho_n = alpha n^{-1/(2 beta + 1)} and record
/// the Monte Carlo MSE at x0 with its bias/variance split. Trial t of sample
/// size n uses the seed mix(master_seed, n, t); trials run in parallel and
/// the aggregation order is fixed, so results do not depend on the schedule.
inline std::vector<RiskRow> run_mse_study(const RiskStudyConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    if (cfg.criterion != RiskCriterion::mse)
        throw std::invalid_argument("run_mse_study: criterion must be mse");
    const double truth = eval_phantom(cfg.phantom, cfg.x0);
    std::vector<RiskRow> rows;
    rows.reserve(cfg.n_values.size());
    for (const std::int64_t n : cfg.n_values) {
        const double rho = bandwidth_mse(n, cfg.beta, cfg.alpha);
        const EstimatorConfig est_cfg(cfg.mu, rho, cfg.beta, cfg.alpha);
        std::vector<double> estimates(static_cast<std::size_t>(cfg.trials));
        parallel_for(estimates.size(), [&](std::size_t t) {
            const std::uint64_t seed =
                mix_seed(cfg.master_seed, static_cast<std::uint64_t>(n), t);
            auto obs = observe(cfg.phantom, sample_design(n, seed), cfg.mu, cfg.noise, seed, 1);
            estimates[t] = estimator_eval(obs, est_cfg, cfg.x0);
        }, threads);
        std::vector<double> errors(estimates.size());
        for (std::size_t t = 0; t < estimates.size(); ++t) errors[t] = sq(estimates[t] - truth);
        RiskRow row;
        row.n = n;
        row.rho_n = rho;
        row.risk = detail::mean_of(errors);
        row.stderr_risk = detail::stderr_of_mean(errors, row.risk);
        const double est_mean = detail::mean_of(estimates);
        row.bias_sq = sq(est_mean - truth);
        row.variance = detail::population_variance(estimates, est_mean);
        rows.push_back(row);
    }
    return rows;
}

/// Integrated (d2) risk study: as run_mse_study, with rho_n = alpha
/// n^{-1/(2 beta + 3)} and per-trial error d2^2 = sum over in-ball pixels of
/// (f_n*(x_jk) - f(x_jk))^2 * pixel area. The decomposition uses the
/// pixelwise Monte Carlo mean image.
inline std::vector<RiskRow> run_mise_study(const RiskStudyConfig& cfg, unsigned threads = 0) {
    cfg.validate();
    if (cfg.criterion != RiskCriterion::mise)
        throw std::invalid_argument("run_mise_study: criterion must be mise");
    const int side = cfg.n_side;
    const std::size_t n_px = static_cast<std::size_t>(side) * side;
    const double px_area = sq(2.0 / side);

    // truth and in-ball mask at pixel centers
    std::vector<double> truth(n_px, 0.0);
    std::vector<bool> in_ball(n_px, false);
    const double h = 2.0 / side;
    for (int j = 0; j < side; ++j)
        for (int k = 0; k < side; ++k) {
            const Vec2 x{-1.0 + (j + 0.5) * h, -1.0 + (k + 0.5) * h};
            if (x.norm_sq() > 1.0) continue;
            in_ball[static_cast<std::size_t>(j) * side + k] = true;
            truth[static_cast<std::size_t>(j) * side + k] = eval_phantom(cfg.phantom, x);
        }

    std::vector<RiskRow> rows;
    rows.reserve(cfg.n_values.size());
    for (const std::int64_t n : cfg.n_values) {
        const double rho = bandwidth_mise(n, cfg.beta, cfg.alpha);
        const EstimatorConfig est_cfg(cfg.mu, rho, cfg.beta, cfg.alpha);
        const std::size_t trials = static_cast<std::size_t>(cfg.trials);
        std::vector<std::vector<double>> images(trials);
        parallel_for(trials, [&](std::size_t t) {
            const std::uint64_t seed =
                mix_seed(cfg.master_seed, static_cast<std::uint64_t>(n), t);
            auto obs = observe(cfg.phantom, sample_design(n, seed), cfg.mu, cfg.noise, seed, 1);
            const ImageGrid grid = estimator_grid(obs, est_cfg, side, 1);
            images[t].assign(grid.values().begin(), grid.values().end());
        }, threads);

        std::vector<double> d2(trials);
        for (std::size_t t = 0; t < trials; ++t) {
            std::vector<double> terms;
            terms.reserve(n_px);
            for (std::size_t p = 0; p < n_px; ++p)
                if (in_ball[p]) terms.push_back(sq(images[t][p] - truth[p]));
            d2[t] = pairwise_sum(terms) * px_area;
        }

        RiskRow row;
        row.n = n;
        row.rho_n = rho;
        row.risk = detail::mean_of(d2);
        row.stderr_risk = detail::stderr_of_mean(d2, row.risk);

        double bias_total = 0.0;
        double var_total = 0.0;
        std::vector<double> px_vals(trials);
        for (std::size_t p = 0; p < n_px; ++p) {
            if (!in_ball[p]) continue;
            for (std::size_t t = 0; t < trials; ++t) px_vals[t] = images[t][p];
            const double m = detail::mean_of(px_vals);
            bias_total += sq(m - truth[p]);
            var_total += detail::population_variance(px_vals, m);
        }
        row.bias_sq = bias_total * px_area;
        row.variance = var_total * px_area;
        rows.push_back(row);
    }
    return rows;
}

/// Ordinary least squares of ln(risk) on ln(n).
inline RateFit fit_rate(const std::vector<RiskRow>& rows, double theory_slope) {
    if (rows.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 rows");
    std::vector<double> lx, ly;
    for (const auto& r : rows) {
        if (!(r.risk > 0.0)) throw std::invalid_argument("fit_rate: risks must be positive");
        lx.push_back(std::log(static_cast<double>(r.n)));
        ly.push_back(std::log(r.risk));
    }
    const auto n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += sq(lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += sq(ly[i] - my);
    }
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? sq(sxy) / (sxx * syy) : 1.0;
    fit.theory_slope = theory_slope;
    return fit;
}

/// Bandwidth sweep at fixed n: deterministic squared bias against the
/// smoothing oracle f_rho (no Monte Carlo error on the bias side) and the
/// trial variance of the estimator at x0.
struct BiasVariancePoint {
    double rho = 0.0;
    double bias_sq = 0.0;
    double variance = 0.0;
};

inline std::vector<BiasVariancePoint> bias_variance_profile(const RiskStudyConfig& cfg,
                                                            const std::vector<double>& rho_values,
                                                            std::int64_t n,
                                                            unsigned threads = 0) {
    if (n < 10) throw std::invalid_argument("bias_variance_profile: n must be >= 10");
    if (cfg.trials < 2) throw std::invalid_argument("bias_variance_profile: trials must be >= 2");
    const double truth = eval_phantom(cfg.phantom, cfg.x0);
    std::vector<BiasVariancePoint> out;
    out.reserve(rho_values.size());
    for (std::size_t ri = 0; ri < rho_values.size(); ++ri) {
        const double rho = rho_values[ri];
        if (!(rho > 0.0))
            throw std::invalid_argument("bias_variance_profile: rho values must be > 0");
        const EstimatorConfig est_cfg(cfg.mu, rho, cfg.beta, cfg.alpha);
        std::vector<double> estimates(static_cast<std::size_t>(cfg.trials));
        parallel_for(estimates.size(), [&](std::size_t t) {
            const std::uint64_t seed = mix_seed(mix_seed(cfg.master_seed, 0x9000 + ri),
                                                static_cast<std::uint64_t>(n), t);
            auto obs = observe(cfg.phantom, sample_design(n, seed), cfg.mu, cfg.noise, seed, 1);
            estimates[t] = estimator_eval(obs, est_cfg, cfg.x0);
        }, threads);
        BiasVariancePoint pt;
        pt.rho = rho;
        pt.bias_sq = sq(approx_smoothed(cfg.phantom, rho, cfg.x0) - truth);
        const double m = detail::mean_of(estimates);
        pt.variance = detail::population_variance(estimates, m);
        out.push_back(pt);
    }
    return out;
}

// ---- study file format ----
// CSV header n,rho,risk,stderr,bias_sq,variance; a rate fit, when present,
// is appended after the rows as a single JSON line.

inline void write_risk_csv(const std::vector<RiskRow>& rows, const std::string& path,
                           const RateFit* fit = nullptr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("risk csv: cannot write " + path);
    out << "n,rho,risk,stderr,bias_sq,variance\n";
    for (const auto& r : rows)
        out << r.n << ',' << detail::format_double(r.rho_n) << ',' << detail::format_double(r.risk)
            << ',' << detail::format_double(r.stderr_risk) << ','
            << detail::format_double(r.bias_sq) << ',' << detail::format_double(r.variance)
            << '\n';
    if (fit) {
        nlohmann::json j{{"slope", fit->slope},
                         {"intercept", fit->intercept},
                         {"r_squared", fit->r_squared},
                         {"theory_slope", fit->theory_slope}};
        out << j.dump() << '\n';
    }
    if (!out) throw std::runtime_error("risk csv: write failed for " + path);
}

inline std::vector<RiskRow> read_risk_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("risk csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "n,rho,risk,stderr,bias_sq,variance")
        throw std::invalid_argument("risk csv: bad header in " + path);
    std::vector<RiskRow> rows;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '{') break;  // trailing rate-fit JSON
        RiskRow r;
        long long n = 0;
        if (std::sscanf(line.c_str(), "%lld,%lf,%lf,%lf,%lf,%lf", &n, &r.rho_n, &r.risk,
                        &r.stderr_risk, &r.bias_sq, &r.variance) != 6)
            throw std::invalid_argument("risk csv: bad row in " + path);
        r.n = n;
        rows.push_back(r);
    }
    return rows;
}

}  // namespace ert
