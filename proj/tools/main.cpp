// ert -- command line driver for the exponential Radon transform toolkit.
//
// Subcommands: phantom, sinogram, fbp, estimate, risk, rate-fit.
// Every command is a pure function of its flags plus an optional JSON config
// (flags take precedence); all randomness flows from --seed, so re-runs
// produce byte-identical output files.

#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ert/ert.hpp"

namespace {

// exit code 3: computation declined on degenerate inputs
struct DeclinedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config " + path);
    nlohmann::json j;
    in >> j;
    return j;
}

/// Fill options that were not given on the command line from the JSON config.
template <typename T>
void merge(const nlohmann::json& cfg, const CLI::Option* opt, const char* key, T& value) {
    if (opt != nullptr && opt->count() > 0) return;  // flag wins
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

void require_set(bool present, const char* what) {
    if (!present) throw std::invalid_argument(std::string("missing required option ") + what);
}

ert::NoiseModel make_noise(const std::string& kind, double sigma) {
    switch (ert::noise_kind_from_name(kind)) {
        case ert::NoiseModel::Kind::none: return ert::NoiseModel::none();
        case ert::NoiseModel::Kind::gaussian: return ert::NoiseModel::gaussian(sigma);
        case ert::NoiseModel::Kind::uniform: return ert::NoiseModel::uniform(sigma);
    }
    return ert::NoiseModel::none();
}

ert::Vec2 parse_point(const std::string& text) {
    double x = 0.0, y = 0.0;
    if (std::sscanf(text.c_str(), "%lf,%lf", &x, &y) != 2)
        throw std::invalid_argument("expected a point as \"x,y\", got \"" + text + "\"");
    return {x, y};
}

std::vector<std::int64_t> parse_int_list(const std::string& text) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        out.push_back(std::stoll(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty()) throw std::invalid_argument("expected a comma-separated integer list");
    return out;
}

void print_grid_summary(const ert::ImageGrid& grid) {
    double lo = grid.values().front(), hi = lo;
    for (double v : grid.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::cout << "grid " << grid.n_side() << "x" << grid.n_side() << " min "
              << ert::detail::format_double(lo) << " max " << ert::detail::format_double(hi)
              << "\n";
}

void print_sinogram_summary(const ert::Sinogram& g) {
    double lo = g.values().front(), hi = lo;
    for (double v : g.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::cout << "sinogram " << g.n_theta() << "x" << g.n_s() << " mu "
              << ert::detail::format_double(g.mu()) << " min " << ert::detail::format_double(lo)
              << " max " << ert::detail::format_double(hi) << "\n";
}

// ---------------------------------------------------------------- phantom --
int cmd_phantom(const std::string& config_path, std::string phantom_path, int n_side,
                std::string out, bool binary, unsigned threads,
                const CLI::Option* o_phantom, const CLI::Option* o_nside,
                const CLI::Option* o_out, const CLI::Option* o_binary) {
    nlohmann::json cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    merge(cfg, o_phantom, "phantom", phantom_path);
    merge(cfg, o_nside, "nside", n_side);
    merge(cfg, o_out, "out", out);
    bool binary_value = binary;
    merge(cfg, o_binary, "binary", binary_value);
    require_set(!phantom_path.empty(), "--phantom");
    require_set(!out.empty(), "--out");

    const ert::Phantom phantom = ert::load_phantom(phantom_path);
    const ert::ImageGrid grid = ert::rasterize(phantom, n_side, threads);
    if (binary_value)
        ert::write_grid_binary(grid, out);
    else
        ert::write_grid_text(grid, out);
    print_grid_summary(grid);
    return 0;
}

// --------------------------------------------------------------- sinogram --
int cmd_sinogram(const std::string& config_path, std::string phantom_path, double mu,
                 int n_theta, int n_s, std::string out, std::string csv, unsigned threads,
                 const CLI::Option* o_phantom, const CLI::Option* o_mu,
                 const CLI::Option* o_ntheta, const CLI::Option* o_ns,
                 const CLI::Option* o_out, const CLI::Option* o_csv) {
    nlohmann::json cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    merge(cfg, o_phantom, "phantom", phantom_path);
    merge(cfg, o_mu, "mu", mu);
    merge(cfg, o_ntheta, "ntheta", n_theta);
    merge(cfg, o_ns, "ns", n_s);
    merge(cfg, o_out, "out", out);
    merge(cfg, o_csv, "csv", csv);
    require_set(!phantom_path.empty(), "--phantom");
    require_set(!out.empty(), "--out");

    const ert::Phantom phantom = ert::load_phantom(phantom_path);
    const ert::Sinogram sino = ert::forward_sinogram(phantom, n_theta, n_s, mu, threads);
    ert::write_sinogram(sino, out);
    if (!csv.empty()) ert::write_sinogram_csv(sino, csv);
    print_sinogram_summary(sino);
    return 0;
}

// -------------------------------------------------------------------- fbp --
int cmd_fbp(const std::string& config_path, std::string sino_path, double rho, int n_side,
            std::string out, unsigned threads, const CLI::Option* o_sino,
            const CLI::Option* o_rho, const CLI::Option* o_nside, const CLI::Option* o_out) {
    nlohmann::json cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    merge(cfg, o_sino, "sinogram", sino_path);
    merge(cfg, o_rho, "rho", rho);
    merge(cfg, o_nside, "nside", n_side);
    merge(cfg, o_out, "out", out);
    require_set(!sino_path.empty(), "--sinogram");
    require_set(rho > 0.0, "--rho (must be > 0)");
    require_set(!out.empty(), "--out");

    const ert::Sinogram sino = ert::read_sinogram(sino_path);
    const ert::FilterParams params(rho, sino.mu());
    const ert::ImageGrid grid = ert::reconstruct(sino, params, n_side, threads);
    ert::write_grid_text(grid, out);
    print_grid_summary(grid);
    return 0;
}

// --------------------------------------------------------------- estimate --
int cmd_estimate(const std::string& config_path, std::string phantom_path, std::string obs_path,
                 double mu, std::int64_t n, std::uint64_t seed, std::string noise_kind,
                 double sigma, double rho, double beta, double alpha, int n_side,
                 std::string out, std::string obs_out, unsigned threads,
                 const CLI::Option* o_phantom, const CLI::Option* o_obs, const CLI::Option* o_mu,
                 const CLI::Option* o_n, const CLI::Option* o_seed, const CLI::Option* o_noise,
                 const CLI::Option* o_sigma, const CLI::Option* o_rho, const CLI::Option* o_beta,
                 const CLI::Option* o_alpha, const CLI::Option* o_nside, const CLI::Option* o_out,
                 const CLI::Option* o_obs_out) {
    nlohmann::json cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    merge(cfg, o_phantom, "phantom", phantom_path);
    merge(cfg, o_obs, "obs", obs_path);
    merge(cfg, o_mu, "mu", mu);
    merge(cfg, o_n, "n", n);
    merge(cfg, o_seed, "seed", seed);
    merge(cfg, o_noise, "noise", noise_kind);
    merge(cfg, o_sigma, "sigma", sigma);
    merge(cfg, o_rho, "rho", rho);
    merge(cfg, o_beta, "beta", beta);
    merge(cfg, o_alpha, "alpha", alpha);
    merge(cfg, o_nside, "nside", n_side);
    merge(cfg, o_out, "out", out);
    merge(cfg, o_obs_out, "obs-out", obs_out);
    require_set(!out.empty(), "--out");

    ert::ObservationSet obs;
    if (!obs_path.empty()) {
        obs = ert::read_observations(obs_path, obs_path + ".json");
        if (o_mu != nullptr && o_mu->count() > 0 && mu != obs.mu)
            throw std::invalid_argument("--mu conflicts with the observation sidecar");
    } else {
        require_set(!phantom_path.empty(), "--phantom (or --obs)");
        require_set(n >= 1, "--n (must be >= 1)");
        const ert::Phantom phantom = ert::load_phantom(phantom_path);
        obs = ert::observe(phantom, ert::sample_design(n, seed), mu, make_noise(noise_kind, sigma),
                           seed, threads);
    }
    const double bandwidth =
        rho > 0.0 ? rho : ert::bandwidth_mse(static_cast<std::int64_t>(obs.size()), beta, alpha);
    const ert::EstimatorConfig est_cfg(obs.mu, bandwidth, beta, alpha);
    const ert::ImageGrid grid = ert::estimator_grid(obs, est_cfg, n_side, threads);
    ert::write_grid_text(grid, out);
    if (!obs_out.empty()) ert::write_observations(obs, obs_out, obs_out + ".json");
    std::cout << "estimator n " << obs.size() << " rho " << ert::detail::format_double(bandwidth)
              << "\n";
    print_grid_summary(grid);
    return 0;
}

// ------------------------------------------------------------------- risk --
int cmd_risk(const std::string& config_path, std::string criterion, std::string phantom_path,
             double mu, std::string noise_kind, double sigma, double beta, double alpha,
             std::string n_list, int trials, std::string x0_text, int n_side,
             std::uint64_t seed, std::string out, unsigned threads, const CLI::Option* o_criterion,
             const CLI::Option* o_phantom, const CLI::Option* o_mu, const CLI::Option* o_noise,
             const CLI::Option* o_sigma, const CLI::Option* o_beta, const CLI::Option* o_alpha,
             const CLI::Option* o_n, const CLI::Option* o_trials, const CLI::Option* o_x0,
             const CLI::Option* o_nside, const CLI::Option* o_seed, const CLI::Option* o_out) {
    nlohmann::json cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    merge(cfg, o_criterion, "criterion", criterion);
    merge(cfg, o_phantom, "phantom", phantom_path);
    merge(cfg, o_mu, "mu", mu);
    merge(cfg, o_noise, "noise", noise_kind);
    merge(cfg, o_sigma, "sigma", sigma);
    merge(cfg, o_beta, "beta", beta);
    merge(cfg, o_alpha, "alpha", alpha);
    merge(cfg, o_n, "n", n_list);
    merge(cfg, o_trials, "trials", trials);
    merge(cfg, o_x0, "x0", x0_text);
    merge(cfg, o_nside, "nside", n_side);
    merge(cfg, o_seed, "seed", seed);
    merge(cfg, o_out, "out", out);
    require_set(!criterion.empty(), "--criterion");
    require_set(!phantom_path.empty(), "--phantom");
    require_set(!n_list.empty(), "--n");
    require_set(trials >= 2, "--trials (must be >= 2)");
    require_set(!out.empty(), "--out");
    if (criterion != "mse" && criterion != "mise")
        throw std::invalid_argument("--criterion must be mse or mise");

    ert::RiskStudyConfig study;
    study.phantom = ert::load_phantom(phantom_path);
    study.mu = mu;
    study.noise = make_noise(noise_kind, sigma);
    study.beta = beta;
    study.alpha = alpha;
    study.n_values = parse_int_list(n_list);
    study.trials = trials;
    study.x0 = parse_point(x0_text);
    study.n_side = n_side;
    study.master_seed = seed;
    study.criterion = criterion == "mse" ? ert::RiskCriterion::mse : ert::RiskCriterion::mise;

    const auto rows = study.criterion == ert::RiskCriterion::mse
                          ? ert::run_mse_study(study, threads)
                          : ert::run_mise_study(study, threads);
    bool fittable = rows.size() >= 3;
    for (const auto& r : rows) fittable = fittable && r.risk > 0.0;
    if (!fittable) {
        ert::write_risk_csv(rows, out);
        throw DeclinedError(
            "rate fit declined: need >= 3 rows with positive risks "
            "(degenerate study, CSV written without a fit)");
    }
    const double theory = study.criterion == ert::RiskCriterion::mse
                              ? ert::mse_theory_slope(beta)
                              : ert::mise_theory_slope(beta);
    const ert::RateFit fit = ert::fit_rate(rows, theory);
    ert::write_risk_csv(rows, out, &fit);
    std::cout << "slope " << ert::detail::format_double(fit.slope) << " (theory "
              << ert::detail::format_double(fit.theory_slope) << ") r_squared "
              << ert::detail::format_double(fit.r_squared) << "\n";
    return 0;
}

// --------------------------------------------------------------- rate-fit --
int cmd_rate_fit(const std::string& config_path, std::string in_path, double theory_slope,
                 std::string out, const CLI::Option* o_in, const CLI::Option* o_theory,
                 const CLI::Option* o_out) {
    nlohmann::json cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    merge(cfg, o_in, "in", in_path);
    merge(cfg, o_theory, "theory-slope", theory_slope);
    merge(cfg, o_out, "out", out);
    require_set(!in_path.empty(), "--in");

    const auto rows = ert::read_risk_csv(in_path);
    bool fittable = rows.size() >= 3;
    for (const auto& r : rows) fittable = fittable && r.risk > 0.0;
    if (!fittable)
        throw DeclinedError("rate fit declined: need >= 3 rows with positive risks");
    const ert::RateFit fit = ert::fit_rate(rows, theory_slope);
    nlohmann::json j{{"slope", fit.slope},
                     {"intercept", fit.intercept},
                     {"r_squared", fit.r_squared},
                     {"theory_slope", fit.theory_slope}};
    if (out.empty()) {
        std::cout << j.dump() << "\n";
    } else {
        std::ofstream f(out, std::ios::binary);
        if (!f) throw std::invalid_argument("cannot write " + out);
        f << j.dump() << '\n';
        std::cout << "slope " << ert::detail::format_double(fit.slope) << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exponential Radon transform toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned threads = 0;

    // phantom
    auto* sub_phantom = app.add_subcommand("phantom", "rasterize a phantom onto a grid");
    std::string ph_phantom, ph_out;
    int ph_nside = 128;
    bool ph_binary = false;
    auto* ph_o_config = sub_phantom->add_option("--config", config_path, "JSON config file");
    auto* ph_o_phantom = sub_phantom->add_option("--phantom", ph_phantom, "phantom JSON file");
    auto* ph_o_nside = sub_phantom->add_option("--nside", ph_nside, "grid side length");
    auto* ph_o_out = sub_phantom->add_option("--out", ph_out, "output grid file");
    auto* ph_o_binary = sub_phantom->add_flag("--binary", ph_binary, "write the binary grid format");
    auto* ph_o_threads = sub_phantom->add_option("--threads", threads, "worker count");
    (void)ph_o_config;
    (void)ph_o_threads;

    // sinogram
    auto* sub_sino = app.add_subcommand("sinogram", "forward transform of a phantom");
    std::string sg_phantom, sg_out, sg_csv;
    double sg_mu = 0.0;
    int sg_ntheta = 0, sg_ns = 0;
    sub_sino->add_option("--config", config_path, "JSON config file");
    auto* sg_o_phantom = sub_sino->add_option("--phantom", sg_phantom, "phantom JSON file");
    auto* sg_o_mu = sub_sino->add_option("--mu", sg_mu, "attenuation constant");
    auto* sg_o_ntheta = sub_sino->add_option("--ntheta", sg_ntheta, "number of angles");
    auto* sg_o_ns = sub_sino->add_option("--ns", sg_ns, "number of s samples");
    auto* sg_o_out = sub_sino->add_option("--out", sg_out, "output sinogram file");
    auto* sg_o_csv = sub_sino->add_option("--csv", sg_csv, "optional CSV export");
    sub_sino->add_option("--threads", threads, "worker count");

    // fbp
    auto* sub_fbp = app.add_subcommand("fbp", "filtered backprojection reconstruction");
    std::string fb_sino, fb_out;
    double fb_rho = 0.0;
    int fb_nside = 128;
    sub_fbp->add_option("--config", config_path, "JSON config file");
    auto* fb_o_sino = sub_fbp->add_option("--sinogram", fb_sino, "input sinogram file");
    auto* fb_o_rho = sub_fbp->add_option("--rho", fb_rho, "filter bandwidth");
    auto* fb_o_nside = sub_fbp->add_option("--nside", fb_nside, "output grid side");
    auto* fb_o_out = sub_fbp->add_option("--out", fb_out, "output grid file");
    sub_fbp->add_option("--threads", threads, "worker count");

    // estimate
    auto* sub_est = app.add_subcommand("estimate", "kernel estimator from noisy random observations");
    std::string es_phantom, es_obs, es_noise = "gaussian", es_out, es_obs_out;
    double es_mu = 0.0, es_sigma = 0.05, es_rho = 0.0, es_beta = 2.0, es_alpha = 1.0;
    std::int64_t es_n = 0;
    std::uint64_t es_seed = 1;
    int es_nside = 64;
    sub_est->add_option("--config", config_path, "JSON config file");
    auto* es_o_phantom = sub_est->add_option("--phantom", es_phantom, "phantom JSON file");
    auto* es_o_obs = sub_est->add_option("--obs", es_obs, "read observations from CSV (+ .json sidecar)");
    auto* es_o_mu = sub_est->add_option("--mu", es_mu, "attenuation constant");
    auto* es_o_n = sub_est->add_option("--n", es_n, "number of observations");
    auto* es_o_seed = sub_est->add_option("--seed", es_seed, "master seed");
    auto* es_o_noise = sub_est->add_option("--noise", es_noise, "noise kind: none|gaussian|uniform");
    auto* es_o_sigma = sub_est->add_option("--sigma", es_sigma, "noise standard deviation");
    auto* es_o_rho = sub_est->add_option("--rho", es_rho, "bandwidth (overrides --beta/--alpha)");
    auto* es_o_beta = sub_est->add_option("--beta", es_beta, "smoothness exponent");
    auto* es_o_alpha = sub_est->add_option("--alpha", es_alpha, "bandwidth prefactor");
    auto* es_o_nside = sub_est->add_option("--nside", es_nside, "output grid side");
    auto* es_o_out = sub_est->add_option("--out", es_out, "output grid file");
    auto* es_o_obs_out = sub_est->add_option("--obs-out", es_obs_out, "export observations CSV");
    sub_est->add_option("--threads", threads, "worker count");

    // risk
    auto* sub_risk = app.add_subcommand("risk", "Monte Carlo risk study with rate fit");
    std::string rk_criterion, rk_phantom, rk_noise = "gaussian", rk_n, rk_x0 = "0.1,0.2", rk_out;
    double rk_mu = 0.5, rk_sigma = 0.05, rk_beta = 2.0, rk_alpha = 1.0;
    int rk_trials = 0, rk_nside = 32;
    std::uint64_t rk_seed = 1;
    sub_risk->add_option("--config", config_path, "JSON config file");
    auto* rk_o_criterion = sub_risk->add_option("--criterion", rk_criterion, "mse or mise");
    auto* rk_o_phantom = sub_risk->add_option("--phantom", rk_phantom, "phantom JSON file");
    auto* rk_o_mu = sub_risk->add_option("--mu", rk_mu, "attenuation constant");
    auto* rk_o_noise = sub_risk->add_option("--noise", rk_noise, "noise kind");
    auto* rk_o_sigma = sub_risk->add_option("--sigma", rk_sigma, "noise standard deviation");
    auto* rk_o_beta = sub_risk->add_option("--beta", rk_beta, "smoothness exponent");
    auto* rk_o_alpha = sub_risk->add_option("--alpha", rk_alpha, "bandwidth prefactor");
    auto* rk_o_n = sub_risk->add_option("--n", rk_n, "comma-separated sample sizes");
    auto* rk_o_trials = sub_risk->add_option("--trials", rk_trials, "Monte Carlo trials per n");
    auto* rk_o_x0 = sub_risk->add_option("--x0", rk_x0, "evaluation point \"x,y\" (mse)");
    auto* rk_o_nside = sub_risk->add_option("--nside", rk_nside, "grid side (mise)");
    auto* rk_o_seed = sub_risk->add_option("--seed", rk_seed, "master seed");
    auto* rk_o_out = sub_risk->add_option("--out", rk_out, "output CSV file");
    sub_risk->add_option("--threads", threads, "worker count");

    // rate-fit
    auto* sub_fit = app.add_subcommand("rate-fit", "fit a log-log slope to a risk CSV");
    std::string rf_in, rf_out;
    double rf_theory = 0.0;
    sub_fit->add_option("--config", config_path, "JSON config file");
    auto* rf_o_in = sub_fit->add_option("--in", rf_in, "risk study CSV");
    auto* rf_o_theory = sub_fit->add_option("--theory-slope", rf_theory, "theoretical slope");
    auto* rf_o_out = sub_fit->add_option("--out", rf_out, "output JSON file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sub_phantom->parsed())
            return cmd_phantom(config_path, ph_phantom, ph_nside, ph_out, ph_binary, threads,
                               ph_o_phantom, ph_o_nside, ph_o_out, ph_o_binary);
        if (sub_sino->parsed())
            return cmd_sinogram(config_path, sg_phantom, sg_mu, sg_ntheta, sg_ns, sg_out, sg_csv,
                                threads, sg_o_phantom, sg_o_mu, sg_o_ntheta, sg_o_ns, sg_o_out,
                                sg_o_csv);
        if (sub_fbp->parsed())
            return cmd_fbp(config_path, fb_sino, fb_rho, fb_nside, fb_out, threads, fb_o_sino,
                           fb_o_rho, fb_o_nside, fb_o_out);
        if (sub_est->parsed())
            return cmd_estimate(config_path, es_phantom, es_obs, es_mu, es_n, es_seed, es_noise,
                                es_sigma, es_rho, es_beta, es_alpha, es_nside, es_out, es_obs_out,
                                threads, es_o_phantom, es_o_obs, es_o_mu, es_o_n, es_o_seed,
                                es_o_noise, es_o_sigma, es_o_rho, es_o_beta, es_o_alpha,
                                es_o_nside, es_o_out, es_o_obs_out);
        if (sub_risk->parsed())
            return cmd_risk(config_path, rk_criterion, rk_phantom, rk_mu, rk_noise, rk_sigma,
                            rk_beta, rk_alpha, rk_n, rk_trials, rk_x0, rk_nside, rk_seed, rk_out,
                            threads, rk_o_criterion, rk_o_phantom, rk_o_mu, rk_o_noise, rk_o_sigma,
                            rk_o_beta, rk_o_alpha, rk_o_n, rk_o_trials, rk_o_x0, rk_o_nside,
                            rk_o_seed, rk_o_out);
        if (sub_fit->parsed())
            return cmd_rate_fit(config_path, rf_in, rf_theory, rf_out, rf_o_in, rf_o_theory,
                                rf_o_out);
    } catch (const DeclinedError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
