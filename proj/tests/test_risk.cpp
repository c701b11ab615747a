#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <vector>

#include "ert/fbp.hpp"
#include "ert/phantom.hpp"
#include "ert/risk.hpp"

using ert::BumpComponent;
using ert::NoiseModel;
using ert::Phantom;
using ert::RiskCriterion;
using ert::RiskRow;
using ert::RiskStudyConfig;
using ert::Vec2;

namespace {
const Phantom kUnitBump({BumpComponent{{0, 0}, 1.0, 1.0}});
const Phantom kFaintBump({BumpComponent{{0, 0}, 1.0, 0.005}});

RiskStudyConfig base_config() {
    RiskStudyConfig cfg;
    cfg.phantom = kUnitBump;
    cfg.mu = 0.5;
    cfg.noise = NoiseModel::gaussian(0.05);
    cfg.beta = 2.0;
    cfg.alpha = 1.0;
    cfg.n_values = {100, 1000};
    cfg.trials = 20;
    cfg.x0 = {0.1, 0.2};
    cfg.n_side = 16;
    cfg.master_seed = 9001;
    cfg.criterion = RiskCriterion::mse;
    return cfg;
}
}  // namespace

TEST_CASE("rate fit recovers an exact power law", "[risk]") {
    std::vector<RiskRow> rows;
    for (std::int64_t n : {100, 1000, 10000, 100000}) {
        RiskRow r;
        r.n = n;
        r.risk = 3.7 * std::pow(static_cast<double>(n), -0.4);
        rows.push_back(r);
    }
    const auto fit = ert::fit_rate(rows, -0.4);
    CHECK(fit.slope == Catch::Approx(-0.4).margin(1e-12));
    CHECK(fit.intercept == Catch::Approx(std::log(3.7)).margin(1e-12));
    CHECK(fit.r_squared == Catch::Approx(1.0).margin(1e-12));
    CHECK(fit.theory_slope == -0.4);
}

TEST_CASE("theory slopes", "[risk]") {
    CHECK(ert::mse_theory_slope(2.0) == Catch::Approx(-0.4).margin(1e-15));
    CHECK(ert::mise_theory_slope(2.0) == Catch::Approx(-4.0 / 7.0).margin(1e-15));
}

TEST_CASE("rate fit input validation", "[risk]") {
    std::vector<RiskRow> two(2);
    two[0].n = 10;
    two[0].risk = 1.0;
    two[1].n = 100;
    two[1].risk = 0.5;
    CHECK_THROWS_AS(ert::fit_rate(two, -0.4), std::invalid_argument);

    std::vector<RiskRow> zero(3);
    for (int i = 0; i < 3; ++i) {
        zero[i].n = 10 * (i + 1);
        zero[i].risk = 0.0;
    }
    CHECK_THROWS_AS(ert::fit_rate(zero, -0.4), std::invalid_argument);
}

TEST_CASE("study config validation", "[risk]") {
    auto cfg = base_config();
    cfg.n_values = {};
    CHECK_THROWS_AS(ert::run_mse_study(cfg), std::invalid_argument);
    cfg = base_config();
    cfg.n_values = {5, 100};
    CHECK_THROWS_AS(ert::run_mse_study(cfg), std::invalid_argument);
    cfg = base_config();
    cfg.n_values = {100, 100};
    CHECK_THROWS_AS(ert::run_mse_study(cfg), std::invalid_argument);
    cfg = base_config();
    cfg.trials = 1;
    CHECK_THROWS_AS(ert::run_mse_study(cfg), std::invalid_argument);
    cfg = base_config();
    cfg.x0 = {0.9, 0.9};
    CHECK_THROWS_AS(ert::run_mse_study(cfg), std::invalid_argument);
    cfg = base_config();
    cfg.criterion = RiskCriterion::mise;
    CHECK_THROWS_AS(ert::run_mse_study(cfg), std::invalid_argument);
    CHECK_THROWS_AS(ert::run_mise_study(base_config()), std::invalid_argument);
}

TEST_CASE("zero phantom with no noise gives exactly zero risk", "[risk]") {
    auto cfg = base_config();
    cfg.phantom = Phantom{};
    cfg.noise = NoiseModel::none();
    const auto rows = ert::run_mse_study(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.risk == 0.0);
        CHECK(r.bias_sq == 0.0);
        CHECK(r.variance == 0.0);
        CHECK(r.stderr_risk == 0.0);
    }

    auto mise_cfg = cfg;
    mise_cfg.criterion = RiskCriterion::mise;
    for (const auto& r : ert::run_mise_study(mise_cfg)) CHECK(r.risk == 0.0);
}

TEST_CASE("risk decomposition is an identity", "[risk]") {
    auto cfg = base_config();
    cfg.trials = 30;
    const auto rows = ert::run_mse_study(cfg, 2);
    for (const auto& r : rows) {
        CHECK(r.risk == Catch::Approx(r.bias_sq + r.variance).epsilon(1e-12));
        CHECK(r.risk >= 0.0);
        CHECK(r.rho_n == ert::bandwidth_mse(r.n, 2.0, 1.0));
    }

    auto mcfg = base_config();
    mcfg.criterion = RiskCriterion::mise;
    mcfg.n_values = {100, 400};
    mcfg.trials = 12;
    mcfg.n_side = 12;
    for (const auto& r : ert::run_mise_study(mcfg, 2)) {
        CHECK(r.risk == Catch::Approx(r.bias_sq + r.variance).epsilon(1e-12));
        CHECK(r.rho_n == ert::bandwidth_mise(r.n, 2.0, 1.0));
    }
}

TEST_CASE("mse risk decreases with the sample size", "[risk]") {
    auto cfg = base_config();
    cfg.phantom = kFaintBump;
    cfg.n_values = {100, 1000, 10000};
    cfg.trials = 60;
    const auto rows = ert::run_mse_study(cfg, 2);
    REQUIRE(rows.size() == 3);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double tol = 2.0 * (rows[i - 1].stderr_risk + rows[i].stderr_risk);
        CHECK(rows[i].risk < rows[i - 1].risk + tol);
    }
    CHECK(rows.front().risk > rows.back().risk);
}

TEST_CASE("noiseless mise reduces to the squared smoothing bias", "[risk]") {
    auto cfg = base_config();
    cfg.criterion = RiskCriterion::mise;
    cfg.noise = NoiseModel::none();
    cfg.n_values = {10000};
    cfg.trials = 10;
    cfg.n_side = 24;
    const auto rows = ert::run_mise_study(cfg, 2);
    REQUIRE(rows.size() == 1);
    const double rho = rows[0].rho_n;

    // oracle image bias: sum over in-ball pixels of (f_rho - f)^2 * area
    double oracle = 0.0;
    const double h = 2.0 / cfg.n_side;
    for (int j = 0; j < cfg.n_side; ++j)
        for (int k = 0; k < cfg.n_side; ++k) {
            const Vec2 x{-1.0 + (j + 0.5) * h, -1.0 + (k + 0.5) * h};
            if (x.norm_sq() > 1.0) continue;
            oracle += ert::sq(ert::approx_smoothed(cfg.phantom, rho, x, 1e-7) -
                              ert::eval_phantom(cfg.phantom, x));
        }
    oracle *= h * h;
    CHECK(rows[0].risk == Catch::Approx(oracle).epsilon(0.05));
    // the design-randomness variance is a small fraction at this n
    CHECK(rows[0].variance < 0.05 * rows[0].risk);
}

TEST_CASE("bias-variance profile crosses over in rho", "[risk]") {
    auto cfg = base_config();
    cfg.trials = 60;
    const auto profile =
        ert::bias_variance_profile(cfg, {0.5, 0.15, 0.04}, 5000, 2);
    REQUIRE(profile.size() == 3);
    // large rho: bias dominates; small rho: variance dominates
    CHECK(profile[0].bias_sq > profile[0].variance);
    CHECK(profile[2].variance > profile[2].bias_sq);
    // variance decreases monotonically in rho
    CHECK(profile[0].variance < profile[1].variance);
    CHECK(profile[1].variance < profile[2].variance);
    CHECK_THROWS_AS(ert::bias_variance_profile(cfg, {0.0}, 5000), std::invalid_argument);
}

TEST_CASE("slopes agree across disjoint master seeds", "[risk]") {
    auto cfg = base_config();
    cfg.phantom = kFaintBump;
    cfg.n_values = {100, 1000, 10000};
    cfg.trials = 50;

    auto slope_with_se = [&](std::uint64_t seed) {
        cfg.master_seed = seed;
        const auto rows = ert::run_mse_study(cfg, 2);
        const auto fit = ert::fit_rate(rows, -0.4);
        // slope standard error from the residuals
        double sxx = 0.0, ss_res = 0.0, mx = 0.0;
        for (const auto& r : rows) mx += std::log(static_cast<double>(r.n));
        mx /= static_cast<double>(rows.size());
        for (const auto& r : rows) {
            const double x = std::log(static_cast<double>(r.n));
            sxx += ert::sq(x - mx);
            ss_res += ert::sq(std::log(r.risk) - (fit.intercept + fit.slope * x));
        }
        const double se = std::sqrt(ss_res / (static_cast<double>(rows.size()) - 2.0) / sxx);
        return std::pair<double, double>{fit.slope, se};
    };
    const auto [s1, se1] = slope_with_se(101);
    const auto [s2, se2] = slope_with_se(202);
    CHECK(std::abs(s1 - s2) <= 2.0 * (se1 + se2) + 0.05);
}

TEST_CASE("risk csv round trip with appended fit", "[risk]") {
    std::vector<RiskRow> rows;
    for (std::int64_t n : {100, 1000, 10000}) {
        RiskRow r;
        r.n = n;
        r.rho_n = ert::bandwidth_mse(n, 2.0, 1.0);
        r.risk = 2.0 * std::pow(static_cast<double>(n), -0.4);
        r.stderr_risk = 0.1 * r.risk;
        r.bias_sq = 0.25 * r.risk;
        r.variance = 0.75 * r.risk;
        rows.push_back(r);
    }
    const auto fit = ert::fit_rate(rows, -0.4);
    const std::string path = "risk_roundtrip_test.csv";
    ert::write_risk_csv(rows, path, &fit);
    const auto back = ert::read_risk_csv(path);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(back[i].n == rows[i].n);
        CHECK(back[i].rho_n == rows[i].rho_n);
        CHECK(back[i].risk == rows[i].risk);
        CHECK(back[i].stderr_risk == rows[i].stderr_risk);
        CHECK(back[i].bias_sq == rows[i].bias_sq);
        CHECK(back[i].variance == rows[i].variance);
    }
    std::remove(path.c_str());
}
