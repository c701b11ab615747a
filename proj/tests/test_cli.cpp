#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ert/ert.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / fs::path("ert_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ERT_CLI_BIN) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_bump_phantom(const std::string& path, double amplitude = 1.0) {
    ert::save_phantom(ert::Phantom({ert::BumpComponent{{0, 0}, 1.0, amplitude}}), path);
}

}  // namespace

TEST_CASE("cli phantom command rasterizes and is byte deterministic", "[cli]") {
    TempDir dir;
    write_bump_phantom(dir.file("p.json"));
    const std::string out1 = dir.file("g1.txt"), out2 = dir.file("g2.txt");
    REQUIRE(run_cli("phantom --phantom " + dir.file("p.json") + " --nside 32 --out " + out1) == 0);
    REQUIRE(run_cli("phantom --phantom " + dir.file("p.json") + " --nside 32 --out " + out2) == 0);
    CHECK(slurp(out1) == slurp(out2));

    const auto grid = ert::read_grid(out1);
    const auto want = ert::rasterize(ert::load_phantom(dir.file("p.json")), 32);
    for (std::size_t i = 0; i < want.values().size(); ++i)
        CHECK(grid.values()[i] == want.values()[i]);
}

TEST_CASE("cli phantom with an empty component list writes zeros", "[cli]") {
    TempDir dir;
    {
        std::ofstream out(dir.file("empty.json"));
        out << R"({"components":[]})";
    }
    REQUIRE(run_cli("phantom --phantom " + dir.file("empty.json") + " --nside 8 --out " +
                    dir.file("z.txt")) == 0);
    const auto zeros = ert::read_grid(dir.file("z.txt"));
    for (double v : zeros.values()) CHECK(v == 0.0);
}

TEST_CASE("cli usage errors exit with code 2", "[cli]") {
    TempDir dir;
    write_bump_phantom(dir.file("p.json"));
    CHECK(run_cli("sinogram --phantom " + dir.file("p.json") + " --ntheta 8 --ns 16") == 2);
    CHECK(run_cli("sinogram --phantom missing.json --ntheta 8 --ns 16 --out " +
                  dir.file("s.txt")) == 2);
    CHECK(run_cli("sinogram --phantom " + dir.file("p.json") + " --ntheta 1 --ns 16 --out " +
                  dir.file("s.txt")) == 2);
    CHECK(run_cli("fbp --sinogram missing.sino --rho 0.1 --out " + dir.file("r.txt")) == 2);
    CHECK(run_cli("estimate --phantom " + dir.file("p.json") + " --n 0 --out " +
                  dir.file("e.txt")) == 2);
    CHECK(run_cli("definitely-not-a-command") == 2);
}

TEST_CASE("cli sinogram values match the library", "[cli]") {
    TempDir dir;
    ert::save_phantom(ert::Phantom({ert::DiskComponent{{0.3, 0}, 0.2, 1.0}}), dir.file("d.json"));
    REQUIRE(run_cli("sinogram --phantom " + dir.file("d.json") +
                    " --mu 1 --ntheta 12 --ns 33 --out " + dir.file("s.txt") + " --csv " +
                    dir.file("s.csv")) == 0);
    const auto sino = ert::read_sinogram(dir.file("s.txt"));
    REQUIRE(sino.n_theta() == 12);
    REQUIRE(sino.n_s() == 33);
    const ert::Phantom disk({ert::DiskComponent{{0.3, 0}, 0.2, 1.0}});
    for (int j : {0, 3, 7})
        for (int k : {5, 16, 28}) {
            const double want =
                ert::forward_point(disk, ert::Ray{sino.phi(j), sino.s_center(k)}, 1.0);
            CHECK(std::abs(sino.value(j, k) - want) <= 1e-12);
        }
    CHECK(fs::exists(dir.file("s.csv")));
}

TEST_CASE("cli fbp round trip and bad rho", "[cli]") {
    TempDir dir;
    write_bump_phantom(dir.file("p.json"));
    REQUIRE(run_cli("sinogram --phantom " + dir.file("p.json") +
                    " --mu 0.5 --ntheta 180 --ns 256 --out " + dir.file("s.txt")) == 0);
    CHECK(run_cli("fbp --sinogram " + dir.file("s.txt") + " --rho 0 --out " +
                  dir.file("r.txt")) == 2);
    // odd side puts a pixel at the exact center
    REQUIRE(run_cli("fbp --sinogram " + dir.file("s.txt") + " --rho 0.05 --nside 25 --out " +
                    dir.file("r.txt")) == 0);
    const auto recon = ert::read_grid(dir.file("r.txt"));
    const double center_val = recon.value(12, 12);
    // round-trip peak within 2% of the true amplitude at this bandwidth
    CHECK(std::abs(center_val - 1.0) < 0.02);
    const double oracle = ert::approx_smoothed(ert::Phantom({ert::BumpComponent{{0, 0}, 1.0, 1.0}}),
                                               0.05, recon.pixel_center(12, 12));
    CHECK(center_val == Catch::Approx(oracle).margin(0.01));
}

TEST_CASE("cli estimate determinism and library agreement", "[cli]") {
    TempDir dir;
    write_bump_phantom(dir.file("p.json"));
    const std::string args = "estimate --phantom " + dir.file("p.json") +
                             " --mu 0.5 --n 2000 --seed 42 --noise gaussian --sigma 0.05 "
                             "--rho 0.2 --nside 16 --out ";
    REQUIRE(run_cli(args + dir.file("e1.txt")) == 0);
    REQUIRE(run_cli(args + dir.file("e2.txt")) == 0);
    CHECK(slurp(dir.file("e1.txt")) == slurp(dir.file("e2.txt")));

    const auto grid = ert::read_grid(dir.file("e1.txt"));
    const auto obs = ert::observe(ert::Phantom({ert::BumpComponent{{0, 0}, 1.0, 1.0}}),
                                  ert::sample_design(2000, 42), 0.5,
                                  ert::NoiseModel::gaussian(0.05), 42);
    const auto want = ert::estimator_grid(obs, ert::EstimatorConfig(0.5, 0.2), 16);
    for (std::size_t i = 0; i < want.values().size(); ++i)
        CHECK(grid.values()[i] == want.values()[i]);
}

TEST_CASE("cli estimate exports and reuses observation files", "[cli]") {
    TempDir dir;
    write_bump_phantom(dir.file("p.json"));
    REQUIRE(run_cli("estimate --phantom " + dir.file("p.json") +
                    " --mu 0.3 --n 500 --seed 7 --rho 0.25 --nside 12 --out " +
                    dir.file("e1.txt") + " --obs-out " + dir.file("obs.csv")) == 0);
    REQUIRE(fs::exists(dir.file("obs.csv")));
    REQUIRE(fs::exists(dir.file("obs.csv") + ".json"));
    REQUIRE(run_cli("estimate --obs " + dir.file("obs.csv") + " --rho 0.25 --nside 12 --out " +
                    dir.file("e2.txt")) == 0);
    CHECK(slurp(dir.file("e1.txt")) == slurp(dir.file("e2.txt")));
}

TEST_CASE("cli risk degenerate study declines the fit with exit 3", "[cli]") {
    TempDir dir;
    {
        std::ofstream out(dir.file("zero.json"));
        out << R"({"components":[]})";
    }
    CHECK(run_cli("risk --criterion mse --phantom " + dir.file("zero.json") +
                  " --noise none --n 10,100,1000 --trials 5 --seed 3 --out " +
                  dir.file("risk.csv")) == 3);
    // rows are still written, without a trailing fit line
    const auto rows = ert::read_risk_csv(dir.file("risk.csv"));
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK(r.risk == 0.0);
    CHECK(slurp(dir.file("risk.csv")).find("slope") == std::string::npos);
}

TEST_CASE("cli risk and rate-fit cooperate", "[cli]") {
    TempDir dir;
    write_bump_phantom(dir.file("p.json"), 0.005);
    REQUIRE(run_cli("risk --criterion mse --phantom " + dir.file("p.json") +
                    " --mu 0.5 --sigma 0.05 --n 100,1000,10000 --trials 40 --seed 11 --out " +
                    dir.file("risk.csv")) == 0);
    const std::string text = slurp(dir.file("risk.csv"));
    CHECK(text.find("n,rho,risk,stderr,bias_sq,variance") == 0);
    CHECK(text.find("theory_slope") != std::string::npos);

    REQUIRE(run_cli("rate-fit --in " + dir.file("risk.csv") + " --theory-slope -0.4 --out " +
                    dir.file("fit.json")) == 0);
    std::ifstream in(dir.file("fit.json"));
    nlohmann::json j;
    in >> j;
    CHECK(j.contains("slope"));
    CHECK(j["theory_slope"].get<double>() == -0.4);

    // re-run determinism of the whole risk study
    REQUIRE(run_cli("risk --criterion mse --phantom " + dir.file("p.json") +
                    " --mu 0.5 --sigma 0.05 --n 100,1000,10000 --trials 40 --seed 11 --out " +
                    dir.file("risk2.csv")) == 0);
    CHECK(slurp(dir.file("risk.csv")) == slurp(dir.file("risk2.csv")));
}

TEST_CASE("cli config file supplies defaults and flags override", "[cli]") {
    TempDir dir;
    write_bump_phantom(dir.file("p.json"));
    {
        std::ofstream out(dir.file("cfg.json"));
        out << nlohmann::json{{"phantom", dir.file("p.json")},
                              {"nside", 16},
                              {"out", dir.file("from_cfg.txt")}}
                   .dump();
    }
    REQUIRE(run_cli("phantom --config " + dir.file("cfg.json")) == 0);
    CHECK(ert::read_grid(dir.file("from_cfg.txt")).n_side() == 16);

    REQUIRE(run_cli("phantom --config " + dir.file("cfg.json") + " --nside 8 --out " +
                    dir.file("override.txt")) == 0);
    CHECK(ert::read_grid(dir.file("override.txt")).n_side() == 8);
}
