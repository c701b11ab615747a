#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <numbers>
#include <vector>

#include "ert/fft.hpp"
#include "ert/rng.hpp"

namespace {

std::vector<std::complex<double>> random_signal(std::size_t n, std::uint64_t seed) {
    ert::CounterRng rng(seed, 0);
    std::vector<std::complex<double>> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto [a, b] = rng.uniform_pair(i);
        v[i] = {2.0 * a - 1.0, 2.0 * b - 1.0};
    }
    return v;
}

std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = -2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(n);
            acc += x[j] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

}  // namespace

TEST_CASE("fft matches the naive DFT", "[fft]") {
    auto x = random_signal(64, 42);
    const auto want = naive_dft(x);
    ert::fft_inplace(x, -1);
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(std::abs(x[k] - want[k]) < 1e-11);
    }
}

TEST_CASE("fft round trip", "[fft]") {
    auto x = random_signal(256, 7);
    const auto original = x;
    ert::fft_inplace(x, -1);
    ert::fft_inplace(x, +1);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(x[i] / 256.0 - original[i]) < 1e-13);
}

TEST_CASE("fft rejects non-power-of-two sizes", "[fft]") {
    std::vector<std::complex<double>> bad(48);
    CHECK_THROWS_AS(ert::fft_inplace(bad), std::invalid_argument);
}

TEST_CASE("2-D fft satisfies Parseval", "[fft]") {
    const std::size_t side = 32;
    auto img = random_signal(side * side, 11);
    double spatial = 0.0;
    for (const auto& v : img) spatial += std::norm(v);
    ert::fft2_inplace(img, side, -1);
    double spectral = 0.0;
    for (const auto& v : img) spectral += std::norm(v);
    CHECK(spectral / static_cast<double>(side * side) ==
          Catch::Approx(spatial).epsilon(1e-12));
}
