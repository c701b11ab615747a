#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "ert/bessel.hpp"
#include "ert/quadrature.hpp"

using ert::integrate_adaptive;
using ert::integrate_periodic;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("adaptive quadrature on standard integrals", "[quadrature]") {
    CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, kPi, 1e-12) ==
          Catch::Approx(2.0).margin(1e-12));
    CHECK(integrate_adaptive([](double x) { return 4.0 / (1.0 + x * x); }, 0.0, 1.0, 1e-13) ==
          Catch::Approx(kPi).margin(1e-12));
    // polynomial is exact for the embedded Gauss rule
    CHECK(integrate_adaptive([](double x) { return x * x * x - 2.0 * x; }, -1.0, 3.0, 1e-13) ==
          Catch::Approx(12.0).margin(1e-10));
    // oscillatory
    CHECK(integrate_adaptive([](double x) { return std::cos(x); }, 0.0, 10.0 * kPi, 1e-12) ==
          Catch::Approx(0.0).margin(1e-10));
    // mildly singular derivative at the endpoint
    CHECK(integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0, 1e-12) ==
          Catch::Approx(2.0 / 3.0).margin(1e-10));
}

TEST_CASE("adaptive quadrature respects orientation and degenerate span", "[quadrature]") {
    CHECK(integrate_adaptive([](double x) { return x; }, 1.0, 1.0, 1e-12) == 0.0);
    CHECK_THROWS_AS(integrate_adaptive([](double x) { return x; }, 0.0, 1.0, 0.0),
                    std::invalid_argument);
}

TEST_CASE("bump chord integral matches tight tolerance", "[quadrature]") {
    // int_{-1}^{1} exp(1 - 1/(1-t^2)) dt, reference from 200-point refinement
    const auto bump = [](double t) {
        const double r2 = t * t;
        return r2 >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - r2));
    };
    const double coarse = integrate_adaptive(bump, -1.0, 1.0, 1e-8);
    const double fine = integrate_adaptive(bump, -1.0, 1.0, 1e-13);
    CHECK(std::abs(coarse - fine) < 1e-8);
}

TEST_CASE("periodic trapezoid converges spectrally", "[quadrature]") {
    const double two_pi_i0 = 2.0 * kPi * ert::bessel_i0(1.0);
    const double got = integrate_periodic([](double phi) { return std::exp(std::sin(phi)); },
                                          2.0 * kPi, 1e-12);
    CHECK(got == Catch::Approx(two_pi_i0).margin(1e-10));
    CHECK(integrate_periodic([](double) { return 1.0; }, 2.0 * kPi, 1e-12) ==
          Catch::Approx(2.0 * kPi).margin(1e-13));
}
