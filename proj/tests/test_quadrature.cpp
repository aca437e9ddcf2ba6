#include <doctest.h>

#include <complex>

#include <levycalc/quadrature.hpp>
#include <levycalc/special.hpp>

#include "support/oracles.hpp"

using namespace levycalc;

TEST_SUITE("quadrature") {

TEST_CASE("polynomials and smooth functions") {
    QuadratureConfig cfg;
    CHECK(integrate([](double x) { return x * x * x; }, 0.0, 2.0, cfg) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, oracle::pi, cfg) == doctest::Approx(2.0).epsilon(1e-13));
    const auto c = integrate([](double x) { return std::exp(std::complex<double>(0.0, 5.0 * x)); }, 0.0, 1.0, cfg);
    const auto exact = (std::exp(std::complex<double>(0.0, 5.0)) - 1.0) / std::complex<double>(0.0, 5.0);
    CHECK(std::abs(c - exact) < 1e-13);
}

TEST_CASE("semi-infinite and singular pieces") {
    QuadratureConfig cfg;
    CHECK(integrate_decaying([](double u) { return std::exp(-u); }, cfg) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_to_infinity([](double r) { return 1.0 / (r * r); }, 2.0, cfg) == doctest::Approx(0.5).epsilon(1e-12));
    const double breaks[] = {1.0};
    CHECK(integrate_piecewise([](double r) { return 1.0 / std::sqrt(r); }, 0.0, 4.0, breaks, cfg) ==
          doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("truncated tails are reported") {
    QuadratureConfig cfg;
    cfg.truncationU = 4.0;
    auto r = integrate_decaying_adaptive([](double u) { return 1.0 / (1.0 + u); }, cfg);
    CHECK_FALSE(r.converged);
    CHECK_THROWS_AS(integrate_decaying([](double u) { return 1.0 / (1.0 + u); }, cfg), QuadratureFailure);
}

TEST_CASE("config validation") {
    QuadratureConfig cfg;
    cfg.nodes = 4;
    CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

}

TEST_SUITE("special") {

TEST_CASE("exponential integral") {
    for (double x : {1e-8, 1e-3, 0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0}) {
        CHECK(expint_e1(x) == doctest::Approx(oracle::e1(x)).epsilon(1e-13));
    }
    CHECK(expint_e1(1.0) == doctest::Approx(0.21938393439552029).epsilon(1e-14));
}

TEST_CASE("expm1 on the unit circle") {
    for (double t : {1e-12, 1e-6, 1e-3, 0.5, 3.0}) {
        const auto a = expm1_i(t);
        CHECK(std::abs(a - (std::exp(std::complex<double>(0.0, t)) - 1.0)) < 1e-15 + 1e-15 * t);
        const auto b = expm1_i_minus_linear(t);
        if (t < 1e-3) {
            CHECK(b.real() == doctest::Approx(-t * t / 2).epsilon(1e-6));
        } else {
            CHECK(std::abs(b - (std::exp(std::complex<double>(0.0, t)) - 1.0 - std::complex<double>(0.0, t))) < 1e-14);
        }
    }
}

TEST_CASE("stable radial constant") {
    // int_0^R by Simpson plus the non-oscillating tail R^{-p}/p; the cosine
    // tail is below 2 R^{-1-p}.
    const double R = 2000.0 * oracle::pi;
    for (double p : {0.5, 1.0, 1.5}) {
        const auto f = [&](double r) { return (1 - std::cos(r)) * std::pow(r, -1 - p); };
        // r = v^2 on (0, 1] removes the endpoint singularity.
        const auto g = [&](double v) { return v == 0.0 ? (p == 1.5 ? 1.0 : 0.0) : f(v * v) * 2 * v; };
        const double k = oracle::simpson(g, 0.0, 1.0) + oracle::simpson(f, 1.0, R, 2000000) + std::pow(R, -p) / p;
        CHECK(stable_radial_constant(p) == doctest::Approx(k).epsilon(1e-4));
    }
    CHECK(stable_radial_constant(1.0) == doctest::Approx(oracle::pi / 2));
}

}
