#include <doctest.h>

#include <complex>

#include <levycalc/exponent.hpp>
#include <levycalc/json_io.hpp>
#include <levycalc/operators.hpp>
#include <levycalc/rng.hpp>
#include <levycalc/special.hpp>

#include "support/oracles.hpp"

using namespace levycalc;
using C = std::complex<double>;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

Vec v2(double x, double y) {
    Vec v(2);
    v << x, y;
    return v;
}

LevyTriplet mixed_triplet() {
    LevyMeasure m(2);
    m.add_atom({v2(0.3, -0.2), 1.5});
    m.add_atom({v2(2.0, 1.0), 0.7});
    m.add_ray({v2(1, 1), 0.5, RadialDensity::gamma_kernel(1.0, -1.0, 2.0)});
    m.add_family(GammaFamily{1.5, 1.0, v2(0, 1)});
    m.add_family(StableFamily{1.2, {{v2(1, 0), 0.4}, {v2(1, -1), 0.3}}});
    m.add_family(LaplaceFamily{v2(-1, 2)});
    Mat R(2, 2);
    R << 1.0, 0.2, 0.2, 0.5;
    return LevyTriplet(v2(0.1, -0.4), R, m);
}

}  // namespace

TEST_SUITE("levy-core") {

TEST_CASE("exponent of elementary triplets") {
    const double s2 = 1.7;
    CHECK(eval_exponent(LevyTriplet::gaussian(Mat::Constant(1, 1, s2)), v1(1.0)) == C(-s2 / 2, 0.0));

    const double lambda = 2.5;
    const auto atom = LevyTriplet::pure_jump(LevyMeasure::discrete(1, {{v1(1.0), lambda}}));
    for (double y : {0.3, 1.0, 4.0}) {
        const C expected = lambda * (std::exp(C(0, y)) - 1.0 - C(0, y));
        CHECK(std::abs(eval_exponent(atom, v1(y)) - expected) < 1e-14);
    }

    const auto lap = LevyTriplet::pure_jump(LevyMeasure::laplace(v1(1.0)));
    CHECK(std::abs(eval_exponent(lap, v1(1.0)) - C(-std::log(2.0), 0.0)) < 1e-10);
    for (double t : {0.01, 0.5, 3.0, 30.0}) {
        CHECK(std::abs(eval_exponent(lap, v1(t)) - C(-std::log1p(t * t), 0.0)) < 1e-9);
    }

    const auto gam = LevyTriplet::pure_jump(LevyMeasure::gamma(2.0, 3.0, v1(1.0)));
    for (double t : {0.1, 1.0, 10.0}) {
        // -shape log(1 - i t / rate) minus the compensator shift shape (1 - e^{-rate}) / rate.
        const C expected = -2.0 * std::log(C(1.0, -t / 3.0)) - C(0, t) * 2.0 * (1 - std::exp(-3.0)) / 3.0;
        CHECK(std::abs(eval_exponent(gam, v1(t)) - expected) < 1e-9);
    }
}

TEST_CASE("stable family matches -w |<y,u>|^p") {
    for (double p : {0.5, 1.0, 1.5}) {
        const auto t = LevyTriplet::pure_jump(LevyMeasure::stable(p, {{v1(1.0), 0.8}}));
        for (double y : {0.2, 1.0, 5.0}) {
            CHECK(std::abs(eval_exponent(t, v1(y)) - C(-0.8 * std::pow(y, p), 0.0)) < 1e-9);
        }
    }
}

TEST_CASE("zero at the origin, hermitian symmetry and additivity") {
    const auto t = mixed_triplet();
    const auto phi = Exponent::from_triplet(t);
    CHECK(phi(Vec::Zero(2)) == C(0.0, 0.0));
    RandomStream rng(11, 0);
    const auto other = LevyTriplet(v2(1, 2), Mat::Identity(2, 2), LevyMeasure::discrete(2, {{v2(-3, 1), 0.4}}));
    const auto sum = t + other;
    for (int i = 0; i < 20; ++i) {
        const Vec y = v2(4 * rng.normal(), 4 * rng.normal());
        const C a = eval_exponent(t, y), b = eval_exponent(t, -y);
        CHECK(std::abs(b - std::conj(a)) < 1e-10);
        CHECK(std::abs(eval_exponent(sum, y) - a - eval_exponent(other, y)) < 1e-10);
    }
}

TEST_CASE("symmetric laws with zero shift have nonpositive real part") {
    const auto sym = LevyTriplet(Vec::Zero(1), Mat::Constant(1, 1, 0.3),
                                 LevyMeasure::laplace(v1(1)) + LevyMeasure::discrete(1, {{v1(2), 1}, {v1(-2), 1}}));
    for (double y = 0.05; y < 50; y *= 1.7) CHECK(eval_exponent(sym, v1(y)).real() <= 0.0);
}

TEST_CASE("triplet validation") {
    Mat asym(2, 2);
    asym << 1, 0.5, 0.1, 1;
    CHECK_THROWS_AS(LevyTriplet(Vec::Zero(2), asym, LevyMeasure(2)), InvalidArgument);
    Mat neg(2, 2);
    neg << 1, 2, 2, 1;
    CHECK_THROWS_AS(LevyTriplet(Vec::Zero(2), neg, LevyMeasure(2)), InvalidArgument);
    CHECK_THROWS_AS(LevyMeasure::radial(1, {{v1(1), 1.0, RadialDensity::power(1.0, -3.0)}}).validate(),
                    NonIntegrableMeasure);
    CHECK_THROWS_AS(LevyMeasure::discrete(1, {{v1(0.0), 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(LevyMeasure::discrete(1, {{v1(1.0), -1.0}}), InvalidArgument);
}

TEST_CASE("log moments") {
    const double e = std::exp(1.0);
    auto r = log_moments(LevyMeasure::discrete(1, {{v1(e), 1.0}}));
    CHECK(r.logMoment == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.log2Moment == doctest::Approx(1.0).epsilon(1e-14));
    r = log_moments(LevyMeasure::discrete(1, {{v1(0.5), 5.0}}));
    CHECK(r.logMoment == 0.0);

    const double oracleValue =
        oracle::simpson_to_infinity([](double x) { return std::log(x) * std::exp(-x) / x; }, 1.0, 4.5);
    r = log_moments(LevyMeasure::gamma(1.0, 1.0, v1(1)));
    CHECK(r.logMoment == doctest::Approx(oracleValue).epsilon(1e-9));
    CHECK(r.inLogDomain);

    // r^{-1} (1 + log(1 + r))^{-1.5} has no log moment.
    const auto heavy = LevyMeasure::radial(1, {{v1(1), 1.0, RadialDensity::power(1.0, -1.0, kInfinity, -1.5)}});
    r = log_moments(heavy);
    CHECK_FALSE(r.inLogDomain);
    CHECK_FALSE(r.inLog2Domain);
    CHECK(std::isinf(r.logMoment));
    CHECK(log_moment_order(heavy) == 0);
}

TEST_CASE("log moment of a dilated measure by change of variables") {
    for (double c : {0.5, 3.0}) {
        const auto dil = log_moments(LevyMeasure::gamma(1.0, 1.0, v1(1)).dilated(c));
        const double direct = oracle::simpson_to_infinity(
            [&](double x) { return std::log(c * x) * std::exp(-x) / x; }, 1.0 / c, 5.0);
        CHECK(dil.logMoment == doctest::Approx(direct).epsilon(1e-9));
    }
    const auto atoms = LevyMeasure::discrete(1, {{v1(0.7), 1.0}, {v1(-4.0), 2.0}});
    const double c = 2.0;
    const double direct = 1.0 * std::log(1.4) + 2.0 * std::log(8.0);
    CHECK(log_moments(atoms.dilated(c)).logMoment == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("classification") {
    auto cls = classify_measure(LevyMeasure::gamma(1.0, 1.0, v1(1)));
    CHECK(cls.in_L);
    CHECK(cls.in_U);
    CHECK(cls.grid_test_pass);

    cls = classify_measure(LevyMeasure::discrete(1, {{v1(1.3), 1.0}}));
    CHECK_FALSE(cls.in_L);
    CHECK_FALSE(cls.in_U);
    CHECK_FALSE(cls.in_Lf);
    CHECK_FALSE(cls.grid_test_pass);

    for (double p : {0.5, 1.0, 1.5}) {
        cls = classify_measure(LevyMeasure::stable(p, {{v1(1), 1.0}}));
        CHECK(cls.in_L);
        CHECK(cls.in_U);
        CHECK(cls.in_Lf);
    }

    // Uniform on (0, 2]: l nonincreasing, r l(r) increasing.
    cls = classify_measure(LevyMeasure::radial(1, {{v1(1), 1.0, RadialDensity::power(0.5, 0.0, 2.0)}}));
    CHECK(cls.in_U);
    CHECK_FALSE(cls.in_L);
    REQUIRE(cls.witnessL);
    CHECK(cls.witnessL->r <= 2.0);

    // r e^{-r}: increasing near the origin.
    cls = classify_measure(LevyMeasure::radial(1, {{v1(1), 1.0, RadialDensity::gamma_kernel(1.0, 1.0, 1.0)}}));
    CHECK_FALSE(cls.in_U);
    CHECK_FALSE(cls.in_L);
    REQUIRE(cls.witnessU);
    CHECK(cls.witnessU->r < 1.0);
}

TEST_CASE("monotonicity witness") {
    CHECK_FALSE(monotonicity_witness(RadialDensity::gamma_kernel(1, -1, 1), true));
    const auto w = monotonicity_witness(RadialDensity::gamma_kernel(1, 0.5, 1), false);
    REQUIRE(w);
    CHECK(*w < 0.5);
}

TEST_CASE("closed-form exponents agree with their triplets") {
    const Vec u = v1(1);
    const std::vector<Exponent> cases{Exponent::gamma(2.0, 1.5, u), Exponent::laplace(u), Exponent::gamma_j(1.0, 1.0, u),
                                      Exponent::gamma_tilde(1.0, 1.0, u), Exponent::laplace_j(u),
                                      Exponent::laplace_tilde(u), Exponent::stable(0.7, {{u, 1.3}})};
    for (const auto& e : cases) {
        const auto t = e.triplet();
        REQUIRE(t);
        for (double y : {0.01, 0.3, 1.0, 7.0}) {
            CHECK(std::abs(e(v1(y)) - eval_exponent(*t, v1(y))) < 1e-8);
        }
    }
}

TEST_CASE("triplet JSON round trip") {
    const auto t = mixed_triplet();
    const auto j = to_json(t);
    CHECK(j["measure"]["type"] == "mixed");
    const auto back = triplet_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back) == j);
    for (const auto& y : {v2(0.5, 1.0), v2(-3.0, 0.2)}) {
        CHECK(std::abs(eval_exponent(back, y) - eval_exponent(t, y)) < 1e-12);
    }

    const auto one = triplet_from_json(nlohmann::json::parse(
        R"({"shift": 0.5, "cov": 2, "measure": {"type": "discrete", "atoms": [{"x": 3, "mass": 1}]}})"));
    CHECK(one.dim() == 1);
    CHECK(one.cov()(0, 0) == 2.0);
    CHECK(one.measure().atoms().size() == 1);

    const auto rad = triplet_from_json(nlohmann::json::parse(
        R"({"measure": {"type": "radial", "rays": [{"u": [0, 2], "weight": 1,
            "density": {"kind": "gamma", "c": 1, "q": -1, "rate": 1}}]}})"));
    CHECK(rad.dim() == 2);
    CHECK(rad.measure().rays().front().u[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(triplet_from_json(nlohmann::json::parse(R"({"shift": [1, 2], "cov": [[1]]})")), InvalidArgument);
    CHECK_THROWS_AS(triplet_from_json(nlohmann::json::parse(
                        R"({"measure": {"families": [{"type": "cauchy"}]}})")),
                    InvalidArgument);
}

}
