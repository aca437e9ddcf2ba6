#include <doctest.h>

#include <levycalc/factorization.hpp>

#include "support/oracles.hpp"

using namespace levycalc;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

Exponent gamma11() { return Exponent::from_triplet(LevyTriplet::pure_jump(LevyMeasure::gamma(1.0, 1.0, v1(1)))); }

}  // namespace

TEST_SUITE("factorization") {

TEST_CASE("verification grid") {
    const auto g = verification_grid(1);
    REQUIRE(g.size() == 50);
    CHECK(g.front()[0] == doctest::Approx(1e-2));
    CHECK(g.back()[0] == doctest::Approx(1e2));
    CHECK(verification_grid(3).size() == 150);
}

TEST_CASE("stable factorization") {
    const auto phi = Exponent::stable(1.5, {{v1(1), 1.0}});
    const auto res = factorize_selfdec(phi);
    for (const auto& y : verification_grid(1)) {
        CHECK(std::abs(res.muTilde(y) - 0.6 * phi(y)) < 1e-10);
        CHECK(std::abs(res.backgroundFactor(y) - 0.4 * phi(y)) < 1e-10);
    }
    CHECK(res.report.tildeNonneg);
    CHECK(res.report.tildeInU);
    CHECK(res.report.productReconstructs < 1e-8);
    CHECK(res.report.uniquenessResidual < 1e-8);
}

TEST_CASE("Gaussian factorization") {
    const auto phi = Exponent::from_triplet(LevyTriplet::gaussian(Mat::Constant(1, 1, 2.0)));
    const auto res = factorize_selfdec(phi);
    for (double y : {0.1, 1.0, 30.0}) {
        CHECK(std::abs(res.muTilde(v1(y)) - 2.0 / 3.0 * phi(v1(y))) < 1e-10);
        CHECK(std::abs(res.backgroundFactor(v1(y)) - phi(v1(y)) / 3.0) < 1e-10);
    }
}

TEST_CASE("Laplace factorization") {
    const auto phi = Exponent::laplace(v1(1));
    const auto res = factorize_selfdec(phi);
    CHECK(res.muTilde(v1(1.0)).real() == doctest::Approx(2 * (oracle::pi / 4 - 1)).epsilon(1e-10));
    for (double t : {0.01, 0.5, 3.0, 100.0}) {
        CHECK(std::abs(res.muTilde(v1(t)).real() - 2 * (std::atan(t) - t) / t) < 1e-9);
    }
    CHECK(res.report.productReconstructs < 1e-8);
    CHECK(res.report.consistency < 1e-8);
    REQUIRE(res.report.eagerLazyDeviation);
    CHECK(*res.report.eagerLazyDeviation < 1e-8);
}

TEST_CASE("gamma factorization report") {
    const auto res = factorize_selfdec(Exponent::gamma(1.0, 1.0, v1(1)));
    REQUIRE(res.report.eagerLazyDeviation);
    CHECK(*res.report.eagerLazyDeviation < 1e-8);
    CHECK(res.inputClass.in_L);
    CHECK(res.report.tildeNonneg);
    CHECK(res.report.tildeLogMomentFinite);
    CHECK(res.report.tildeInU);
    CHECK(res.report.consistency < 1e-8);
    CHECK(res.report.productReconstructs < 1e-8);
    CHECK(res.report.uniquenessResidual < 1e-8);
    CHECK(res.report.backgroundInLf);
    REQUIRE(res.muTildeTriplet);
    REQUIRE(res.backgroundTriplet);
    CHECK(check_Lf(Exponent::from_triplet(*res.backgroundTriplet)));
    const auto j = to_json(res);
    CHECK(j["flags"]["tildeInU"] == true);
}

TEST_CASE("gamma factorization without closed forms") {
    const auto res = factorize_selfdec(gamma11());
    CHECK(res.report.tildeNonneg);
    CHECK(res.report.consistency < 1e-8);
    CHECK(res.report.productReconstructs < 1e-8);
    CHECK(res.report.uniquenessResidual < 1e-8);
}

TEST_CASE("atoms are rejected with a witness") {
    const auto phi = Exponent::from_triplet(LevyTriplet::pure_jump(LevyMeasure::discrete(1, {{v1(1.0), 1.0}})));
    try {
        factorize_selfdec(phi);
        FAIL("expected NotSelfdecomposable");
    } catch (const NotSelfdecomposable& e) {
        CHECK(e.witness());
    }
    CHECK_THROWS_AS(iterate_factorize(phi, 2), NotSelfdecomposable);
}

TEST_CASE("iterated factorization of a stable law") {
    const double p = 1.2;
    const auto phi = Exponent::stable(p, {{v1(1), 1.0}});
    const auto it = iterate_factorize(phi, 2);
    REQUIRE(it.factors.size() == 2);
    const double a = p / (p + 1), b = 1 / (p + 1);
    for (double y : {0.1, 2.0}) {
        CHECK(std::abs(it.factors[0](v1(y)) - a * phi(v1(y))) < 1e-10);
        CHECK(std::abs(it.factors[1](v1(y)) - a * b * phi(v1(y))) < 1e-10);
        CHECK(std::abs(it.remainder(v1(y)) - b * b * phi(v1(y))) < 1e-10);
    }
    CHECK(it.telescopingResidual < 1e-8);
    CHECK_THROWS_AS(iterate_factorize(phi, 0), InvalidArgument);
    CHECK_THROWS_AS(iterate_factorize(phi, 9), InvalidArgument);
}

TEST_CASE("one step of the iteration is the plain factorization") {
    const auto phi = Exponent::gamma(1.0, 1.0, v1(1));
    const auto one = iterate_factorize(phi, 1);
    const auto fac = factorize_selfdec(phi);
    for (const auto& y : verification_grid(1, 10)) {
        CHECK(std::abs(one.factors[0](y) - fac.muTilde(y)) < 1e-12);
        CHECK(std::abs(one.remainder(y) - fac.backgroundFactor(y)) < 1e-12);
    }
}

TEST_CASE("Laplace iteration to depth 3") {
    const auto phi = Exponent::from_triplet(LevyTriplet::pure_jump(LevyMeasure::laplace(v1(1))));
    const auto it = iterate_factorize(phi, 3);
    CHECK(it.telescopingResidual < 1e-8);
    for (double t : {0.01, 1.0, 50.0}) {
        std::complex<double> s = it.remainder(v1(t));
        for (const auto& f : it.factors) s += f(v1(t));
        CHECK(std::abs(s.real() + std::log1p(t * t)) < 1e-8);
    }
    REQUIRE(it.checks.size() == 3);
    for (const auto& c : it.checks) {
        CHECK(c.measureNonneg);
        CHECK(c.inversions == c.index - 1);
        CHECK(c.landsInU);
    }
}

TEST_CASE("background driving law") {
    const auto bd = background_driving(gamma11());
    const auto rays = bd.triplet.measure().merged_rays();
    REQUIRE(rays.size() == 1);
    for (double r : {0.1, 1.0, 4.0}) CHECK(rays.front().density(r) == doctest::Approx(std::exp(-r)).epsilon(1e-6));
    CHECK(bd.residual < 1e-6);

    const auto st = background_driving(Exponent::stable(0.8, {{v1(1), 1.0}}));
    CHECK(std::abs(st.rho(v1(2.0)) - 0.8 * Exponent::stable(0.8, {{v1(1), 1.0}})(v1(2.0))) < 1e-10);

    // rho = I-image of a compound Poisson law with a bounded jump.
    const auto cp = LevyTriplet(v1(0.3), Mat::Zero(1, 1), LevyMeasure::discrete(1, {{v1(2.0), 1.5}}));
    const auto selfdec = Exponent::from_triplet(apply_I_triplet(cp));
    const auto back = background_driving(selfdec);
    CHECK(back.residual < 1e-6);
    for (double y : {0.2, 1.0, 5.0}) {
        CHECK(std::abs(back.rho(v1(y)) - eval_exponent(cp, v1(y))) < 1e-6);
    }
}

TEST_CASE("L^f membership") {
    CHECK(check_Lf(Exponent::stable(1.5, {{v1(1), 1.0}})));
    const bool gammaVerdict = check_Lf(gamma11());
    MESSAGE("gamma(1,1) in L^f: " << gammaVerdict);
}

TEST_CASE("CSV table of factors") {
    const auto phi = Exponent::stable(1.0, {{v1(1), 1.0}});
    const auto csv = factors_csv({{"phi", phi}}, {v1(1.0)});
    CHECK(csv == "y,phi_re,phi_im\n1,-1,0\n");
}

}
