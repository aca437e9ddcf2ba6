#include <doctest.h>

#include <cmath>
#include <numeric>

#include <levycalc/operators.hpp>
#include <levycalc/simulation.hpp>

using namespace levycalc;

namespace {

Vec v1(double x) { return Vec::Constant(1, x); }

double mean(const std::vector<Vec>& s) {
    double m = 0.0;
    for (const auto& x : s) m += x[0];
    return m / static_cast<double>(s.size());
}

double variance(const std::vector<Vec>& s) {
    const double m = mean(s);
    double v = 0.0;
    for (const auto& x : s) v += (x[0] - m) * (x[0] - m);
    return v / static_cast<double>(s.size() - 1);
}

std::vector<Vec> ygrid() {
    std::vector<Vec> g;
    for (int k = 1; k <= 20; ++k) g.push_back(v1(0.25 * k));
    return g;
}

LevyProcessSpec spec_of(LevyTriplet t, double eps = 1e-3) {
    LevyProcessSpec s;
    s.triplet = std::move(t);
    s.smallJumpCut = eps;
    return s;
}

LevyTriplet drift_only(double c) { return LevyTriplet(v1(c), Mat::Zero(1, 1), LevyMeasure(1)); }

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("Brownian skeleton increments") {
    const double s2 = 2.5;
    const auto spec = spec_of(LevyTriplet::gaussian(Mat::Constant(1, 1, s2)));
    std::vector<Vec> inc;
    for (std::uint64_t rep = 0; rep < 400; ++rep) {
        const auto p = sample_path(spec, 2.0, 3, 50, rep);
        CHECK(p.jumpTimes.empty());
        REQUIRE(p.gaussianIncrements.size() == 50);
        for (const auto& g : p.gaussianIncrements) inc.push_back(g);
    }
    const double dt = 2.0 / 50;
    const double v = variance(inc);
    CHECK(std::abs(v - s2 * dt) < 3 * s2 * dt * std::sqrt(2.0 / static_cast<double>(inc.size())));
}

TEST_CASE("compound Poisson with a jump on the unit sphere is compensated") {
    const auto spec = spec_of(LevyTriplet::pure_jump(LevyMeasure::discrete(1, {{v1(1.0), 1.0}})));
    const auto s = sample_law(spec, 12, 100000);
    // Y(1) = N - t with N ~ Poisson(1).
    CHECK(std::abs(mean(s)) < 3 * std::sqrt(1.0 / 1e5));
    double jumps = 0.0;
    for (std::uint64_t rep = 0; rep < 20000; ++rep) jumps += sample_path(spec, 1.0, 4, 1, rep).jumpTimes.size();
    CHECK(std::abs(jumps / 20000 - 1.0) < 3 * std::sqrt(1.0 / 20000));
}

TEST_CASE("paths are deterministic per seed and replicate") {
    const auto spec = spec_of(LevyTriplet(v1(0.1), Mat::Identity(1, 1), LevyMeasure::gamma(1.0, 1.0, v1(1))));
    const auto a = sample_path(spec, 3.0, 77, 30, 5), b = sample_path(spec, 3.0, 77, 30, 5);
    const auto c = sample_path(spec, 3.0, 77, 30, 6);
    CHECK(a.jumpTimes == b.jumpTimes);
    REQUIRE(a.gaussianIncrements.size() == b.gaussianIncrements.size());
    for (std::size_t i = 0; i < a.gaussianIncrements.size(); ++i) CHECK(a.gaussianIncrements[i] == b.gaussianIncrements[i]);
    CHECK(a.at(3.0) == b.at(3.0));
    CHECK(a.at(3.0) != c.at(3.0));
    CHECK(std::is_sorted(a.jumpTimes.begin(), a.jumpTimes.end()));
    for (double t : a.jumpTimes) CHECK((t > 0.0 && t < 3.0));
    CHECK_THROWS_AS(a.at(3.5), CoverageError);
    CHECK_THROWS_AS(a.at(-0.1), CoverageError);

    SampleOptions one, many;
    one.workers = 1;
    many.workers = 4;
    const auto s1 = sample_class_U(spec, 8, 500, one), s4 = sample_class_U(spec, 8, 500, many);
    for (std::size_t i = 0; i < s1.size(); ++i) CHECK(s1[i] == s4[i]);
}

TEST_CASE("cadlag evaluation") {
    const auto spec = spec_of(LevyTriplet(v1(0.0), Mat::Zero(1, 1), LevyMeasure::discrete(1, {{v1(3.0), 2.0}})));
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const auto p = sample_path(spec, 1.0, 1, 4, rep);
        for (std::size_t k = 0; k < p.jumpTimes.size(); ++k) {
            const double t = p.jumpTimes[k];
            CHECK(p.at(t)[0] - p.at(std::nextafter(t, 0.0))[0] == doctest::Approx(3.0));
        }
    }
}

TEST_CASE("random integrals on deterministic paths") {
    const double c = 1.7;
    const auto path = sample_path(spec_of(drift_only(c)), 30.0, 1, 30);
    IntegralSpec is;
    is.h.kind = IntegrandFn::Kind::Constant;
    is.a = 0.5;
    is.b = 2.0;
    CHECK(random_integral(path, is)[0] == doctest::Approx(c * 1.5).epsilon(1e-14));

    is.h.kind = IntegrandFn::Kind::Identity;
    is.a = 0.0;
    is.b = 1.0;
    CHECK(random_integral(path, is)[0] == doctest::Approx(c / 2).epsilon(1e-14));

    is.h.kind = IntegrandFn::Kind::Custom;
    is.h.f = [](double s) { return s * s; };
    CHECK(random_integral(path, is)[0] == doctest::Approx(c / 3).epsilon(1e-12));

    // int_(e^{-T}, 1] t dY(-log t) = int_[0, T) e^{-s} dY(s).
    is.h.kind = IntegrandFn::Kind::Identity;
    is.r.kind = TimeChange::Kind::NegLog;
    is.a = std::exp(-20.0);
    CHECK(random_integral(path, is)[0] == doctest::Approx(c * (1 - std::exp(-20.0))).epsilon(1e-10));

    is.r.kind = TimeChange::Kind::Identity;
    is.a = 0.0;
    is.b = 31.0;
    CHECK_THROWS_AS(random_integral(path, is), CoverageError);
}

TEST_CASE("random integral with h = 1 is the increment") {
    const auto spec = spec_of(LevyTriplet(v1(0.2), Mat::Identity(1, 1), LevyMeasure::laplace(v1(1))));
    const auto path = sample_path(spec, 2.0, 9, 40);
    IntegralSpec is;
    is.h.kind = IntegrandFn::Kind::Constant;
    is.a = 0.3;
    is.b = 1.6;
    CHECK(random_integral(path, is)[0] == doctest::Approx(path.at(1.6)[0] - path.at(0.3)[0]).epsilon(1e-12));
}

TEST_CASE("class U and L samplers on Brownian drivers") {
    const auto spec = spec_of(LevyTriplet::gaussian(Mat::Identity(1, 1)));
    const std::size_t N = 40000;
    const auto u = sample_class_U(spec, 21, N);
    CHECK(std::abs(variance(u) - 1.0 / 3) < 3 * (1.0 / 3) * std::sqrt(2.0 / N));
    const auto l = sample_class_L(spec, 22, N);
    CHECK(std::abs(variance(l) - 0.5) < 3 * 0.5 * std::sqrt(2.0 / N));
}

TEST_CASE("zero driver") {
    const auto spec = spec_of(LevyTriplet(1));
    for (const auto& x : sample_class_L(spec, 1, 100)) CHECK(x[0] == 0.0);
    for (const auto& x : sample_class_U(spec, 1, 100)) CHECK(x[0] == 0.0);
}

TEST_CASE("class L needs a log moment") {
    const auto heavy = LevyMeasure::radial(1, {{v1(1), 1.0, RadialDensity::power(1.0, -1.0, kInfinity, -1.5)}});
    CHECK_THROWS_AS(sample_class_L(spec_of(LevyTriplet::pure_jump(heavy)), 1, 10), DomainViolation);
    const double T = class_L_horizon(LevyTriplet::gaussian(Mat::Identity(1, 1)));
    CHECK(T >= 10.0);
    CHECK(T <= 40.0);
}

TEST_CASE("small-jump cut") {
    const auto lap = LevyTriplet::pure_jump(LevyMeasure::laplace(v1(1)));
    CHECK_THROWS_AS(LevySampler(spec_of(lap, 0.0)), InfiniteIntensity);
    CHECK_THROWS_AS(LevySampler(spec_of(LevyTriplet::pure_jump(LevyMeasure::stable(1.0, {{v1(1), 1}})), 0.0)),
                    InfiniteIntensity);
    CHECK_THROWS_AS(LevySampler(spec_of(lap, -1.0)), InvalidArgument);
    const LevySampler exact(spec_of(LevyTriplet::pure_jump(LevyMeasure::discrete(1, {{v1(0.5), 2.0}})), 0.0));
    CHECK(exact.intensity() == doctest::Approx(2.0));
    CHECK(exact.drift()[0] == doctest::Approx(-1.0));
    CHECK(exact.gaussian_cov()(0, 0) == 0.0);

    const LevySampler approx(spec_of(lap, 1e-2));
    CHECK(approx.gaussian_cov()(0, 0) > 0.0);
    LevyProcessSpec drop = spec_of(lap, 1e-2);
    drop.smallJumpPolicy = SmallJumpPolicy::Drop;
    CHECK(LevySampler(drop).gaussian_cov()(0, 0) == 0.0);
}

TEST_CASE("ECF checks") {
    std::vector<Vec> zeros(1000, v1(0.0));
    const auto rep = ecf_compare(zeros, Exponent(1), ygrid());
    for (double z : rep.zScores) CHECK(z == 0.0);
    CHECK_THROWS_AS(ecf_compare(std::vector<Vec>(999, v1(0.0)), Exponent(1), ygrid()), InvalidArgument);

    const auto gauss = sample_law(spec_of(LevyTriplet::gaussian(Mat::Identity(1, 1))), 5, 20000);
    const auto lapPhi = Exponent::from_triplet(LevyTriplet::pure_jump(LevyMeasure::laplace(v1(1))));
    CHECK(ecf_compare(gauss, lapPhi, ygrid()).max_abs_z() > 10.0);
    CHECK(ecf_compare(gauss, Exponent::gaussian(Mat::Identity(1, 1)), ygrid()).pass_fraction() >= 0.95);
}

TEST_CASE("class U samples follow exp(J Phi)") {
    const auto t = LevyTriplet::pure_jump(LevyMeasure::laplace(v1(1)));
    const auto target = Exponent::apply_j(Exponent::from_triplet(t));
    const auto s = sample_class_U(spec_of(t), 31, 20000);
    CHECK(ecf_compare(s, target, ygrid()).pass_fraction() >= 0.95);

    // Dilating the driver dilates the samples.
    const double c = 2.0;
    const auto sd = sample_class_U(spec_of(dilated(t, c)), 32, 20000);
    CHECK(ecf_compare(sd, Exponent::dilate(target, c), ygrid()).pass_fraction() >= 0.95);
}

TEST_CASE("halving the cut keeps the law") {
    const auto t = LevyTriplet::pure_jump(LevyMeasure::gamma(1.0, 1.0, v1(1)));
    const auto target = Exponent::from_triplet(t);
    for (double eps : {1e-2, 5e-3}) {
        const auto s = sample_law(spec_of(t, eps), 41, 20000);
        CHECK(ecf_compare(s, target, ygrid()).pass_fraction() >= 0.95);
    }
}

TEST_CASE("CSV output") {
    CHECK(samples_csv({v1(1.5), v1(-2.0)}) == "x\n1.5\n-2\n");
    Vec p(2);
    p << 1, 2;
    CHECK(samples_csv({p}) == "x1,x2\n1,2\n");
    std::vector<Vec> zeros(1000, v1(0.0));
    const auto csv = ecf_csv(ecf_compare(zeros, Exponent(1), {v1(1.0)}));
    CHECK(csv == "y,ecf_re,ecf_im,cf_re,cf_im,stderr,z\n1,1,0,1,0,0,0\n");
    CHECK_THROWS_AS(add_samples({v1(1)}, {}), InvalidArgument);
}

}
