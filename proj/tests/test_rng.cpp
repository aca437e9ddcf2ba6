#include <doctest.h>

#include <levycalc/rng.hpp>

using namespace levycalc;

TEST_SUITE("rng") {

TEST_CASE("philox4x32-10 known answers") {
    // Published known-answer vectors of the Philox4x32-10 generator.
    CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
          PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
          PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are reproducible and distinct") {
    RandomStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u32();
        CHECK(x == b.next_u32());
        (void)c.next_u32();
        (void)d.next_u32();
    }
    RandomStream e(42, 3), f(42, 4), g(43, 3);
    int sameC = 0, sameD = 0;
    for (int i = 0; i < 100; ++i) {
        const auto x = e.next_u32();
        sameC += x == f.next_u32();
        sameD += x == g.next_u32();
    }
    CHECK(sameC < 3);
    CHECK(sameD < 3);
}

TEST_CASE("uniform, normal and exponential moments") {
    RandomStream r(7, 0);
    const int n = 200000;
    double su = 0, su2 = 0, sn = 0, sn2 = 0, se = 0;
    double umin = 1, umax = 0;
    for (int i = 0; i < n; ++i) {
        const double u = r.uniform();
        umin = std::min(umin, u);
        umax = std::max(umax, u);
        su += u;
        su2 += u * u;
        const double z = r.normal();
        sn += z;
        sn2 += z * z;
        se += r.exponential();
    }
    CHECK(umin > 0.0);
    CHECK(umax < 1.0);
    CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
    CHECK(su2 / n == doctest::Approx(1.0 / 3.0).epsilon(0.01));
    CHECK(std::abs(sn / n) < 0.01);
    CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(se / n == doctest::Approx(1.0).epsilon(0.01));
}

}
