#pragma once

// Reference computations that do not use the library's quadrature: fixed
// composite Simpson rules and libstdc++ special functions.

#include <cmath>
#include <complex>
#include <functional>

namespace oracle {

/// Composite Simpson rule with n (even) subintervals.
template <class F>
auto simpson(const F& f, double a, double b, int n = 200000) {
    using T = decltype(f(a));
    if (n % 2) ++n;
    const double h = (b - a) / n;
    T sum = f(a) + f(b);
    for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return sum * (h / 3.0);
}

/// int_a^inf f(r) dr for a > 0 through r = a e^v, v in [0, vmax].
template <class F>
auto simpson_to_infinity(const F& f, double a, double vmax = 6.0, int n = 200000) {
    return simpson([&](double v) { return f(a * std::exp(v)) * a * std::exp(v); }, 0.0, vmax, n);
}

/// E1(x) = -Ei(-x).
inline double e1(double x) { return -std::expint(-x); }

inline constexpr double pi = 3.14159265358979323846;

}  // namespace oracle
