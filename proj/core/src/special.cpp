#include "levycalc/special.hpp"

#include <cmath>
#include <numbers>

#include "levycalc/errors.hpp"

namespace levycalc {

double expint_e1(double x) {
    if (!(x > 0.0)) throw InvalidArgument("E1 is defined for positive arguments only");
    if (x > 700.0) return 0.0;
    return -std::expint(-x);
}

std::complex<double> expm1_i(double theta) {
    const double h = std::sin(0.5 * theta);
    return {-2.0 * h * h, std::sin(theta)};
}

std::complex<double> expm1_i_minus_linear(double theta) {
    const double h = std::sin(0.5 * theta);
    const double re = -2.0 * h * h;
    double im;
    if (std::abs(theta) < 1e-2) {
        // sin t - t = -t^3/6 + t^5/120 - t^7/5040
        const double t2 = theta * theta;
        im = -theta * t2 * (1.0 / 6.0 - t2 * (1.0 / 120.0 - t2 / 5040.0));
    } else {
        im = std::sin(theta) - theta;
    }
    return {re, im};
}

double stable_radial_constant(double p) {
    if (!(p > 0.0 && p < 2.0)) throw InvalidArgument("stable index must lie in (0, 2)");
    if (p == 1.0) return 0.5 * std::numbers::pi;
    return std::tgamma(1.0 - p) * std::cos(0.5 * std::numbers::pi * p) / p;
}

}  // namespace levycalc
