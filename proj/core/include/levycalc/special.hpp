#pragma once

#include <complex>

namespace levycalc {

/// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0.
double expint_e1(double x);

/// e^{i theta} - 1, accurate for small theta.
std::complex<double> expm1_i(double theta);

/// e^{i theta} - 1 - i theta, accurate for small theta.
std::complex<double> expm1_i_minus_linear(double theta);

/// K_p = int_0^inf (1 - cos r) r^{-1-p} dr for p in (0, 2).
double stable_radial_constant(double p);

}  // namespace levycalc
