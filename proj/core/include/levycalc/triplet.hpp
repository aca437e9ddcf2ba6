#pragma once

#include <complex>

#include "levycalc/measure.hpp"

namespace levycalc {

/// Levy-Khintchine triplet [a, R, M]; the compensator uses the closed unit ball.
class LevyTriplet {
public:
    explicit LevyTriplet(int dim = 1);
    LevyTriplet(Vec shift, Mat cov, LevyMeasure measure);

    int dim() const { return static_cast<int>(shift_.size()); }
    const Vec& shift() const { return shift_; }
    const Mat& cov() const { return cov_; }
    const LevyMeasure& measure() const { return measure_; }

    /// Symmetry, PSD (eigenvalues >= -1e-12), dimensions and measure checks.
    void validate() const;

    static LevyTriplet gaussian(Mat cov);
    static LevyTriplet pure_jump(LevyMeasure m);

private:
    Vec shift_;
    Mat cov_;
    LevyMeasure measure_;
};

/// i<y,a> - <y,Ry>/2 + int [e^{i<y,x>} - 1 - i<y,x> 1{|x| <= 1}] M(dx).
std::complex<double> eval_exponent(const LevyTriplet& t, const Vec& y, const QuadratureConfig& cfg = {});
/// Exponent at s * y, without forming s * y.
std::complex<double> eval_exponent_scaled(const LevyTriplet& t, const Vec& y, double s,
                                          const QuadratureConfig& cfg = {});
/// Jump part of the exponent at s * y.
std::complex<double> eval_jump_part(const LevyMeasure& m, const Vec& y, double s, const QuadratureConfig& cfg = {});
/// int_0^inf [e^{ikr} - 1 - ikr 1{r <= 1}] l(r) dr.
std::complex<double> ray_exponent(const RadialDensity& d, double k, const QuadratureConfig& cfg = {});

LevyTriplet operator+(const LevyTriplet& a, const LevyTriplet& b);
/// Triplet of lambda * Phi, lambda >= 0.
LevyTriplet scaled(const LevyTriplet& t, double lambda);
/// Triplet of Phi(c .), i.e. the law of c X.
LevyTriplet dilated(const LevyTriplet& t, double c, const QuadratureConfig& cfg = {});

}  // namespace levycalc
