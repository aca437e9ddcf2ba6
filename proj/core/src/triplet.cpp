#include "levycalc/triplet.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "levycalc/special.hpp"

namespace levycalc {

LevyTriplet::LevyTriplet(int dim) : shift_(Vec::Zero(dim)), cov_(Mat::Zero(dim, dim)), measure_(dim) {}

LevyTriplet::LevyTriplet(Vec shift, Mat cov, LevyMeasure measure)
    : shift_(std::move(shift)), cov_(std::move(cov)), measure_(std::move(measure)) {
    validate();
}

void LevyTriplet::validate() const {
    const int d = dim();
    if (d < 1) throw InvalidArgument("triplet dimension must be at least 1");
    if (cov_.rows() != d || cov_.cols() != d) throw InvalidArgument("covariance must be d x d");
    if (measure_.dim() != d) throw InvalidArgument("measure dimension does not match the shift");
    if (!shift_.allFinite() || !cov_.allFinite()) throw InvalidArgument("shift and covariance must be finite");
    const double scale = std::max(1.0, cov_.cwiseAbs().maxCoeff());
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw InvalidArgument("covariance must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(cov_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) throw InvalidArgument("covariance must be positive semidefinite");
    measure_.validate();
}

LevyTriplet LevyTriplet::gaussian(Mat cov) {
    const int d = static_cast<int>(cov.rows());
    return LevyTriplet(Vec::Zero(d), std::move(cov), LevyMeasure(d));
}

LevyTriplet LevyTriplet::pure_jump(LevyMeasure m) {
    const int d = m.dim();
    return LevyTriplet(Vec::Zero(d), Mat::Zero(d, d), std::move(m));
}

std::complex<double> ray_exponent(const RadialDensity& d, double k, const QuadratureConfig& cfg) {
    using C = std::complex<double>;
    if (k == 0.0 || d.is_zero()) return {};
    const double R = d.rmax();
    const auto br = d.breakpoints();
    C total = integrate_piecewise(
        [&](double r) -> C { return expm1_i_minus_linear(k * r) * d(r); }, 0.0, std::min(1.0, R), br, cfg);
    if (!(R > 1.0)) return total;
    if (std::isfinite(R)) {
        total += integrate_piecewise([&](double r) -> C { return expm1_i(k * r) * d(r); }, 1.0, R, br, cfg);
        return total;
    }
    // Oscillatory tail: accumulate int e^{ikr} l(r) dr on doubling panels until
    // the Dirichlet bound 2 l(hi) / |k| for a nonincreasing tail is negligible.
    const double mass = d.integral(1.0, kInfinity, cfg);
    total -= mass;
    C osc{};
    double absAcc = std::abs(total) + std::abs(mass);
    double lo = 1.0;
    std::vector<double> cuts;
    for (double b : br) {
        if (b > 1.0) cuts.push_back(b);
    }
    while (true) {
        const double hi = 2.0 * lo;
        std::vector<double> inner;
        for (double b : cuts) {
            if (b > lo && b < hi) inner.push_back(b);
        }
        inner.push_back(hi);
        double a = lo;
        for (double b : inner) {
            auto res = integrate_adaptive([&](double r) -> C { return std::polar(d(r), k * r); }, a, b, cfg,
                                          std::max(cfg.relTol * std::max(absAcc, 1e-300), cfg.absTol));
            osc += res.value;
            absAcc += res.absIntegral;
            a = b;
        }
        lo = hi;
        const double bound = 2.0 * std::abs(d(lo)) / std::abs(k);
        if (bound <= std::max(cfg.relTol * absAcc, cfg.absTol)) break;
        if (lo > 1e9) throw QuadratureFailure("oscillatory tail of a ray exponent did not converge");
    }
    return total + osc;
}

std::complex<double> eval_jump_part(const LevyMeasure& m, const Vec& y, double s, const QuadratureConfig& cfg) {
    using C = std::complex<double>;
    C total{};
    for (const auto& a : m.atoms()) {
        const double theta = s * y.dot(a.x);
        total += a.mass * (a.x.norm() <= 1.0 ? expm1_i_minus_linear(theta) : expm1_i(theta));
    }
    for (const auto& r : m.rays()) total += r.weight * ray_exponent(r.density, s * y.dot(r.u), cfg);
    for (const auto& f : m.families()) {
        std::visit(
            [&](const auto& fam) {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, StableFamily>) {
                    for (const auto& sp : fam.spectral) total -= sp.w * std::pow(std::abs(s * y.dot(sp.u)), fam.p);
                } else if constexpr (std::is_same_v<T, GammaFamily>) {
                    const double k = s * y.dot(fam.direction);
                    const double a = fam.shape;
                    const double b = fam.rate;
                    total += -a * std::log(C(1.0, -k / b)) - C(0.0, k * a * (-std::expm1(-b)) / b);
                } else {
                    const double k = s * y.dot(fam.direction);
                    total -= std::log1p(k * k);
                }
            },
            f);
    }
    return total;
}

std::complex<double> eval_exponent_scaled(const LevyTriplet& t, const Vec& y, double s, const QuadratureConfig& cfg) {
    if (y.size() != t.dim()) throw InvalidArgument("argument dimension does not match the triplet");
    if (s == 0.0) return {};
    const double drift = s * y.dot(t.shift());
    const double quad = s * s * y.dot(t.cov() * y);
    return std::complex<double>(-0.5 * quad, drift) + eval_jump_part(t.measure(), y, s, cfg);
}

std::complex<double> eval_exponent(const LevyTriplet& t, const Vec& y, const QuadratureConfig& cfg) {
    return eval_exponent_scaled(t, y, 1.0, cfg);
}

LevyTriplet operator+(const LevyTriplet& a, const LevyTriplet& b) {
    if (a.dim() != b.dim()) throw InvalidArgument("cannot add triplets of different dimensions");
    return LevyTriplet(a.shift() + b.shift(), a.cov() + b.cov(), a.measure() + b.measure());
}

LevyTriplet scaled(const LevyTriplet& t, double lambda) {
    if (!(lambda >= 0.0)) throw NegativeScale("exponents can only be scaled by lambda >= 0");
    return LevyTriplet(lambda * t.shift(), lambda * t.cov(), t.measure().scaled(lambda));
}

LevyTriplet dilated(const LevyTriplet& t, double c, const QuadratureConfig& cfg) {
    if (c == 0.0) return LevyTriplet(t.dim());
    // Compensator correction: int c x (1_B(c x) - 1_B(x)) M(dx).
    const double ac = std::abs(c);
    Vec corr = Vec::Zero(t.dim());
    auto one = [](double) { return 1.0; };
    if (ac < 1.0) corr = c * t.measure().band_vector_integral(1.0, 1.0 / ac, one, cfg);
    else if (ac > 1.0) corr = -c * t.measure().band_vector_integral(1.0 / ac, 1.0, one, cfg);
    return LevyTriplet(c * t.shift() + corr, c * c * t.cov(), t.measure().dilated(c));
}

}  // namespace levycalc
