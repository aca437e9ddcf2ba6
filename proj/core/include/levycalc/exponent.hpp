#pragma once

// Evaluable Levy exponents. An exponent is backed by a triplet, by a closed
// form, or by an operator applied to another exponent; all are immutable and
// share their parents.

#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "levycalc/triplet.hpp"

namespace levycalc {

class ExponentNode;

class Exponent {
public:
    enum class Kind { TripletBacked, ClosedForm, OperatorApplied };
    enum class Op { None, J, I, Scale, Dilate, Sum, JPower };
    enum class Image { J, I, Tilde };

    /// The zero exponent in dimension `dim`.
    explicit Exponent(int dim = 1);

    static Exponent from_triplet(LevyTriplet t, const QuadratureConfig& cfg = {});
    static Exponent gaussian(Mat cov);
    static Exponent stable(double p, std::vector<SpectralPoint> spectral);
    /// Gamma law along `direction`: -shape log(1 - i<y,u>/rate).
    static Exponent gamma(double shape, double rate, Vec direction);
    /// Laplace law along `direction`: -log(1 + <y,u>^2).
    static Exponent laplace(Vec direction);
    /// Closed form of J applied to the gamma law.
    static Exponent gamma_j(double shape, double rate, Vec direction);
    /// Closed form of (I - J) applied to the gamma law.
    static Exponent gamma_tilde(double shape, double rate, Vec direction);
    /// 2 - log(1 + t^2) - 2 arctan(t) / t with t = <y,u>.
    static Exponent laplace_j(Vec direction);
    /// 2 (arctan t - t) / t with t = <y,u>.
    static Exponent laplace_tilde(Vec direction);

    /// Quadrature-backed operator images.
    static Exponent apply_j(Exponent parent, const QuadratureConfig& cfg = {});
    static Exponent apply_i(Exponent parent, const QuadratureConfig& cfg = {});
    /// J^k as one quadrature: int_0^inf Phi(e^{-u} y) e^{-u} u^{k-1} / (k-1)! du.
    static Exponent apply_j_power(Exponent parent, int k, const QuadratureConfig& cfg = {});
    static Exponent scale(Exponent parent, double lambda);
    static Exponent dilate(Exponent parent, double c);
    /// sum_k coef_k Phi_k; coefficients may be negative (formal differences).
    static Exponent linear(std::vector<std::pair<double, Exponent>> terms);

    std::complex<double> operator()(const Vec& y) const;
    /// Phi(s y).
    std::complex<double> eval_scaled(const Vec& y, double s) const;
    std::complex<double> at(double t) const;

    int dim() const;
    Kind kind() const;
    Op op() const;
    /// Operands of an operator-applied exponent.
    std::vector<std::pair<double, Exponent>> operands() const;
    /// Closed form of J Phi, I Phi or (I - J) Phi, when one is known.
    std::optional<Exponent> closed_image(Image which) const;
    /// Parameter of Scale / Dilate / JPower nodes.
    double parameter() const;
    /// Stored triplet of triplet-backed and closed-form exponents.
    std::optional<LevyTriplet> triplet() const;
    /// Largest k <= 8 with a finite log^k moment of the underlying measure.
    int log_moment_order() const;
    std::string describe() const;

    const ExponentNode& node() const { return *node_; }
    explicit Exponent(std::shared_ptr<const ExponentNode> n) : node_(std::move(n)) {}

private:
    std::shared_ptr<const ExponentNode> node_;
};

inline constexpr int kLogMomentCap = 8;

/// Largest k <= kLogMomentCap with int_{|x|>1} log^k |x| M(dx) < inf.
int log_moment_order(const LevyMeasure& m, const QuadratureConfig& cfg = {});

}  // namespace levycalc
