#pragma once

// J and I at the level of exponents (quadrature), Levy measures (radial
// pushforwards) and triplets.
//
//   (J Phi)(y) = int_0^1 Phi(s y) ds,      (I Phi)(y) = int_0^1 Phi(s y) ds / s.

#include <optional>

#include "levycalc/exponent.hpp"
#include "levycalc/operator_expr.hpp"

namespace levycalc {

Exponent apply_J_exponent(const Exponent& phi, const QuadratureConfig& cfg = {});
/// Throws DomainViolation when the log moment is infinite.
Exponent apply_I_exponent(const Exponent& phi, const QuadratureConfig& cfg = {});
/// lambda * Phi; throws NegativeScale for lambda < 0.
Exponent scale_exponent(const Exponent& phi, double lambda);
/// Phi(c .).
Exponent dilate_exponent(const Exponent& phi, double c);
/// Applies an operator expression; (compose A B) applies B first.
Exponent apply_operator(const OperatorExpr& e, const Exponent& phi, const QuadratureConfig& cfg = {});

LevyMeasure apply_J_measure(const LevyMeasure& m, const QuadratureConfig& cfg = {});
/// Throws DomainViolation when the log moment is infinite.
LevyMeasure apply_I_measure(const LevyMeasure& m, const QuadratureConfig& cfg = {});

struct SignedMeasureResult {
    LevyMeasure positive;
    LevyMeasure negative;
    /// The negative part vanishes on the verification grid.
    bool nonneg = false;
    /// Witness where the difference is negative, when it is.
    std::optional<Witness> witness;
};

/// M - J M as a (positive, negative) pair.
SignedMeasureResult tilde_measure(const LevyMeasure& m, const QuadratureConfig& cfg = {});

/// n(r) = -r m'(r) per ray. Throws NotInRange if the result is negative or
/// needs an atom at a finite support end.
LevyMeasure invert_J_measure(const LevyMeasure& m, const QuadratureConfig& cfg = {});
/// rho with I rho = m: n(r) = -(r m(r))'; atoms at finite support ends are kept.
LevyMeasure invert_I_measure(const LevyMeasure& m, const QuadratureConfig& cfg = {});

/// Triplet of J Phi: (a/2 + int_{|x|>1} x / (2|x|^2) M(dx), R/3, J M).
LevyTriplet apply_J_triplet(const LevyTriplet& t, const QuadratureConfig& cfg = {});
/// Triplet of I Phi: (a + int_{|x|>1} x / |x| M(dx), R/2, I M).
LevyTriplet apply_I_triplet(const LevyTriplet& t, const QuadratureConfig& cfg = {});
/// Triplet of (I - J) Phi; throws NotSelfdecomposable if M - J M is signed.
LevyTriplet tilde_triplet(const LevyTriplet& t, const QuadratureConfig& cfg = {});
/// Triplet of the rho with I rho = Phi.
LevyTriplet invert_I_triplet(const LevyTriplet& t, const QuadratureConfig& cfg = {});

/// Triplet of an exponent when it can be assembled from stored triplets and
/// the measure-level transforms; nullopt otherwise.
std::optional<LevyTriplet> measure_form(const Exponent& phi, const QuadratureConfig& cfg = {});

/// Minimum over the verification grid of a ray density, relative to its scale.
/// Returns the radius of the most negative value below -tol * scale, if any.
std::optional<double> negativity_witness(const RadialDensity& d, double tol = 1e-10);

}  // namespace levycalc
