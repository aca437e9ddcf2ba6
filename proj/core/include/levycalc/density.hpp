#pragma once

// Radial densities l(r), r > 0, of Levy measures along a ray.
//
// A density is an immutable expression tree. Leaves are closed-form kernels
// (power/log, gamma, exponential-integral, tabulated); interior nodes are
// linear combinations and the images under the radial forms of J and I:
//
//   (J n)(r) = int_r^inf n(w) w^{-1} dw,     (I n)(r) = r^{-1} int_r^inf n(w) dw.
//
// apply_j / apply_i return closed forms where one is known and fall back to
// quadrature-backed nodes otherwise. invert_j / invert_i undo them
// structurally where possible and by differentiation otherwise.

#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "levycalc/quadrature.hpp"

namespace levycalc {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class DensityNode;

class RadialDensity {
public:
    enum class Kind {
        Zero,
        PowerLog,
        GammaKernel,
        ExpIntKernel,
        Tabulated,
        Sum,
        JImage,
        IImage,
        Dilated,
        NegRDerivative,
        PositivePart,
    };

    /// The zero density.
    RadialDensity();

    /// c r^q (1 + log(1 + r))^s on (0, rmax].
    static RadialDensity power(double c, double q, double rmax = kInfinity, double s = 0.0);
    /// c r^q e^{-rate r} on (0, inf).
    static RadialDensity gamma_kernel(double c, double q, double rate);
    /// c r^q E1(rate r) on (0, inf).
    static RadialDensity expint_kernel(double c, double q, double rate);
    /// Piecewise linear through (r_i, v_i), constant v_0 on (0, r_0], zero past the last knot.
    static RadialDensity tabulated(std::vector<double> r, std::vector<double> values);
    /// Canonical linear combination: nested sums are flattened and equal terms merged.
    static RadialDensity sum(const std::vector<std::pair<double, RadialDensity>>& terms);
    /// Quadrature-backed J^k image of `parent`, without simplification.
    static RadialDensity j_image(int power, RadialDensity parent, const QuadratureConfig& cfg = {});
    /// Quadrature-backed I image of `parent`, without simplification.
    static RadialDensity i_image(RadialDensity parent, const QuadratureConfig& cfg = {});
    /// Density of the dilation T_c for c > 0: l(r / c) / c.
    static RadialDensity dilated(double c, RadialDensity parent);
    /// -r m'(r), with a central difference (step 1e-5 r) when m' has no closed form.
    static RadialDensity neg_r_derivative(RadialDensity parent);
    /// max(l, 0), or max(-l, 0) when `negate`.
    static RadialDensity positive_part(RadialDensity parent, bool negate,
                                       const QuadratureConfig& cfg = {});

    double operator()(double r) const;
    std::optional<double> derivative(double r) const;
    double derivative_or_fd(double r) const;
    /// Right end of the support (may be infinite).
    double rmax() const;
    /// Finite support ends and kinks, used to split quadratures.
    std::vector<double> breakpoints() const;
    double integral(double a, double b, const QuadratureConfig& cfg) const;
    double tail_mass(double a, const QuadratureConfig& cfg) const { return integral(a, kInfinity, cfg); }
    /// Structural finiteness of int_{r>1} log^k(r) l(r) dr; nullopt when unknown.
    std::optional<bool> log_moment_finite(int order) const;
    /// Structural finiteness of int min(1, r^2) l(r) dr; nullopt when unknown.
    std::optional<bool> levy_integrable() const;

    Kind kind() const;
    bool is_zero() const { return kind() == Kind::Zero; }
    RadialDensity scaled(double c) const;

    nlohmann::json to_json() const;
    static RadialDensity from_json(const nlohmann::json& j);
    /// Structural identity key (canonical JSON).
    std::string key() const;

    const DensityNode& node() const { return *node_; }
    const std::shared_ptr<const DensityNode>& node_ptr() const { return node_; }
    explicit RadialDensity(std::shared_ptr<const DensityNode> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<const DensityNode> node_;
};

RadialDensity operator+(const RadialDensity& a, const RadialDensity& b);
RadialDensity operator-(const RadialDensity& a, const RadialDensity& b);

/// Result of undoing J or I: a density plus atoms forced by a jump of m at a
/// finite support end. Atoms are (radius, mass) pairs.
struct Inversion {
    RadialDensity density;
    std::vector<std::pair<double, double>> boundaryAtoms;
};

RadialDensity apply_j(const RadialDensity& n, const QuadratureConfig& cfg = {});
RadialDensity apply_i(const RadialDensity& n, const QuadratureConfig& cfg = {});
/// n = -r m'(r).
Inversion invert_j(const RadialDensity& m, const QuadratureConfig& cfg = {});
/// n = -(r m(r))'.
Inversion invert_i(const RadialDensity& m, const QuadratureConfig& cfg = {});

/// 512-point log-spaced verification grid on the support, ending at rmax when finite.
std::vector<double> radial_grid(double rmax, std::size_t points = 512, double lo = 1e-4, double hi = 1e4);

}  // namespace levycalc
