#pragma once

// Levy measures on R^d as finite sums of components: point masses, radial rays
// carrying a density, and closed-form families (symmetric stable, gamma,
// Laplace jumps).

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "levycalc/density.hpp"
#include "levycalc/errors.hpp"
#include "levycalc/quadrature.hpp"

namespace levycalc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Atom {
    Vec x;
    double mass = 0.0;
};

/// weight * density(r) dr along the ray {r u : r > 0}.
struct RadialRay {
    Vec u;
    double weight = 1.0;
    RadialDensity density;
};

struct SpectralPoint {
    Vec u;
    double w = 0.0;
};

/// Symmetric p-stable jumps with exponent -sum_k w_k |<y, u_k>|^p.
struct StableFamily {
    double p = 1.0;
    std::vector<SpectralPoint> spectral;
};

/// Jumps shape * e^{-rate r} / r dr along `direction`.
struct GammaFamily {
    double shape = 1.0;
    double rate = 1.0;
    Vec direction;
};

/// Jumps e^{-r} / r dr along +direction and -direction; exponent -log(1 + <y,u>^2).
struct LaplaceFamily {
    Vec direction;
};

using Family = std::variant<StableFamily, GammaFamily, LaplaceFamily>;

/// Rays sharing one direction, with their densities summed and atoms collected.
struct MergedRay {
    Vec u;
    RadialDensity density;
    std::vector<std::pair<double, double>> atoms;  // (radius, mass)
};

class LevyMeasure {
public:
    enum class Representation { Zero, Discrete, Radial, Family, Mixed };

    explicit LevyMeasure(int dim = 1);

    static LevyMeasure discrete(int dim, std::vector<Atom> atoms);
    static LevyMeasure radial(int dim, std::vector<RadialRay> rays);
    static LevyMeasure family(int dim, Family f);
    static LevyMeasure stable(double p, std::vector<SpectralPoint> spectral);
    static LevyMeasure gamma(double shape, double rate, Vec direction);
    static LevyMeasure laplace(Vec direction);

    int dim() const { return dim_; }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const std::vector<RadialRay>& rays() const { return rays_; }
    const std::vector<Family>& families() const { return families_; }
    Representation representation() const;
    bool is_zero() const;

    LevyMeasure& add_atom(Atom a);
    LevyMeasure& add_ray(RadialRay r);
    LevyMeasure& add_family(Family f);

    /// Every component as a ray (families expanded); atoms are not included.
    std::vector<RadialRay> expanded_rays() const;
    /// Rays and atoms grouped by direction.
    std::vector<MergedRay> merged_rays() const;

    /// Checks signs, dimensions and int min(1, r^2) M(dr) < inf.
    void validate() const;

    /// int_{|x| > 1} f(|x|) M(dx).
    double outer_integral(const std::function<double(double)>& f,
                          const QuadratureConfig& cfg = {}) const;
    /// int_{|x| > 1} g(|x|) x M(dx) for a radial weight g.
    Vec outer_vector_integral(const std::function<double(double)>& g,
                              const QuadratureConfig& cfg = {}) const;
    /// int_{lo < |x| <= hi} h(|x|) x M(dx).
    Vec band_vector_integral(double lo, double hi, const std::function<double(double)>& h,
                             const QuadratureConfig& cfg = {}) const;
    /// Total mass of {|x| > eps}; infinite when the intensity is not finite.
    double mass_above(double eps, const QuadratureConfig& cfg = {}) const;

    LevyMeasure operator+(const LevyMeasure& other) const;
    LevyMeasure scaled(double c) const;
    /// Image under x -> c x.
    LevyMeasure dilated(double c) const;

private:
    int dim_;
    std::vector<Atom> atoms_;
    std::vector<RadialRay> rays_;
    std::vector<Family> families_;
};

struct MomentReport {
    double logMoment = 0.0;
    double log2Moment = 0.0;
    bool inLogDomain = true;
    bool inLog2Domain = true;
};

MomentReport log_moments(const LevyMeasure& m, const QuadratureConfig& cfg = {});

struct ClassReport {
    bool in_L = false;
    bool in_U = false;
    bool in_Lf = false;
    /// Direct test M(A) >= M(e^t A) over annuli A and t in {0.1, 0.5, 1, 2}.
    bool grid_test_pass = false;
    std::optional<Witness> witnessL;
    std::optional<Witness> witnessU;
    std::optional<Witness> witnessGrid;
};

/// Monotonicity of k(r) = r l(r) (class L) and l(r) (class U) per ray, the
/// direct dilation grid test, and L^f membership through the J-preimage.
/// Throws ClassificationInconsistent if the grid test rejects a measure the
/// monotonicity test places in L.
ClassReport classify_measure(const LevyMeasure& m, const QuadratureConfig& cfg = {});

/// Monotonicity verdict for one density: nullopt if nonincreasing on the
/// verification grid, else the first radius where it increases. `timesR`
/// tests r l(r) instead of l(r).
std::optional<double> monotonicity_witness(const RadialDensity& d, bool timesR);

/// Unit vector in direction v; throws for the zero vector.
Vec unit(const Vec& v);
bool same_direction(const Vec& a, const Vec& b);

}  // namespace levycalc
