#pragma once

// Monte Carlo for Levy processes: compound-Poisson jumps above a cut plus a
// Gaussian part on a grid, random integrals by integration by parts,
// samplers for the classes U and L, and empirical characteristic functions.

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "levycalc/exponent.hpp"
#include "levycalc/rng.hpp"

namespace levycalc {

enum class SmallJumpPolicy { Drop, DiffusionApprox };

struct LevyProcessSpec {
    LevyTriplet triplet;
    /// Jumps with |x| <= cut are dropped or replaced by a Gaussian; a cut of 0
    /// simulates every jump and needs a finite Levy measure (else InfiniteIntensity).
    double smallJumpCut = 1e-3;
    SmallJumpPolicy smallJumpPolicy = SmallJumpPolicy::DiffusionApprox;
    QuadratureConfig cfg{};
};

/// Cadlag skeleton on [0, T]: Y(t) = drift t + G(t) + sum_{tau_k <= t} J_k,
/// with G linear between grid points.
struct PathSample {
    double T = 0.0;
    std::vector<double> jumpTimes;
    std::vector<Vec> jumpSizes;
    std::vector<double> grid;
    /// gaussianIncrements[i] is G(grid[i + 1]) - G(grid[i]).
    std::vector<Vec> gaussianIncrements;
    Vec drift;

    int dim() const { return static_cast<int>(drift.size()); }
    /// Right-continuous evaluation; throws CoverageError outside [0, T].
    Vec at(double t) const;
};

/// Precomputed jump tables, drift and Gaussian factor for one process.
class LevySampler {
public:
    explicit LevySampler(const LevyProcessSpec& spec);

    PathSample sample_path(double T, RandomStream& rng, std::size_t nSteps) const;
    /// Y(T) without building a path.
    Vec sample_increment(double T, RandomStream& rng) const;
    Vec sample_jump(RandomStream& rng) const;

    int dim() const { return dim_; }
    double intensity() const { return intensity_; }
    const Vec& drift() const { return drift_; }
    const Mat& gaussian_cov() const { return cov_; }

private:
    struct RayTable {
        Vec u;
        double mass = 0.0;
        // Exact Pareto radii eps * U^{-1/p} when p > 0; else tabulated.
        double paretoIndex = 0.0;
        std::vector<double> edges;
        std::vector<double> cdf;
    };
    double sample_radius(const RayTable& t, RandomStream& rng) const;

    int dim_;
    double eps_;
    Vec drift_;
    Mat cov_;
    Mat factor_;
    bool gaussian_ = false;
    double intensity_ = 0.0;
    std::vector<Atom> atoms_;
    std::vector<RayTable> rays_;
    std::vector<double> componentCdf_;
};

PathSample sample_path(const LevyProcessSpec& spec, double T, std::uint64_t seed, std::size_t nSteps,
                       std::uint64_t replicate = 0);

/// Bounded-variation integrand h on [a, b].
struct IntegrandFn {
    enum class Kind { Constant, Identity, ExpDecay, Custom };
    Kind kind = Kind::Identity;
    double c = 1.0;
    std::function<double(double)> f;
    std::function<double(double)> df;  // optional derivative of f

    double value(double s) const;
    double derivative(double s) const;
};

struct TimeChange {
    enum class Kind { Identity, NegLog };
    Kind kind = Kind::Identity;
    double operator()(double s) const;
    /// s with r(s) = t.
    double inverse(double t) const;
    bool increasing() const { return kind == Kind::Identity; }
};

struct IntegralSpec {
    IntegrandFn h;
    TimeChange r;
    double a = 0.0;
    double b = 1.0;
};

/// h(b) Y(r(b)) - h(a) Y(r(a)) - int_(a,b] Y(r(s)) dh(s). For a decreasing r
/// the sign is flipped so that increments are taken along increasing time,
/// e.g. int_(0,1] t dY(-log t) = int_(0,inf) e^{-s} dY(s).
Vec random_integral(const PathSample& path, const IntegralSpec& spec);

struct SampleOptions {
    /// Gaussian grid cells per unit time.
    std::size_t stepsPerUnit = 64;
    unsigned workers = 0;
};

/// N draws of int_(0,1] t dY(t).
std::vector<Vec> sample_class_U(const LevyProcessSpec& spec, std::uint64_t seed, std::size_t N,
                                const SampleOptions& opt = {});
/// N draws of int_(0,T] e^{-t} dY(t); horizonT <= 0 selects class_L_horizon.
std::vector<Vec> sample_class_L(const LevyProcessSpec& spec, std::uint64_t seed, std::size_t N,
                                double horizonT = 0.0, const SampleOptions& opt = {});
/// N draws of Y(1).
std::vector<Vec> sample_law(const LevyProcessSpec& spec, std::uint64_t seed, std::size_t N,
                            const SampleOptions& opt = {});

/// Horizon for the class-L sampler. The neglected tail int_T^inf e^{-t} dY(t)
/// has exponent (I Phi)(e^{-T} y), so its size is about e^{-T} times the scale
/// of Y(1); T = 10 + log(1 + scale) keeps it below 1e-3 of the target scale for
/// drivers of moderate size.
double class_L_horizon(const LevyTriplet& t, const QuadratureConfig& cfg = {});

struct ECFReport {
    std::vector<Vec> yGrid;
    std::vector<std::complex<double>> empiricalCF;
    std::vector<double> stderrs;
    std::vector<std::complex<double>> theoreticalCF;
    std::vector<double> zScores;
    std::size_t N = 0;

    double max_abs_z() const;
    /// Fraction of grid points with |z| < threshold.
    double pass_fraction(double threshold = 4.0) const;
};

/// Requires N >= 1000; z = |ecf - exp(Phi)| / sqrt((1 - |ecf|^2) / N).
ECFReport ecf_compare(const std::vector<Vec>& samples, const Exponent& target, const std::vector<Vec>& yGrid);

std::string samples_csv(const std::vector<Vec>& samples);
std::string ecf_csv(const ECFReport& r);

/// Componentwise sum of two sample sets.
std::vector<Vec> add_samples(const std::vector<Vec>& a, const std::vector<Vec>& b);

}  // namespace levycalc
