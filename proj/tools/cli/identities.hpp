#pragma once

// Operator identities checked numerically on compound-Poisson triplets:
//
//   J I = I J = I - J,   (I - J)(I + I) = id,   (I - J) Phi + I (I - J) Phi = Phi,
//   logMoment(I M) = log2Moment(M) / 2,
//   logMoment(J M) = logMoment(M) - int_{|x|>1} (1 - 1/|x|) M(dx),
//   exponent of the J-image triplet = J applied to the exponent.

#include <cstdint>
#include <string>
#include <vector>

#include <levycalc/operators.hpp>
#include <levycalc/rng.hpp>

namespace levycalc::cli {

struct IdentityResiduals {
    double commutation = 0.0;         // max |J I Phi - I J Phi|
    double jiRewrite = 0.0;           // max |J I Phi - (I - J) Phi|
    double inverse = 0.0;             // max |(I - J)(I + I) Phi - Phi|
    double splitting = 0.0;           // max |(I - J) Phi + I (I - J) Phi - Phi|
    double logMomentI = 0.0;          // relative
    double logMomentJ = 0.0;          // relative
    double measureConsistency = 0.0;  // max |exponent of J M triplet - J Phi|
};

struct IdentityTolerances {
    double exponent = 1e-8;
    double moment = 1e-9;
    double measure = 1e-7;
};

bool passes(const IdentityResiduals& r, const IdentityTolerances& tol = {});

/// Gauss-Legendre panels of 8 nodes at relative tolerance 1e-10.
QuadratureConfig identity_quadrature();

/// 1 to 4 atoms with norms in [e^{-1.5}, e^{1.5}], masses in [0.1, 2],
/// uniform directions, shift in [-1, 1]^d, zero covariance; d is 1 or 2.
LevyTriplet random_compound_poisson(RandomStream& rng);

/// `points` log-spaced radii in [lo, hi] along a random unit direction.
std::vector<Vec> identity_grid(RandomStream& rng, int dim, std::size_t points = 50, double lo = 1e-2, double hi = 10.0);

/// relative residuals of the two log-moment identities.
std::pair<double, double> log_moment_residuals(const LevyMeasure& m, const QuadratureConfig& cfg = {});

/// `perturb` replaces J by (1 + perturb) J throughout.
IdentityResiduals check_identities(const LevyTriplet& t, const std::vector<Vec>& grid, double perturb = 0.0,
                                   const QuadratureConfig& cfg = identity_quadrature());

struct FuzzRow {
    std::size_t index = 0;
    int dim = 1;
    std::size_t atoms = 0;
    IdentityResiduals residuals;
    bool pass = false;
};

/// Triplet i is drawn from RandomStream(seed, i).
std::vector<FuzzRow> fuzz_identities(std::size_t n, std::uint64_t seed, double perturb = 0.0);
std::string fuzz_csv(const std::vector<FuzzRow>& rows);

}  // namespace levycalc::cli
