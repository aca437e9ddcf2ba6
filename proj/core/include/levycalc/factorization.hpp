#pragma once

// Factorization of selfdecomposable laws into an s-selfdecomposable factor
// and its I image,
//
//   Phi = (I - J) Phi + J Phi,      J Phi = I (I - J) Phi,
//
// and the iterated version Phi = sum_{k=1}^n (I - J) J^{k-1} Phi + J^n Phi.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "levycalc/operators.hpp"

namespace levycalc {

/// 50 log-spaced radii in [1e-2, 1e2] along e_1, and for d > 1 also along
/// (1, ..., 1)/sqrt(d) and (1, -1, 0, ...)/sqrt(2).
std::vector<Vec> verification_grid(int dim, std::size_t points = 50, double lo = 1e-2, double hi = 1e2);

/// max_y |a(y) - b(y)| over the grid, evaluated in parallel.
double max_deviation(const Exponent& a, const Exponent& b, const std::vector<Vec>& grid);

struct VerificationReport {
    /// M - J M is nonnegative on the verification grid.
    bool tildeNonneg = false;
    /// Log moment of the tilde measure and whether it is finite.
    double tildeLogMoment = 0.0;
    bool tildeLogMomentFinite = false;
    /// The tilde measure has nonincreasing ray densities.
    bool tildeInU = false;
    /// max |muTilde + backgroundFactor - Phi|.
    double productReconstructs = 0.0;
    /// max |I(muTilde) - J Phi|.
    double consistency = 0.0;
    /// max |(I - J)(I + I) muTilde - muTilde|.
    double uniquenessResidual = 0.0;
    /// max |closed form - quadrature| for muTilde, when a closed form exists.
    std::optional<double> eagerLazyDeviation;
    /// The I image of muTilde lies in L^f.
    bool backgroundInLf = false;
};

struct FactorizationResult {
    Exponent input;
    Exponent muTilde;
    Exponent backgroundFactor;
    std::optional<LevyTriplet> muTildeTriplet;
    std::optional<LevyTriplet> backgroundTriplet;
    ClassReport inputClass;
    VerificationReport report;
};

struct FactorCheck {
    int index = 0;
    /// The factor measure is nonnegative.
    bool measureNonneg = false;
    /// Number of successful J inversions (k - 1 expected).
    int inversions = 0;
    /// The measure reached after the inversions has nonincreasing ray densities.
    bool landsInU = false;
    std::string note;
};

struct IteratedFactorization {
    Exponent input;
    int n = 0;
    std::vector<Exponent> factors;
    Exponent remainder;
    /// max |sum of factors + remainder - Phi|.
    double telescopingResidual = 0.0;
    /// max |J^k kernel quadrature - nested J quadrature| for k <= 3 (nullopt if not computed).
    std::optional<double> kernelDeviation;
    std::vector<FactorCheck> checks;
};

struct BackgroundDriving {
    Exponent rho;
    LevyTriplet triplet;
    /// max |I(rho) - Phi| on the grid.
    double residual = 0.0;
};

struct FactorizeOptions {
    QuadratureConfig cfg{};
    std::vector<Vec> grid;  // empty: verification_grid(dim)
};

/// Throws NotSelfdecomposable (with witness) if the measure is not in L,
/// UnsupportedRepresentation if no triplet form is available.
FactorizationResult factorize_selfdec(const Exponent& phi, const FactorizeOptions& opt = {});
IteratedFactorization iterate_factorize(const Exponent& phi, int n, const FactorizeOptions& opt = {});
BackgroundDriving background_driving(const Exponent& phi, const FactorizeOptions& opt = {});
bool check_Lf(const Exponent& phi, const QuadratureConfig& cfg = {});

nlohmann::json to_json(const ClassReport& c);
nlohmann::json to_json(const FactorizationResult& r);
nlohmann::json to_json(const IteratedFactorization& r);
/// Columns y, then re/im per factor; one row per grid point.
std::string factors_csv(const std::vector<std::pair<std::string, Exponent>>& columns, const std::vector<Vec>& grid);

}  // namespace levycalc
