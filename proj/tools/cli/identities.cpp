#include "cli/identities.hpp"

#include <cmath>

namespace levycalc::cli {

bool passes(const IdentityResiduals& r, const IdentityTolerances& tol) {
    return r.commutation < tol.exponent && r.jiRewrite < tol.exponent && r.inverse < tol.exponent &&
           r.splitting < tol.exponent && r.logMomentI < tol.moment && r.logMomentJ < tol.moment &&
           r.measureConsistency < tol.measure;
}

QuadratureConfig identity_quadrature() {
    QuadratureConfig cfg;
    cfg.nodes = 8;
    cfg.relTol = 1e-10;
    return cfg;
}

namespace {

Vec random_unit(RandomStream& rng, int dim) {
    Vec u(dim);
    do {
        for (int k = 0; k < dim; ++k) u[k] = rng.normal();
    } while (u.norm() < 1e-3);
    return u / u.norm();
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

LevyTriplet random_compound_poisson(RandomStream& rng) {
    const int dim = rng.uniform() < 0.3 ? 2 : 1;
    const int atoms = 1 + static_cast<int>(rng.uniform() * 4.0);
    LevyMeasure m(dim);
    for (int k = 0; k < atoms; ++k) {
        const double norm = std::exp(-1.5 + 3.0 * rng.uniform());
        const double mass = 0.1 + 1.9 * rng.uniform();
        m.add_atom({norm * random_unit(rng, dim), mass});
    }
    Vec shift(dim);
    for (int k = 0; k < dim; ++k) shift[k] = 2.0 * rng.uniform() - 1.0;
    return LevyTriplet(shift, Mat::Zero(dim, dim), std::move(m));
}

std::vector<Vec> identity_grid(RandomStream& rng, int dim, std::size_t points, double lo, double hi) {
    const Vec u = random_unit(rng, dim);
    std::vector<Vec> grid;
    for (std::size_t i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
        grid.push_back(std::exp(std::log(lo) + t * std::log(hi / lo)) * u);
    }
    return grid;
}

std::pair<double, double> log_moment_residuals(const LevyMeasure& m, const QuadratureConfig& cfg) {
    const auto base = log_moments(m, cfg);
    const auto im = log_moments(apply_I_measure(m, cfg), cfg);
    const auto jm = log_moments(apply_J_measure(m, cfg), cfg);
    const double loss = m.outer_integral([](double r) { return 1.0 - 1.0 / r; }, cfg);
    return {rel(im.logMoment, 0.5 * base.log2Moment), rel(jm.logMoment, base.logMoment - loss)};
}

IdentityResiduals check_identities(const LevyTriplet& t, const std::vector<Vec>& grid, double perturb,
                                   const QuadratureConfig& cfg) {
    const auto J = [&](const Exponent& e) {
        auto je = Exponent::apply_j(e, cfg);
        return perturb == 0.0 ? je : Exponent::scale(je, 1.0 + perturb);
    };
    const auto I = [&](const Exponent& e) { return Exponent::apply_i(e, cfg); };
    const auto lin = [](std::vector<std::pair<double, Exponent>> terms) { return Exponent::linear(std::move(terms)); };

    const Exponent phi = Exponent::from_triplet(t, cfg);
    const Exponent iphi = I(phi), jphi = J(phi);
    const Exponent ji = J(iphi), ij = I(jphi);
    const Exponent tilde = lin({{1.0, phi}, {-1.0, jphi}});
    const Exponent inverse = [&] {
        const Exponent inner = lin({{1.0, phi}, {1.0, iphi}});
        return lin({{1.0, inner}, {-1.0, J(inner)}});
    }();
    const Exponent split = lin({{1.0, tilde}, {1.0, I(tilde)}});
    const Exponent fromMeasure = Exponent::from_triplet(apply_J_triplet(t, cfg), cfg);

    IdentityResiduals r;
    for (const auto& y : grid) {
        const auto p = phi(y), a = ji(y), jv = jphi(y), iv = iphi(y);
        r.commutation = std::max(r.commutation, std::abs(a - ij(y)));
        r.jiRewrite = std::max(r.jiRewrite, std::abs(a - (iv - jv)));
        r.inverse = std::max(r.inverse, std::abs(inverse(y) - p));
        r.splitting = std::max(r.splitting, std::abs(split(y) - p));
        r.measureConsistency = std::max(r.measureConsistency, std::abs(fromMeasure(y) - jv));
    }
    std::tie(r.logMomentI, r.logMomentJ) = log_moment_residuals(t.measure());
    return r;
}

std::vector<FuzzRow> fuzz_identities(std::size_t n, std::uint64_t seed, double perturb) {
    std::vector<FuzzRow> rows;
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream rng(seed, i);
        const auto t = random_compound_poisson(rng);
        const auto grid = identity_grid(rng, t.dim());
        FuzzRow row{i, t.dim(), t.measure().atoms().size(), check_identities(t, grid, perturb), false};
        row.pass = passes(row.residuals);
        rows.push_back(row);
    }
    return rows;
}

std::string fuzz_csv(const std::vector<FuzzRow>& rows) {
    std::string out =
        "index,dim,atoms,commutation,ji_rewrite,inverse,splitting,log_moment_I,log_moment_J,measure_consistency,pass\n";
    for (const auto& row : rows) {
        const auto& r = row.residuals;
        out += std::to_string(row.index) + "," + std::to_string(row.dim) + "," + std::to_string(row.atoms);
        for (double v : {r.commutation, r.jiRewrite, r.inverse, r.splitting, r.logMomentI, r.logMomentJ,
                         r.measureConsistency}) {
            out += "," + format_double(v);
        }
        out += row.pass ? ",PASS\n" : ",FAIL\n";
    }
    return out;
}

}  // namespace levycalc::cli
