// Acceptance checks, one line per criterion:
//   levycalc_acceptance        run all
//   levycalc_acceptance k      run criterion k only

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <levycalc/factorization.hpp>
#include <levycalc/simulation.hpp>

#include "cli/identities.hpp"

using namespace levycalc;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double timeLimit;  // seconds
    std::function<Outcome()> run;
};

Vec e1() { return Vec::Constant(1, 1.0); }

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(3);
    s << x;
    return s.str();
}

std::vector<Vec> ecf_grid() {
    std::vector<Vec> g;
    for (int k = 1; k <= 20; ++k) g.push_back(0.25 * k * e1());
    return g;
}

Outcome stable_factorization() {
    constexpr double tol = 1e-8;
    double worst = 0.0;
    for (double p : {0.5, 1.0, 1.5}) {
        const auto phi = Exponent::from_triplet(LevyTriplet::pure_jump(LevyMeasure::stable(p, {{e1(), 1.0}})));
        const auto tilde = Exponent::linear({{1.0, phi}, {-1.0, Exponent::apply_j(phi)}});
        worst = std::max(worst, max_deviation(tilde, Exponent::scale(phi, p / (p + 1)), verification_grid(1)));
    }
    return {worst < tol, "max|(I-J)Phi_p - p/(p+1) Phi_p|=" + fmt(worst) + " tol=" + fmt(tol)};
}

Outcome laplace_factorization() {
    constexpr double tol = 1e-8;
    const auto phi = Exponent::laplace(e1());
    const auto jphi = Exponent::apply_j(phi);
    const auto tilde = Exponent::linear({{1.0, phi}, {-1.0, jphi}});
    const auto sum = Exponent::linear({{1.0, tilde}, {1.0, jphi}});
    double devTilde = 0.0, devSum = 0.0;
    for (const auto& y : verification_grid(1)) {
        const double t = y[0];
        devTilde = std::max(devTilde, std::abs(tilde(y) - 2.0 * (std::atan(t) - t) / t));
        devSum = std::max(devSum, std::abs(sum(y) + std::log1p(t * t)));
    }
    return {devTilde < tol && devSum < tol, "max|(I-J)Phi - 2(atan t - t)/t|=" + fmt(devTilde) +
                                                " max|(I-J)Phi + J Phi + log(1+t^2)|=" + fmt(devSum) +
                                                " tol=" + fmt(tol)};
}

Outcome operator_algebra() {
    constexpr double tol = 1e-8;
    const auto rows = cli::fuzz_identities(100, 7);
    double comm = 0.0, ji = 0.0, inv = 0.0;
    for (const auto& r : rows) {
        comm = std::max(comm, r.residuals.commutation);
        ji = std::max(ji, r.residuals.jiRewrite);
        inv = std::max(inv, r.residuals.inverse);
    }
    return {comm < tol && ji < tol && inv < tol, "triplets=100 max|JI-IJ|=" + fmt(comm) + " max|JI-(I-J)|=" +
                                                     fmt(ji) + " max|(I-J)(I+I)-id|=" + fmt(inv) +
                                                     " tol=" + fmt(tol)};
}

Outcome log_moment_identities() {
    constexpr double tol = 1e-9;
    double worstI = 0.0, worstJ = 0.0;
    for (std::uint64_t k = 0; k < 50; ++k) {
        RandomStream rng(404, k);
        const auto m = cli::random_compound_poisson(rng).measure();
        const auto [ri, rj] = cli::log_moment_residuals(m);
        worstI = std::max(worstI, ri);
        worstJ = std::max(worstJ, rj);
    }
    return {worstI < tol && worstJ < tol,
            "measures=50 rel(I)=" + fmt(worstI) + " rel(J)=" + fmt(worstJ) + " tol=" + fmt(tol)};
}

Outcome gamma_theorem() {
    constexpr double tol = 1e-8;
    const auto res = factorize_selfdec(Exponent::gamma(1.0, 1.0, e1()));
    const auto& r = res.report;
    const bool ok = r.tildeNonneg && r.tildeLogMomentFinite && r.tildeInU && r.consistency < tol;
    return {ok, std::string("tildeNonneg=") + (r.tildeNonneg ? "1" : "0") +
                    " tildeLogMoment=" + fmt(r.tildeLogMoment) + " tildeInU=" + (r.tildeInU ? "1" : "0") +
                    " max|I(muTilde) - J Phi|=" + fmt(r.consistency) + " tol=" + fmt(tol)};
}

Outcome telescoping() {
    constexpr double tol = 1e-8;
    double worst = 0.0;
    bool chain = true;
    for (const auto& phi : {Exponent::laplace(e1()), Exponent::gamma(1.0, 1.0, e1())}) {
        for (int n : {2, 3}) {
            const auto it = iterate_factorize(phi, n);
            worst = std::max(worst, it.telescopingResidual);
            for (const auto& c : it.checks) {
                chain = chain && c.measureNonneg && c.inversions == c.index - 1 && c.landsInU;
            }
        }
    }
    return {worst < tol && chain, "max|sum factors + J^n Phi - Phi|=" + fmt(worst) +
                                      " factors in U after k-1 inversions=" + (chain ? "1" : "0") +
                                      " tol=" + fmt(tol)};
}

constexpr std::size_t kMonteCarloN = 100000;
constexpr double kZ = 4.0;
constexpr double kFraction = 0.95;

Outcome monte_carlo() {
    const auto laplace = Exponent::laplace(e1());
    LevyProcessSpec lap;
    lap.triplet = *laplace.triplet();
    const auto u = sample_class_U(lap, 2024, kMonteCarloN);
    const auto repU = ecf_compare(u, Exponent::apply_j(laplace), ecf_grid());

    const auto gamma = Exponent::gamma(1.0, 1.0, e1());
    LevyProcessSpec gam;
    gam.triplet = *gamma.triplet();
    const auto l = sample_class_L(gam, 2025, kMonteCarloN);
    const auto repL = ecf_compare(l, Exponent::apply_i(gamma), ecf_grid());

    const double fu = repU.pass_fraction(kZ), fl = repL.pass_fraction(kZ);
    return {fu >= kFraction && fl >= kFraction,
            "N=100000 U/laplace pass=" + fmt(fu) + " max|z|=" + fmt(repU.max_abs_z()) + " L/gamma pass=" + fmt(fl) +
                " max|z|=" + fmt(repL.max_abs_z()) + " need pass>=" + fmt(kFraction) + " at |z|<" + fmt(kZ)};
}

Outcome factorization_in_distribution() {
    const auto phi = Exponent::gamma(1.0, 1.0, e1());
    const auto res = factorize_selfdec(phi);
    if (!res.muTildeTriplet || !res.backgroundTriplet) return {false, "factor triplets unavailable"};
    LevyProcessSpec tilde, background;
    tilde.triplet = *res.muTildeTriplet;
    background.triplet = *res.backgroundTriplet;
    const auto sum = add_samples(sample_law(tilde, 77, kMonteCarloN), sample_law(background, 78, kMonteCarloN));
    const auto rep = ecf_compare(sum, phi, ecf_grid());
    const double f = rep.pass_fraction(kZ);
    return {f >= kFraction, "N=100000 pass=" + fmt(f) + " max|z|=" + fmt(rep.max_abs_z()) +
                                " need pass>=" + fmt(kFraction) + " at |z|<" + fmt(kZ)};
}

std::vector<std::pair<std::string, LevyMeasure>> law_corpus() {
    const Vec u = e1();
    Vec d2(2);
    d2 << 0.6, 0.8;
    std::vector<std::pair<std::string, LevyMeasure>> c;
    for (double p : {0.5, 1.0, 1.5}) c.emplace_back("stable(" + fmt(p) + ")", LevyMeasure::stable(p, {{u, 1.0}}));
    c.emplace_back("laplace", LevyMeasure::laplace(u));
    c.emplace_back("gamma(1,1)", LevyMeasure::gamma(1.0, 1.0, u));
    c.emplace_back("gamma(2,3)", LevyMeasure::gamma(2.0, 3.0, u));
    c.emplace_back("gamma(0.5,1) in R^2", LevyMeasure::gamma(0.5, 1.0, d2));
    c.emplace_back("zero", LevyMeasure(1));
    c.emplace_back("atom", LevyMeasure::discrete(1, {{Vec::Constant(1, 1.0), 1.0}}));
    c.emplace_back("two atoms", LevyMeasure::discrete(1, {{Vec::Constant(1, 0.3), 2.0}, {Vec::Constant(1, -4.0), 1.0}}));
    c.emplace_back("uniform(0,2]", LevyMeasure::radial(1, {{u, 1.0, RadialDensity::power(0.5, 0.0, 2.0)}}));
    c.emplace_back("r e^-r", LevyMeasure::radial(1, {{u, 1.0, RadialDensity::gamma_kernel(1.0, 1.0, 1.0)}}));
    c.emplace_back("e^-r", LevyMeasure::radial(1, {{u, 1.0, RadialDensity::gamma_kernel(1.0, 0.0, 1.0)}}));
    c.emplace_back("r^-1.5 on (0,1]", LevyMeasure::radial(1, {{u, 1.0, RadialDensity::power(1.0, -1.5, 1.0)}}));
    const auto g = LevyMeasure::gamma(1.0, 1.0, u);
    c.emplace_back("J gamma", apply_J_measure(g));
    c.emplace_back("J J gamma", apply_J_measure(apply_J_measure(g)));
    c.emplace_back("I gamma", apply_I_measure(g));
    c.emplace_back("tilde gamma", tilde_measure(g).positive);
    c.emplace_back("J laplace", apply_J_measure(LevyMeasure::laplace(u)));
    c.emplace_back("I atom", apply_I_measure(LevyMeasure::discrete(1, {{Vec::Constant(1, 2.0), 1.0}})));
    c.emplace_back("J atom", apply_J_measure(LevyMeasure::discrete(1, {{Vec::Constant(1, 2.0), 1.0}})));
    c.emplace_back("I J atom", apply_I_measure(apply_J_measure(LevyMeasure::discrete(1, {{Vec::Constant(1, 2.0), 1.0}}))));
    return c;
}

Outcome class_chain() {
    int violations = 0, lf = 0, l = 0, uu = 0;
    std::string which;
    const auto corpus = law_corpus();
    for (const auto& [name, m] : corpus) {
        const auto cls = classify_measure(m);
        lf += cls.in_Lf;
        l += cls.in_L;
        uu += cls.in_U;
        if ((cls.in_Lf && !cls.in_L) || (cls.in_L && !cls.in_U)) {
            ++violations;
            which += " " + name;
        }
    }
    return {violations == 0, "laws=" + std::to_string(corpus.size()) + " in_Lf=" + std::to_string(lf) +
                                 " in_L=" + std::to_string(l) + " in_U=" + std::to_string(uu) +
                                 " violations=" + std::to_string(violations) + which};
}

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all{
        {1, "stable-factorization", 1.0, stable_factorization},
        {2, "laplace-factorization", 1.0, laplace_factorization},
        {3, "operator-algebra", 30.0, operator_algebra},
        {4, "log-moment-identities", 5.0, log_moment_identities},
        {5, "gamma-factorization", 5.0, gamma_theorem},
        {6, "iterated-telescoping", 10.0, telescoping},
        {7, "monte-carlo-consistency", 120.0, monte_carlo},
        {8, "factorization-in-distribution", 120.0, factorization_in_distribution},
        {9, "class-chain", 60.0, class_chain},
    };
    return all;
}

bool run_one(const Criterion& c) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = c.run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool inTime = secs < c.timeLimit;
    const bool pass = o.pass && inTime;
    std::cout << (pass ? "PASS" : "FAIL") << " [" << c.id << "] " << c.name << ": " << o.detail
              << " runtime=" << fmt(secs) << "s limit=" << fmt(c.timeLimit) << "s" << (inTime ? "" : " (too slow)")
              << std::endl;
    return pass;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> ids;
    for (int i = 1; i < argc; ++i) ids.push_back(std::atoi(argv[i]));
    bool ok = true;
    for (const auto& c : criteria()) {
        if (ids.empty() || std::find(ids.begin(), ids.end(), c.id) != ids.end()) ok = run_one(c) && ok;
    }
    return ok ? 0 : 1;
}
