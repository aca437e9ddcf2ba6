#include "levycalc/factorization.hpp"

#include <cmath>

#include "levycalc/parallel.hpp"

namespace levycalc {

using json = nlohmann::json;

std::vector<Vec> verification_grid(int dim, std::size_t points, double lo, double hi) {
    std::vector<Vec> dirs;
    Vec e1 = Vec::Zero(dim);
    e1[0] = 1.0;
    dirs.push_back(e1);
    if (dim > 1) {
        dirs.push_back(Vec::Ones(dim) / std::sqrt(static_cast<double>(dim)));
        Vec alt = Vec::Zero(dim);
        alt[0] = 1.0 / std::sqrt(2.0);
        alt[1] = -1.0 / std::sqrt(2.0);
        dirs.push_back(alt);
    }
    std::vector<Vec> grid;
    for (const auto& u : dirs) {
        for (std::size_t i = 0; i < points; ++i) {
            const double t = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
            grid.push_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) * u);
        }
    }
    return grid;
}

double max_deviation(const Exponent& a, const Exponent& b, const std::vector<Vec>& grid) {
    std::vector<double> dev(grid.size(), 0.0);
    parallel_for(grid.size(), [&](std::size_t i) { dev[i] = std::abs(a(grid[i]) - b(grid[i])); });
    double m = 0.0;
    for (double d : dev) m = std::max(m, d);
    return m;
}

namespace {

struct Selfdec {
    LevyTriplet triplet;
    ClassReport cls;
};

Selfdec require_selfdecomposable(const Exponent& phi, const QuadratureConfig& cfg) {
    auto t = measure_form(phi, cfg);
    if (!t) throw UnsupportedRepresentation("no triplet form is available for " + phi.describe());
    auto cls = classify_measure(t->measure(), cfg);
    if (!cls.in_L) {
        std::string where;
        if (cls.witnessL) {
            where = ": r l(r) increases on ray " + std::to_string(cls.witnessL->ray) + " at r = " +
                    format_double(cls.witnessL->r);
        }
        throw NotSelfdecomposable("the Levy measure is not selfdecomposable" + where, cls.witnessL);
    }
    return {std::move(*t), cls};
}

const std::vector<Vec>& grid_or_default(const FactorizeOptions& opt, int dim, std::vector<Vec>& storage) {
    if (!opt.grid.empty()) return opt.grid;
    storage = verification_grid(dim);
    return storage;
}

}  // namespace

FactorizationResult factorize_selfdec(const Exponent& phi, const FactorizeOptions& opt) {
    const auto& cfg = opt.cfg;
    auto sd = require_selfdecomposable(phi, cfg);
    std::vector<Vec> storage;
    const auto& grid = grid_or_default(opt, phi.dim(), storage);

    const Exponent jphi = Exponent::apply_j(phi, cfg);
    const Exponent lazy = Exponent::linear({{1.0, phi}, {-1.0, jphi}});
    const auto eager = phi.closed_image(Exponent::Image::Tilde);
    const Exponent muTilde = eager ? *eager : lazy;
    const Exponent background = Exponent::apply_i(muTilde, cfg);

    FactorizationResult res{phi, muTilde, background, std::nullopt, std::nullopt, sd.cls, {}};
    auto& rep = res.report;

    const auto tm = tilde_measure(sd.triplet.measure(), cfg);
    rep.tildeNonneg = tm.nonneg;
    if (tm.nonneg) {
        const auto mom = log_moments(tm.positive, cfg);
        rep.tildeLogMoment = mom.logMoment;
        rep.tildeLogMomentFinite = mom.inLogDomain;
        rep.tildeInU = classify_measure(tm.positive, cfg).in_U;
        res.muTildeTriplet = tilde_triplet(sd.triplet, cfg);
    } else {
        rep.tildeLogMoment = kInfinity;
    }
    res.backgroundTriplet = apply_J_triplet(sd.triplet, cfg);
    rep.backgroundInLf = classify_measure(res.backgroundTriplet->measure(), cfg).in_Lf;

    rep.productReconstructs = max_deviation(Exponent::linear({{1.0, muTilde}, {1.0, background}}), phi, grid);
    rep.consistency = max_deviation(background, jphi, grid);
    const auto uniq = apply_operator(OperatorExpr::parse("(compose (sub id J) (add id I))"), muTilde, cfg);
    rep.uniquenessResidual = max_deviation(uniq, muTilde, grid);
    if (eager) rep.eagerLazyDeviation = max_deviation(*eager, lazy, grid);
    return res;
}

IteratedFactorization iterate_factorize(const Exponent& phi, int n, const FactorizeOptions& opt) {
    if (n < 1 || n > 8) throw InvalidArgument("iteration depth must lie in [1, 8]");
    const auto& cfg = opt.cfg;
    auto sd = require_selfdecomposable(phi, cfg);
    std::vector<Vec> storage;
    const auto& grid = grid_or_default(opt, phi.dim(), storage);

    // powers[k] = J^k Phi: closed forms while available, else one kernel quadrature.
    std::vector<Exponent> powers{phi};
    bool closed = true;
    for (int k = 1; k <= n; ++k) {
        std::optional<Exponent> next;
        if (closed) next = powers.back().closed_image(Exponent::Image::J);
        if (!next) {
            closed = false;
            next = k == 1 ? Exponent::apply_j(phi, cfg) : Exponent::apply_j_power(phi, k, cfg);
        }
        powers.push_back(*next);
    }

    IteratedFactorization out{phi, n, {}, powers[n], 0.0, std::nullopt, {}};
    std::vector<std::pair<double, Exponent>> total;
    for (int k = 1; k <= n; ++k) {
        auto f = powers[k - 1].closed_image(Exponent::Image::Tilde);
        out.factors.push_back(f ? *f : Exponent::linear({{1.0, powers[k - 1]}, {-1.0, powers[k]}}));
        total.emplace_back(1.0, out.factors.back());
    }
    total.emplace_back(1.0, out.remainder);
    out.telescopingResidual = max_deviation(Exponent::linear(total), phi, grid);

    if (n >= 2) {
        double dev = 0.0;
        Exponent nested = phi;
        for (int k = 1; k <= std::min(n, 3); ++k) {
            nested = Exponent::apply_j(nested, cfg);
            dev = std::max(dev, max_deviation(nested, powers[k], grid));
        }
        out.kernelDeviation = dev;
    }

    LevyMeasure current = sd.triplet.measure();
    for (int k = 1; k <= n; ++k) {
        FactorCheck chk;
        chk.index = k;
        const auto tm = tilde_measure(current, cfg);
        chk.measureNonneg = tm.nonneg;
        if (tm.nonneg) {
            LevyMeasure g = tm.positive;
            try {
                for (int r = 0; r < k - 1; ++r) {
                    g = invert_J_measure(g, cfg);
                    ++chk.inversions;
                }
                chk.landsInU = classify_measure(g, cfg).in_U;
            } catch (const LevyError& e) {
                chk.note = e.what();
            }
        } else {
            chk.note = "factor measure is signed";
        }
        out.checks.push_back(chk);
        if (k < n) current = apply_J_measure(current, cfg);
    }
    return out;
}

BackgroundDriving background_driving(const Exponent& phi, const FactorizeOptions& opt) {
    const auto& cfg = opt.cfg;
    auto sd = require_selfdecomposable(phi, cfg);
    std::vector<Vec> storage;
    const auto& grid = grid_or_default(opt, phi.dim(), storage);
    auto rt = invert_I_triplet(sd.triplet, cfg);
    auto rho = Exponent::from_triplet(rt, cfg);
    const double residual = max_deviation(Exponent::apply_i(rho, cfg), phi, grid);
    return {rho, std::move(rt), residual};
}

bool check_Lf(const Exponent& phi, const QuadratureConfig& cfg) {
    return require_selfdecomposable(phi, cfg).cls.in_Lf;
}

// ---------------------------------------------------------------------------

namespace {

json number(double x) {
    if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
    if (std::isnan(x)) return json(nullptr);
    return json(x);
}

json witness_json(const std::optional<Witness>& w) {
    if (!w) return nullptr;
    return {{"ray", w->ray}, {"r", w->r}};
}

}  // namespace

json to_json(const ClassReport& c) {
    return {{"in_L", c.in_L},
            {"in_U", c.in_U},
            {"in_Lf", c.in_Lf},
            {"grid_test_pass", c.grid_test_pass},
            {"witness_L", witness_json(c.witnessL)},
            {"witness_U", witness_json(c.witnessU)},
            {"witness_grid", witness_json(c.witnessGrid)}};
}

json to_json(const FactorizationResult& r) {
    const auto& v = r.report;
    json j;
    j["input"] = r.input.describe();
    j["class"] = to_json(r.inputClass);
    j["factors"] = json::array({{{"name", "muTilde"}, {"exponent", r.muTilde.describe()}},
                                {{"name", "backgroundFactor"}, {"exponent", r.backgroundFactor.describe()}}});
    j["flags"] = {{"tildeNonneg", v.tildeNonneg},
                  {"tildeLogMomentFinite", v.tildeLogMomentFinite},
                  {"tildeInU", v.tildeInU},
                  {"backgroundInLf", v.backgroundInLf}};
    j["tildeLogMoment"] = number(v.tildeLogMoment);
    j["residuals"] = {{"productReconstructs", v.productReconstructs},
                      {"consistency", v.consistency},
                      {"uniquenessResidual", v.uniquenessResidual},
                      {"eagerLazyDeviation", v.eagerLazyDeviation ? json(*v.eagerLazyDeviation) : json(nullptr)}};
    return j;
}

json to_json(const IteratedFactorization& r) {
    json j;
    j["input"] = r.input.describe();
    j["n"] = r.n;
    j["factors"] = json::array();
    for (std::size_t k = 0; k < r.factors.size(); ++k) {
        const auto& c = r.checks[k];
        j["factors"].push_back({{"index", k + 1},
                                {"exponent", r.factors[k].describe()},
                                {"measureNonneg", c.measureNonneg},
                                {"inversions", c.inversions},
                                {"landsInU", c.landsInU},
                                {"note", c.note}});
    }
    j["remainder"] = r.remainder.describe();
    j["residuals"] = {{"telescoping", r.telescopingResidual},
                      {"kernelDeviation", r.kernelDeviation ? json(*r.kernelDeviation) : json(nullptr)}};
    return j;
}

std::string factors_csv(const std::vector<std::pair<std::string, Exponent>>& columns, const std::vector<Vec>& grid) {
    std::string out;
    const int d = grid.empty() ? 1 : static_cast<int>(grid.front().size());
    if (d == 1) {
        out += "y";
    } else {
        for (int i = 0; i < d; ++i) out += (i ? ",y" : "y") + std::to_string(i + 1);
    }
    for (const auto& [name, e] : columns) out += "," + name + "_re," + name + "_im";
    out += "\n";
    std::vector<std::vector<std::complex<double>>> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        for (const auto& col : columns) values[i].push_back(col.second(grid[i]));
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
        for (int k = 0; k < d; ++k) out += (k ? "," : "") + format_double(grid[i][k]);
        for (const auto& v : values[i]) out += "," + format_double(v.real()) + "," + format_double(v.imag());
        out += "\n";
    }
    return out;
}

}  // namespace levycalc
