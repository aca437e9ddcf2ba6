#include "levycalc/operators.hpp"

#include <cmath>

namespace levycalc {

Exponent apply_J_exponent(const Exponent& phi, const QuadratureConfig& cfg) { return Exponent::apply_j(phi, cfg); }

Exponent apply_I_exponent(const Exponent& phi, const QuadratureConfig& cfg) { return Exponent::apply_i(phi, cfg); }

Exponent scale_exponent(const Exponent& phi, double lambda) { return Exponent::scale(phi, lambda); }

Exponent dilate_exponent(const Exponent& phi, double c) { return Exponent::dilate(phi, c); }

Exponent apply_operator(const OperatorExpr& e, const Exponent& phi, const QuadratureConfig& cfg) {
    using K = OperatorExpr::Kind;
    switch (e.kind()) {
        case K::Identity:
            return phi;
        case K::J:
            return apply_J_exponent(phi, cfg);
        case K::I:
            return apply_I_exponent(phi, cfg);
        case K::Scale:
            return scale_exponent(phi, e.value());
        case K::Dilate:
            return dilate_exponent(phi, e.value());
        case K::Sum: {
            std::vector<std::pair<double, Exponent>> terms;
            for (const auto& c : e.children()) terms.emplace_back(1.0, apply_operator(c, phi, cfg));
            return Exponent::linear(std::move(terms));
        }
        case K::Sub:
            return Exponent::linear({{1.0, apply_operator(e.children()[0], phi, cfg)},
                                     {-1.0, apply_operator(e.children()[1], phi, cfg)}});
        case K::Compose: {
            Exponent out = phi;
            const auto& f = e.children();
            for (auto it = f.rbegin(); it != f.rend(); ++it) out = apply_operator(*it, out, cfg);
            return out;
        }
    }
    return phi;
}

// ---------------------------------------------------------------------------

namespace {

struct StableSplit {
    std::vector<StableFamily> stable;
    LevyMeasure rest;
};

StableSplit split_stable(const LevyMeasure& m) {
    StableSplit out{{}, LevyMeasure(m.dim())};
    for (const auto& a : m.atoms()) out.rest.add_atom(a);
    for (const auto& r : m.rays()) out.rest.add_ray(r);
    for (const auto& f : m.families()) {
        if (const auto* s = std::get_if<StableFamily>(&f)) out.stable.push_back(*s);
        else out.rest.add_family(f);
    }
    return out;
}

StableFamily rescaled(StableFamily s, double factor) {
    for (auto& sp : s.spectral) sp.w *= factor;
    return s;
}

LevyMeasure transform_measure(const LevyMeasure& m, bool isJ, const QuadratureConfig& cfg) {
    LevyMeasure out(m.dim());
    for (const auto& a : m.atoms()) {
        const double n = a.x.norm();
        const auto dens = isJ ? RadialDensity::power(a.mass / n, 0.0, n) : RadialDensity::power(a.mass, -1.0, n);
        out.add_ray({a.x / n, 1.0, dens});
    }
    auto split = split_stable(m);
    for (const auto& s : split.stable) out.add_family(rescaled(s, isJ ? 1.0 / (s.p + 1.0) : 1.0 / s.p));
    for (const auto& r : split.rest.expanded_rays()) {
        out.add_ray({r.u, r.weight, isJ ? apply_j(r.density, cfg) : apply_i(r.density, cfg)});
    }
    return out;
}

}  // namespace

LevyMeasure apply_J_measure(const LevyMeasure& m, const QuadratureConfig& cfg) {
    return transform_measure(m, true, cfg);
}

LevyMeasure apply_I_measure(const LevyMeasure& m, const QuadratureConfig& cfg) {
    if (log_moment_order(m, cfg) < 1) {
        throw DomainViolation("I requires a finite log moment of the Levy measure", 1);
    }
    return transform_measure(m, false, cfg);
}

std::optional<double> negativity_witness(const RadialDensity& d, double tol) {
    if (d.is_zero()) return std::nullopt;
    const auto grid = radial_grid(d.rmax());
    double scale = 0.0, lowest = 0.0, where = 0.0;
    for (double r : grid) {
        const double v = d(r);
        scale = std::max(scale, std::abs(v));
        if (v < lowest) {
            lowest = v;
            where = r;
        }
    }
    if (lowest < -tol * scale) return where;
    return std::nullopt;
}

SignedMeasureResult tilde_measure(const LevyMeasure& m, const QuadratureConfig& cfg) {
    SignedMeasureResult res{LevyMeasure(m.dim()), LevyMeasure(m.dim()), true, std::nullopt};
    auto split = split_stable(m);
    for (const auto& s : split.stable) res.positive.add_family(rescaled(s, s.p / (s.p + 1.0)));

    const auto jm = apply_J_measure(split.rest, cfg);
    for (const auto& a : split.rest.atoms()) res.positive.add_atom(a);

    const auto base = split.rest.merged_rays();
    const auto image = jm.merged_rays();
    std::vector<MergedRay> dirs = base;
    for (const auto& r : image) {
        bool found = false;
        for (const auto& d : dirs) found = found || same_direction(d.u, r.u);
        if (!found) dirs.push_back({r.u, RadialDensity{}, {}});
    }
    for (std::size_t k = 0; k < dirs.size(); ++k) {
        RadialDensity mine, theirs;
        for (const auto& r : base) {
            if (same_direction(r.u, dirs[k].u)) mine = r.density;
        }
        for (const auto& r : image) {
            if (same_direction(r.u, dirs[k].u)) theirs = r.density;
        }
        const auto diff = mine - theirs;
        if (diff.is_zero()) continue;
        if (auto w = negativity_witness(diff)) {
            if (res.nonneg) res.witness = Witness{k, *w};
            res.nonneg = false;
            res.positive.add_ray({dirs[k].u, 1.0, RadialDensity::positive_part(diff, false, cfg)});
            res.negative.add_ray({dirs[k].u, 1.0, RadialDensity::positive_part(diff, true, cfg)});
        } else {
            res.positive.add_ray({dirs[k].u, 1.0, diff});
        }
    }
    return res;
}

namespace {

LevyMeasure invert_measure(const LevyMeasure& m, bool isJ, const QuadratureConfig& cfg) {
    const auto merged = m.merged_rays();
    for (std::size_t k = 0; k < merged.size(); ++k) {
        if (!merged[k].atoms.empty()) {
            throw NotInRange("atoms are not in the range of " + std::string(isJ ? "J" : "I"),
                             Witness{k, merged[k].atoms.front().first});
        }
    }
    LevyMeasure out(m.dim());
    auto split = split_stable(m);
    for (const auto& s : split.stable) out.add_family(rescaled(s, isJ ? s.p + 1.0 : s.p));
    const auto rays = split.rest.merged_rays();
    for (std::size_t k = 0; k < rays.size(); ++k) {
        const auto inv = isJ ? invert_j(rays[k].density, cfg) : invert_i(rays[k].density, cfg);
        if (isJ && !inv.boundaryAtoms.empty()) {
            throw NotInRange("the preimage under J needs an atom at the end of the support",
                             Witness{k, inv.boundaryAtoms.front().first});
        }
        for (auto [r, mass] : inv.boundaryAtoms) {
            if (mass < 0.0) throw NotInRange("the preimage has a negative atom", Witness{k, r});
            out.add_atom({r * rays[k].u, mass});
        }
        if (auto w = negativity_witness(inv.density, 1e-8)) {
            throw NotInRange("the preimage density is negative", Witness{k, *w});
        }
        out.add_ray({rays[k].u, 1.0, inv.density});
    }
    return out;
}

}  // namespace

LevyMeasure invert_J_measure(const LevyMeasure& m, const QuadratureConfig& cfg) {
    return invert_measure(m, true, cfg);
}

LevyMeasure invert_I_measure(const LevyMeasure& m, const QuadratureConfig& cfg) {
    return invert_measure(m, false, cfg);
}

// ---------------------------------------------------------------------------

LevyTriplet apply_J_triplet(const LevyTriplet& t, const QuadratureConfig& cfg) {
    const Vec corr = t.measure().outer_vector_integral([](double r) { return 0.5 / (r * r); }, cfg);
    return LevyTriplet(0.5 * t.shift() + corr, t.cov() / 3.0, apply_J_measure(t.measure(), cfg));
}

LevyTriplet apply_I_triplet(const LevyTriplet& t, const QuadratureConfig& cfg) {
    auto measure = apply_I_measure(t.measure(), cfg);
    const Vec corr = t.measure().outer_vector_integral([](double r) { return 1.0 / r; }, cfg);
    return LevyTriplet(t.shift() + corr, t.cov() / 2.0, std::move(measure));
}

LevyTriplet tilde_triplet(const LevyTriplet& t, const QuadratureConfig& cfg) {
    auto s = tilde_measure(t.measure(), cfg);
    if (!s.nonneg) throw NotSelfdecomposable("M - J M is not a measure", s.witness);
    const Vec corr = t.measure().outer_vector_integral([](double r) { return 0.5 / (r * r); }, cfg);
    return LevyTriplet(0.5 * t.shift() - corr, 2.0 * t.cov() / 3.0, std::move(s.positive));
}

LevyTriplet invert_I_triplet(const LevyTriplet& t, const QuadratureConfig& cfg) {
    auto rho = invert_I_measure(t.measure(), cfg);
    const Vec corr = rho.outer_vector_integral([](double r) { return 1.0 / r; }, cfg);
    return LevyTriplet(t.shift() - corr, 2.0 * t.cov(), std::move(rho));
}

std::optional<LevyTriplet> measure_form(const Exponent& phi, const QuadratureConfig& cfg) {
    if (auto t = phi.triplet()) return t;
    const auto ops = phi.operands();
    switch (phi.op()) {
        case Exponent::Op::J: {
            auto t = measure_form(ops.front().second, cfg);
            if (!t) return std::nullopt;
            return apply_J_triplet(*t, cfg);
        }
        case Exponent::Op::I: {
            auto t = measure_form(ops.front().second, cfg);
            if (!t) return std::nullopt;
            return apply_I_triplet(*t, cfg);
        }
        case Exponent::Op::Scale: {
            auto t = measure_form(ops.front().second, cfg);
            if (!t) return std::nullopt;
            return scaled(*t, phi.parameter());
        }
        case Exponent::Op::Dilate: {
            auto t = measure_form(ops.front().second, cfg);
            if (!t) return std::nullopt;
            return dilated(*t, phi.parameter(), cfg);
        }
        case Exponent::Op::Sum: {
            // X - J X is the tilde transform of X.
            if (ops.size() == 2 && ops[0].first == 1.0 && ops[1].first == -1.0 &&
                ops[1].second.op() == Exponent::Op::J &&
                &ops[1].second.operands().front().second.node() == &ops[0].second.node()) {
                auto t = measure_form(ops[0].second, cfg);
                if (!t) return std::nullopt;
                try {
                    return tilde_triplet(*t, cfg);
                } catch (const NotSelfdecomposable&) {
                    return std::nullopt;
                }
            }
            std::optional<LevyTriplet> acc;
            for (const auto& [c, e] : ops) {
                if (c < 0.0) return std::nullopt;
                auto t = measure_form(e, cfg);
                if (!t) return std::nullopt;
                auto term = scaled(*t, c);
                acc = acc ? *acc + term : term;
            }
            return acc;
        }
        case Exponent::Op::JPower: {
            auto t = measure_form(ops.front().second, cfg);
            if (!t) return std::nullopt;
            for (int k = 0; k < static_cast<int>(phi.parameter()); ++k) *t = apply_J_triplet(*t, cfg);
            return t;
        }
        case Exponent::Op::None:
            break;
    }
    return std::nullopt;
}

}  // namespace levycalc
