#include "levycalc/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levycalc/special.hpp"

namespace levycalc {

Vec unit(const Vec& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("direction must be a nonzero finite vector");
    if (std::abs(n - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return v;
    return v / n;
}

bool same_direction(const Vec& a, const Vec& b) {
    return a.size() == b.size() && (a - b).norm() <= 1e-12;
}

LevyMeasure::LevyMeasure(int dim) : dim_(dim) {
    if (dim < 1) throw InvalidArgument("dimension must be at least 1");
}

LevyMeasure LevyMeasure::discrete(int dim, std::vector<Atom> atoms) {
    LevyMeasure m(dim);
    for (auto& a : atoms) m.add_atom(std::move(a));
    return m;
}

LevyMeasure LevyMeasure::radial(int dim, std::vector<RadialRay> rays) {
    LevyMeasure m(dim);
    for (auto& r : rays) m.add_ray(std::move(r));
    return m;
}

LevyMeasure LevyMeasure::family(int dim, Family f) {
    LevyMeasure m(dim);
    m.add_family(std::move(f));
    return m;
}

LevyMeasure LevyMeasure::stable(double p, std::vector<SpectralPoint> spectral) {
    if (spectral.empty()) throw InvalidArgument("stable family needs at least one spectral point");
    const int d = static_cast<int>(spectral.front().u.size());
    return family(d, StableFamily{p, std::move(spectral)});
}

LevyMeasure LevyMeasure::gamma(double shape, double rate, Vec direction) {
    const int d = static_cast<int>(direction.size());
    return family(d, GammaFamily{shape, rate, std::move(direction)});
}

LevyMeasure LevyMeasure::laplace(Vec direction) {
    const int d = static_cast<int>(direction.size());
    return family(d, LaplaceFamily{std::move(direction)});
}

LevyMeasure& LevyMeasure::add_atom(Atom a) {
    if (a.x.size() != dim_) throw InvalidArgument("atom dimension mismatch");
    if (!a.x.allFinite() || a.x.norm() == 0.0) throw InvalidArgument("atoms must be finite and exclude the origin");
    if (!(a.mass >= 0.0) || !std::isfinite(a.mass)) throw InvalidArgument("atom masses must be nonnegative");
    if (a.mass > 0.0) atoms_.push_back(std::move(a));
    return *this;
}

LevyMeasure& LevyMeasure::add_ray(RadialRay r) {
    if (r.u.size() != dim_) throw InvalidArgument("ray dimension mismatch");
    r.u = unit(r.u);
    if (!(r.weight >= 0.0) || !std::isfinite(r.weight)) throw InvalidArgument("ray weights must be nonnegative");
    if (r.weight > 0.0 && !r.density.is_zero()) rays_.push_back(std::move(r));
    return *this;
}

LevyMeasure& LevyMeasure::add_family(Family f) {
    std::visit(
        [&](auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, StableFamily>) {
                if (!(fam.p > 0.0 && fam.p < 2.0)) throw InvalidArgument("stable index p must lie in (0, 2)");
                for (auto& s : fam.spectral) {
                    if (s.u.size() != dim_) throw InvalidArgument("spectral point dimension mismatch");
                    s.u = unit(s.u);
                    if (!(s.w >= 0.0) || !std::isfinite(s.w)) throw InvalidArgument("spectral weights must be nonnegative");
                }
                std::erase_if(fam.spectral, [](const SpectralPoint& s) { return s.w == 0.0; });
                if (fam.spectral.empty()) return;
            } else if constexpr (std::is_same_v<T, GammaFamily>) {
                if (!(fam.shape > 0.0) || !(fam.rate > 0.0) || !std::isfinite(fam.shape) || !std::isfinite(fam.rate)) {
                    throw InvalidArgument("gamma family needs shape > 0 and rate > 0");
                }
                if (fam.direction.size() != dim_) throw InvalidArgument("gamma direction dimension mismatch");
                fam.direction = unit(fam.direction);
            } else {
                if (fam.direction.size() != dim_) throw InvalidArgument("Laplace direction dimension mismatch");
                fam.direction = unit(fam.direction);
            }
            families_.push_back(fam);
        },
        f);
    return *this;
}

LevyMeasure::Representation LevyMeasure::representation() const {
    const int kinds = (!atoms_.empty()) + (!rays_.empty()) + (!families_.empty());
    if (kinds == 0) return Representation::Zero;
    if (kinds > 1) return Representation::Mixed;
    if (!atoms_.empty()) return Representation::Discrete;
    if (!rays_.empty()) return Representation::Radial;
    return Representation::Family;
}

bool LevyMeasure::is_zero() const { return representation() == Representation::Zero; }

std::vector<RadialRay> LevyMeasure::expanded_rays() const {
    std::vector<RadialRay> out = rays_;
    for (const auto& f : families_) {
        std::visit(
            [&](const auto& fam) {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, StableFamily>) {
                    const double K = stable_radial_constant(fam.p);
                    for (const auto& s : fam.spectral) {
                        const auto dens = RadialDensity::power(s.w / (2.0 * K), -1.0 - fam.p);
                        out.push_back({s.u, 1.0, dens});
                        out.push_back({-s.u, 1.0, dens});
                    }
                } else if constexpr (std::is_same_v<T, GammaFamily>) {
                    out.push_back({fam.direction, 1.0, RadialDensity::gamma_kernel(fam.shape, -1.0, fam.rate)});
                } else {
                    const auto dens = RadialDensity::gamma_kernel(1.0, -1.0, 1.0);
                    out.push_back({fam.direction, 1.0, dens});
                    out.push_back({-fam.direction, 1.0, dens});
                }
            },
            f);
    }
    return out;
}

std::vector<MergedRay> LevyMeasure::merged_rays() const {
    std::vector<MergedRay> out;
    auto slot = [&](const Vec& u) -> MergedRay& {
        for (auto& m : out) {
            if (same_direction(m.u, u)) return m;
        }
        out.push_back({u, RadialDensity{}, {}});
        return out.back();
    };
    for (const auto& r : expanded_rays()) {
        auto& m = slot(r.u);
        m.density = RadialDensity::sum({{1.0, m.density}, {r.weight, r.density}});
    }
    for (const auto& a : atoms_) {
        const double n = a.x.norm();
        auto& m = slot(a.x / n);
        m.atoms.emplace_back(n, a.mass);
    }
    return out;
}

void LevyMeasure::validate() const {
    for (const auto& r : rays_) {
        const auto ok = r.density.levy_integrable();
        if (ok && !*ok) throw NonIntegrableMeasure("ray density fails int min(1, r^2) l(r) dr < inf");
        if (!ok) {
            const QuadratureConfig loose{16, 240.0, 1e-8, 1e-15, 4'000'000};
            double inner = 0.0, outer = 0.0;
            try {
                inner = integrate_piecewise([&](double x) { return x * x * std::abs(r.density(x)); }, 0.0,
                                            std::min(1.0, r.density.rmax()), r.density.breakpoints(), loose);
                outer = r.density.rmax() > 1.0 ? integrate_piecewise([&](double x) { return std::abs(r.density(x)); },
                                                                     1.0, r.density.rmax(),
                                                                     r.density.breakpoints(), loose)
                                               : 0.0;
            } catch (const QuadratureFailure&) {
                throw NonIntegrableMeasure("ray density: int min(1, r^2) l(r) dr did not converge");
            }
            if (!std::isfinite(inner + outer)) throw NonIntegrableMeasure("ray density is not Levy-integrable");
        }
    }
}

namespace {

template <class F>
double ray_integral(const RadialDensity& d, double a, double b, const F& g, const QuadratureConfig& cfg) {
    b = std::min(b, d.rmax());
    if (!(b > a)) return 0.0;
    return integrate_piecewise([&](double r) { return g(r) * d(r); }, a, b, d.breakpoints(), cfg);
}

}  // namespace

double LevyMeasure::outer_integral(const std::function<double(double)>& f, const QuadratureConfig& cfg) const {
    double total = 0.0;
    for (const auto& a : atoms_) {
        const double n = a.x.norm();
        if (n > 1.0) total += a.mass * f(n);
    }
    for (const auto& r : expanded_rays()) total += r.weight * ray_integral(r.density, 1.0, kInfinity, f, cfg);
    return total;
}

Vec LevyMeasure::outer_vector_integral(const std::function<double(double)>& g, const QuadratureConfig& cfg) const {
    Vec total = Vec::Zero(dim_);
    for (const auto& a : atoms_) {
        const double n = a.x.norm();
        if (n > 1.0) total += a.mass * g(n) * a.x;
    }
    for (const auto& r : expanded_rays()) {
        total += r.weight * ray_integral(r.density, 1.0, kInfinity, [&](double x) { return g(x) * x; }, cfg) * r.u;
    }
    return total;
}

Vec LevyMeasure::band_vector_integral(double lo, double hi, const std::function<double(double)>& h,
                                      const QuadratureConfig& cfg) const {
    Vec total = Vec::Zero(dim_);
    if (!(hi > lo)) return total;
    for (const auto& a : atoms_) {
        const double n = a.x.norm();
        if (n > lo && n <= hi) total += a.mass * h(n) * a.x;
    }
    for (const auto& r : expanded_rays()) {
        total += r.weight * ray_integral(r.density, lo, hi, [&](double x) { return h(x) * x; }, cfg) * r.u;
    }
    return total;
}

double LevyMeasure::mass_above(double eps, const QuadratureConfig& cfg) const {
    double total = 0.0;
    for (const auto& a : atoms_) {
        if (a.x.norm() > eps) total += a.mass;
    }
    for (const auto& r : expanded_rays()) {
        if (eps <= 0.0) return kInfinity;
        total += r.weight * r.density.integral(eps, kInfinity, cfg);
    }
    return total;
}

LevyMeasure LevyMeasure::operator+(const LevyMeasure& other) const {
    if (other.dim_ != dim_) throw InvalidArgument("cannot add measures of different dimensions");
    LevyMeasure out = *this;
    out.atoms_.insert(out.atoms_.end(), other.atoms_.begin(), other.atoms_.end());
    out.rays_.insert(out.rays_.end(), other.rays_.begin(), other.rays_.end());
    out.families_.insert(out.families_.end(), other.families_.begin(), other.families_.end());
    return out;
}

LevyMeasure LevyMeasure::scaled(double c) const {
    if (!(c >= 0.0) || !std::isfinite(c)) throw NegativeScale("measures can only be scaled by c >= 0");
    LevyMeasure out(dim_);
    if (c == 0.0) return out;
    for (const auto& a : atoms_) out.add_atom({a.x, c * a.mass});
    for (const auto& r : rays_) out.add_ray({r.u, c * r.weight, r.density});
    for (const auto& f : families_) {
        std::visit(
            [&](const auto& fam) {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, StableFamily>) {
                    StableFamily s = fam;
                    for (auto& sp : s.spectral) sp.w *= c;
                    out.add_family(s);
                } else if constexpr (std::is_same_v<T, GammaFamily>) {
                    out.add_family(GammaFamily{fam.shape * c, fam.rate, fam.direction});
                } else {
                    out.add_family(GammaFamily{c, 1.0, fam.direction});
                    out.add_family(GammaFamily{c, 1.0, -fam.direction});
                }
            },
            f);
    }
    return out;
}

LevyMeasure LevyMeasure::dilated(double c) const {
    if (!std::isfinite(c)) throw InvalidArgument("dilation factor must be finite");
    LevyMeasure out(dim_);
    if (c == 0.0) return out;
    const double ac = std::abs(c);
    const double sg = c > 0.0 ? 1.0 : -1.0;
    for (const auto& a : atoms_) out.add_atom({c * a.x, a.mass});
    for (const auto& r : rays_) out.add_ray({sg * r.u, r.weight, RadialDensity::dilated(ac, r.density)});
    for (const auto& f : families_) {
        std::visit(
            [&](const auto& fam) {
                using T = std::decay_t<decltype(fam)>;
                if constexpr (std::is_same_v<T, StableFamily>) {
                    StableFamily s = fam;
                    for (auto& sp : s.spectral) {
                        sp.w *= std::pow(ac, fam.p);
                        sp.u *= sg;
                    }
                    out.add_family(s);
                } else if constexpr (std::is_same_v<T, GammaFamily>) {
                    out.add_family(GammaFamily{fam.shape, fam.rate / ac, sg * fam.direction});
                } else {
                    if (ac == 1.0) {
                        out.add_family(LaplaceFamily{fam.direction});
                    } else {
                        out.add_family(GammaFamily{1.0, 1.0 / ac, fam.direction});
                        out.add_family(GammaFamily{1.0, 1.0 / ac, -fam.direction});
                    }
                }
            },
            f);
    }
    return out;
}

// ---------------------------------------------------------------------------

MomentReport log_moments(const LevyMeasure& m, const QuadratureConfig& cfg) {
    MomentReport rep;
    double l1 = 0.0, l2 = 0.0;
    bool f1 = true, f2 = true;
    for (const auto& a : m.atoms()) {
        const double n = a.x.norm();
        if (n > 1.0) {
            const double L = std::log(n);
            l1 += a.mass * L;
            l2 += a.mass * L * L;
        }
    }
    for (const auto& r : m.expanded_rays()) {
        if (!(r.density.rmax() > 1.0)) continue;
        for (int order : {1, 2}) {
            bool& finite = order == 1 ? f1 : f2;
            double& acc = order == 1 ? l1 : l2;
            if (!finite) continue;
            const auto known = r.density.log_moment_finite(order);
            if (known && !*known) {
                finite = false;
                continue;
            }
            const double v = ray_integral(
                r.density, 1.0, kInfinity,
                [order](double x) {
                    const double L = std::log(x);
                    return order == 1 ? L : L * L;
                },
                cfg);
            if (!std::isfinite(v)) finite = false;
            else acc += r.weight * v;
        }
    }
    rep.logMoment = f1 ? l1 : kInfinity;
    rep.log2Moment = f1 && f2 ? l2 : kInfinity;
    rep.inLogDomain = std::isfinite(rep.logMoment);
    rep.inLog2Domain = std::isfinite(rep.log2Moment);
    return rep;
}

std::optional<double> monotonicity_witness(const RadialDensity& d, bool timesR) {
    if (d.is_zero()) return std::nullopt;
    const auto grid = radial_grid(d.rmax());
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = (timesR ? grid[i] : 1.0) * d(grid[i]);
    double scale = 0.0;
    for (double v : f) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i + 1 < f.size(); ++i) {
        const double tol = 1e-8 * std::max(std::abs(f[i]), std::abs(f[i + 1])) + 1e-14 * scale;
        if (f[i + 1] > f[i] + tol) return grid[i + 1];
    }
    for (double r : grid) {
        const auto dv = d.derivative(r);
        if (!dv) break;
        const double v = d(r);
        if (timesR) {
            // (r l)' = l + r l'
            const double k1 = v + r * *dv;
            if (k1 > 1e-8 * (std::abs(v) + std::abs(r * *dv)) + 1e-14 * scale) return r;
        } else {
            if (r * *dv > 1e-8 * (std::abs(v) + std::abs(r * *dv)) + 1e-14 * scale) return r;
        }
    }
    return std::nullopt;
}

namespace {

double annulus_mass(const MergedRay& ray, double a, double b, const QuadratureConfig& cfg) {
    double m = ray.density.is_zero() ? 0.0 : ray.density.integral(a, b, cfg);
    for (auto [r, mass] : ray.atoms) {
        if (r > a && r <= b) m += mass;
    }
    return m;
}

std::optional<Witness> dilation_grid_test(const std::vector<MergedRay>& rays, const QuadratureConfig& cfg) {
    static constexpr double ts[] = {0.1, 0.5, 1.0, 2.0};
    for (std::size_t k = 0; k < rays.size(); ++k) {
        const auto& ray = rays[k];
        double top = ray.density.is_zero() ? 0.0 : std::min(ray.density.rmax(), 1e3);
        for (auto [r, mass] : ray.atoms) top = std::max(top, std::min(r, 1e3));
        if (!(top > 0.0)) continue;
        std::vector<std::pair<double, double>> annuli;
        const auto edges = radial_grid(top, 41, 1e-3, 1e3);
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) annuli.emplace_back(edges[i], edges[i + 1]);
        for (const double t : ts) {
            std::vector<std::pair<double, double>> local = annuli;
            for (auto [r, mass] : ray.atoms) {
                const double c = std::exp(-t) * r;
                local.emplace_back(c * (1.0 - 1e-3), c * (1.0 + 1e-3));
            }
            const double et = std::exp(t);
            for (auto [a, b] : local) {
                const double inner = annulus_mass(ray, a, b, cfg);
                const double outer = annulus_mass(ray, et * a, et * b, cfg);
                if (inner < outer - 1e-7 * (std::abs(inner) + std::abs(outer)) - 1e-15) {
                    return Witness{k, b};
                }
            }
        }
    }
    return std::nullopt;
}

}  // namespace

ClassReport classify_measure(const LevyMeasure& m, const QuadratureConfig& cfg) {
    ClassReport rep;
    const auto rays = m.merged_rays();
    const auto grid = dilation_grid_test(rays, cfg);
    rep.grid_test_pass = !grid.has_value();
    rep.witnessGrid = grid;

    if (!m.atoms().empty()) {
        // No density on the atom's ray: atoms are neither in L nor in U.
        for (std::size_t k = 0; k < rays.size(); ++k) {
            if (!rays[k].atoms.empty()) {
                rep.witnessL = Witness{k, rays[k].atoms.front().first};
                rep.witnessU = rep.witnessL;
                break;
            }
        }
        return rep;
    }

    rep.in_L = true;
    rep.in_U = true;
    rep.in_Lf = true;
    for (std::size_t k = 0; k < rays.size(); ++k) {
        const auto& d = rays[k].density;
        if (rep.in_L) {
            if (auto w = monotonicity_witness(d, true)) {
                rep.in_L = false;
                rep.witnessL = Witness{k, *w};
            }
        }
        if (rep.in_U) {
            if (auto w = monotonicity_witness(d, false)) {
                rep.in_U = false;
                rep.witnessU = Witness{k, *w};
            }
        }
        if (rep.in_Lf) {
            try {
                const auto inv = invert_j(d, cfg);
                if (!inv.boundaryAtoms.empty()) {
                    rep.in_Lf = false;
                } else {
                    const auto g = radial_grid(inv.density.rmax());
                    double scale = 0.0, lowest = 0.0;
                    for (double r : g) {
                        const double v = inv.density(r);
                        scale = std::max(scale, std::abs(v));
                        lowest = std::min(lowest, v);
                    }
                    if (lowest < -1e-8 * scale || monotonicity_witness(inv.density, true)) rep.in_Lf = false;
                }
            } catch (const LevyError&) {
                rep.in_Lf = false;
            }
        }
    }
    if (rep.in_L && !rep.grid_test_pass) {
        throw ClassificationInconsistent("k(r) = r l(r) is nonincreasing but the dilation grid test fails");
    }
    return rep;
}

}  // namespace levycalc
