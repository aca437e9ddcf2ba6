#include "levycalc/simulation.hpp"

#include <algorithm>
#include <cmath>

#include "levycalc/operator_expr.hpp"
#include "levycalc/parallel.hpp"
#include "levycalc/special.hpp"

namespace levycalc {

namespace {

constexpr std::size_t kTableCells = 1536;
constexpr double kTailDrop = 1e-14;

// int_0^eps r^2 l(r) dr.
double small_second_moment(const RadialDensity& d, double eps, const QuadratureConfig& cfg) {
    const auto br = d.breakpoints();
    return integrate_piecewise([&](double r) { return r * r * d(r); }, 0.0, std::min(eps, d.rmax()), br, cfg);
}

// Gauss-Legendre 3-point rule on [lo, hi].
template <class G>
double gl3(const G& g, double lo, double hi) {
    static constexpr double x = 0.7745966692414833770359;
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    return h * (5.0 / 9.0 * (g(m - h * x) + g(m + h * x)) + 8.0 / 9.0 * g(m));
}

}  // namespace

Vec PathSample::at(double t) const {
    if (t < 0.0 || t > T * (1.0 + 1e-12)) {
        throw CoverageError("time " + format_double(t) + " lies outside the simulated horizon [0, " + format_double(T) + "]");
    }
    Vec y = drift * t;
    for (std::size_t k = 0; k < jumpTimes.size() && jumpTimes[k] <= t; ++k) y += jumpSizes[k];
    for (std::size_t i = 0; i < gaussianIncrements.size(); ++i) {
        if (grid[i] >= t) break;
        const double frac = std::min(1.0, (t - grid[i]) / (grid[i + 1] - grid[i]));
        y += frac * gaussianIncrements[i];
    }
    return y;
}

// ---------------------------------------------------------------------------

LevySampler::LevySampler(const LevyProcessSpec& spec)
    : dim_(spec.triplet.dim()), eps_(spec.smallJumpCut) {
    if (!(eps_ >= 0.0 && eps_ <= 1.0)) throw InvalidArgument("small-jump cut must lie in [0, 1]");
    const auto& cfg = spec.cfg;
    QuadratureConfig tableCfg = cfg;
    tableCfg.relTol = std::max(cfg.relTol, 1e-10);
    const auto& m = spec.triplet.measure();

    Mat small = Mat::Zero(dim_, dim_);
    LevyMeasure rest(dim_);
    for (const auto& r : m.rays()) rest.add_ray(r);
    for (const auto& a : m.atoms()) {
        if (a.x.norm() > eps_) atoms_.push_back(a);
        else small += a.mass * a.x * a.x.transpose();
    }
    for (const auto& f : m.families()) {
        const auto* s = std::get_if<StableFamily>(&f);
        if (!s) {
            rest.add_family(f);
            continue;
        }
        if (eps_ == 0.0) throw InfiniteIntensity("stable jumps have infinite intensity; use a positive small-jump cut");
        const double K = stable_radial_constant(s->p);
        for (const auto& sp : s->spectral) {
            const double c = sp.w / (2.0 * K);
            small += 2.0 * c * std::pow(eps_, 2.0 - s->p) / (2.0 - s->p) * sp.u * sp.u.transpose();
            for (double sign : {1.0, -1.0}) {
                RayTable t;
                t.u = sign * sp.u;
                t.mass = c * std::pow(eps_, -s->p) / s->p;
                t.paretoIndex = s->p;
                rays_.push_back(std::move(t));
            }
        }
    }
    for (const auto& ray : rest.expanded_rays()) {
        const auto& d = ray.density;
        if (eps_ > 0.0) small += ray.weight * small_second_moment(d, eps_, cfg) * ray.u * ray.u.transpose();
        if (d.rmax() <= eps_) continue;
        double mass = kInfinity;
        try {
            mass = ray.weight * d.integral(eps_, kInfinity, tableCfg);
        } catch (const QuadratureFailure&) {
        }
        if (!std::isfinite(mass)) {
            throw InfiniteIntensity("jumps above the cut " + format_double(eps_) + " have infinite intensity");
        }
        if (mass <= 0.0) continue;
        double R = d.rmax();
        if (!std::isfinite(R)) {
            R = std::max(1.0, 2.0 * eps_);
            while (R < 1e12 && ray.weight * d.tail_mass(R, tableCfg) > kTailDrop * mass) R *= 2.0;
        }
        RayTable t;
        t.u = ray.u;
        t.mass = mass;
        t.edges.resize(kTableCells + 1);
        t.cdf.assign(kTableCells + 1, 0.0);
        // With no cut the table starts where the mass below is negligible.
        double lo = eps_;
        if (lo == 0.0) {
            lo = std::min(1.0, R) * 1e-3;
            while (lo > 1e-300 && ray.weight * d.integral(0.0, lo, tableCfg) > kTailDrop * mass) lo *= 1e-3;
        }
        const double la = std::log(lo), lb = std::log(R);
        for (std::size_t i = 0; i <= kTableCells; ++i) {
            t.edges[i] = std::exp(la + (lb - la) * static_cast<double>(i) / kTableCells);
        }
        t.edges.front() = lo;
        t.edges.back() = R;
        for (std::size_t i = 0; i < kTableCells; ++i) {
            t.cdf[i + 1] = t.cdf[i] + std::max(0.0, d.integral(t.edges[i], t.edges[i + 1], tableCfg));
        }
        if (!(t.cdf.back() > 0.0)) continue;
        rays_.push_back(std::move(t));
    }

    for (const auto& a : atoms_) {
        intensity_ += a.mass;
        componentCdf_.push_back(intensity_);
    }
    for (const auto& r : rays_) {
        intensity_ += r.mass;
        componentCdf_.push_back(intensity_);
    }

    drift_ = spec.triplet.shift() - m.band_vector_integral(eps_, 1.0, [](double) { return 1.0; }, cfg);
    cov_ = spec.triplet.cov();
    if (spec.smallJumpPolicy == SmallJumpPolicy::DiffusionApprox) cov_ += small;
    Eigen::SelfAdjointEigenSolver<Mat> es(cov_);
    const Vec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factor_ = es.eigenvectors() * lam.asDiagonal();
    gaussian_ = lam.maxCoeff() > 0.0;
}

double LevySampler::sample_radius(const RayTable& t, RandomStream& rng) const {
    const double u = rng.uniform();
    if (t.paretoIndex > 0.0) return eps_ * std::pow(u, -1.0 / t.paretoIndex);
    const double target = u * t.cdf.back();
    const auto it = std::upper_bound(t.cdf.begin(), t.cdf.end(), target);
    std::size_t i = static_cast<std::size_t>(std::distance(t.cdf.begin(), it));
    i = std::clamp<std::size_t>(i, 1, t.cdf.size() - 1) - 1;
    const double width = t.cdf[i + 1] - t.cdf[i];
    const double frac = width > 0.0 ? std::clamp((target - t.cdf[i]) / width, 0.0, 1.0) : 0.5;
    return t.edges[i] * std::pow(t.edges[i + 1] / t.edges[i], frac);
}

Vec LevySampler::sample_jump(RandomStream& rng) const {
    if (componentCdf_.empty()) return Vec::Zero(dim_);
    const double target = rng.uniform() * intensity_;
    auto it = std::upper_bound(componentCdf_.begin(), componentCdf_.end(), target);
    std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(std::distance(componentCdf_.begin(), it)),
                                          componentCdf_.size() - 1);
    if (k < atoms_.size()) return atoms_[k].x;
    const auto& t = rays_[k - atoms_.size()];
    return sample_radius(t, rng) * t.u;
}

PathSample LevySampler::sample_path(double T, RandomStream& rng, std::size_t nSteps) const {
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("path horizon must be positive");
    PathSample p;
    p.T = T;
    p.drift = drift_;
    if (intensity_ > 0.0) {
        double t = rng.exponential() / intensity_;
        while (t < T) {
            p.jumpTimes.push_back(t);
            p.jumpSizes.push_back(sample_jump(rng));
            t += rng.exponential() / intensity_;
        }
    }
    if (gaussian_) {
        const std::size_t n = std::max<std::size_t>(nSteps, 1);
        p.grid.resize(n + 1);
        for (std::size_t i = 0; i <= n; ++i) p.grid[i] = T * static_cast<double>(i) / static_cast<double>(n);
        const double sd = std::sqrt(T / static_cast<double>(n));
        p.gaussianIncrements.reserve(n);
        Vec z(dim_);
        for (std::size_t i = 0; i < n; ++i) {
            for (int k = 0; k < dim_; ++k) z[k] = rng.normal();
            p.gaussianIncrements.push_back(sd * (factor_ * z));
        }
    } else {
        p.grid = {0.0, T};
    }
    return p;
}

Vec LevySampler::sample_increment(double T, RandomStream& rng) const {
    Vec y = drift_ * T;
    if (intensity_ > 0.0) {
        double t = rng.exponential() / intensity_;
        while (t < T) {
            y += sample_jump(rng);
            t += rng.exponential() / intensity_;
        }
    }
    if (gaussian_) {
        Vec z(dim_);
        for (int k = 0; k < dim_; ++k) z[k] = rng.normal();
        y += std::sqrt(T) * (factor_ * z);
    }
    return y;
}

PathSample sample_path(const LevyProcessSpec& spec, double T, std::uint64_t seed, std::size_t nSteps,
                       std::uint64_t replicate) {
    RandomStream rng(seed, replicate);
    return LevySampler(spec).sample_path(T, rng, nSteps);
}

// ---------------------------------------------------------------------------

double IntegrandFn::value(double s) const {
    switch (kind) {
        case Kind::Constant:
            return c;
        case Kind::Identity:
            return s;
        case Kind::ExpDecay:
            return std::exp(-s);
        case Kind::Custom:
            if (!f) throw InvalidArgument("custom integrand has no function");
            return f(s);
    }
    return 0.0;
}

double IntegrandFn::derivative(double s) const {
    switch (kind) {
        case Kind::Constant:
            return 0.0;
        case Kind::Identity:
            return 1.0;
        case Kind::ExpDecay:
            return -std::exp(-s);
        case Kind::Custom: {
            if (df) return df(s);
            const double h = 1e-6 * std::max(1.0, std::abs(s));
            return (value(s + h) - value(s - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

double TimeChange::operator()(double s) const {
    return kind == Kind::Identity ? s : (s > 0.0 ? -std::log(s) : kInfinity);
}

double TimeChange::inverse(double t) const { return kind == Kind::Identity ? t : std::exp(-t); }

Vec random_integral(const PathSample& path, const IntegralSpec& spec) {
    if (!(spec.b > spec.a)) throw InvalidArgument("integration interval (a, b] must be nonempty");
    const double ra = spec.r(spec.a), rb = spec.r(spec.b);
    const double tlo = std::min(ra, rb), thi = std::max(ra, rb);
    if (!(tlo >= 0.0) || !(thi <= path.T * (1.0 + 1e-12))) {
        throw CoverageError("the time change maps (a, b] onto [" + format_double(tlo) + ", " + format_double(thi) +
                            "], outside the simulated horizon [0, " + format_double(path.T) + "]");
    }
    // Along increasing time the integral is int_(tlo, thi] g(t) dY(t) with g = h o r^{-1}.
    const auto g = [&](double t) { return spec.h.value(spec.r.inverse(t)); };

    Vec out = Vec::Zero(path.dim());
    for (std::size_t k = 0; k < path.jumpTimes.size(); ++k) {
        const double t = path.jumpTimes[k];
        if (t > tlo && t <= thi) out += g(t) * path.jumpSizes[k];
    }

    double driftWeight = 0.0;
    using HK = IntegrandFn::Kind;
    const bool identity = spec.r.kind == TimeChange::Kind::Identity;
    if (spec.h.kind == HK::Constant) {
        driftWeight = spec.h.c * (thi - tlo);
    } else if (identity && spec.h.kind == HK::Identity) {
        driftWeight = 0.5 * (thi * thi - tlo * tlo);
    } else if ((identity && spec.h.kind == HK::ExpDecay) || (!identity && spec.h.kind == HK::Identity)) {
        driftWeight = std::exp(-tlo) - std::exp(-thi);
    } else {
        driftWeight = integrate(g, tlo, thi, QuadratureConfig{});
    }
    out += driftWeight * path.drift;

    for (std::size_t i = 0; i < path.gaussianIncrements.size(); ++i) {
        const double c0 = std::max(path.grid[i], tlo), c1 = std::min(path.grid[i + 1], thi);
        if (c1 <= c0) continue;
        const double slopeWeight = gl3(g, c0, c1) / (path.grid[i + 1] - path.grid[i]);
        out += slopeWeight * path.gaussianIncrements[i];
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<Vec> replicate(std::size_t N, unsigned workers, const std::function<Vec(std::size_t)>& draw) {
    std::vector<Vec> out(N);
    parallel_for(N, [&](std::size_t j) { out[j] = draw(j); }, workers);
    return out;
}

std::size_t steps_for(double T, const SampleOptions& opt) {
    return static_cast<std::size_t>(std::ceil(T * static_cast<double>(std::max<std::size_t>(opt.stepsPerUnit, 1))));
}

}  // namespace

std::vector<Vec> sample_class_U(const LevyProcessSpec& spec, std::uint64_t seed, std::size_t N,
                                const SampleOptions& opt) {
    const LevySampler sampler(spec);
    IntegralSpec is;
    is.h.kind = IntegrandFn::Kind::Identity;
    const auto n = steps_for(1.0, opt);
    return replicate(N, opt.workers, [&](std::size_t j) {
        RandomStream rng(seed, j);
        return random_integral(sampler.sample_path(1.0, rng, n), is);
    });
}

std::vector<Vec> sample_class_L(const LevyProcessSpec& spec, std::uint64_t seed, std::size_t N, double horizonT,
                                const SampleOptions& opt) {
    if (log_moment_order(spec.triplet.measure(), spec.cfg) < 1) {
        throw DomainViolation("int_(0,inf) e^{-t} dY(t) needs a finite log moment of the Levy measure", 1);
    }
    const double T = horizonT > 0.0 ? horizonT : class_L_horizon(spec.triplet, spec.cfg);
    const LevySampler sampler(spec);
    IntegralSpec is;
    is.h.kind = IntegrandFn::Kind::ExpDecay;
    is.b = T;
    const auto n = steps_for(T, opt);
    return replicate(N, opt.workers, [&](std::size_t j) {
        RandomStream rng(seed, j);
        return random_integral(sampler.sample_path(T, rng, n), is);
    });
}

std::vector<Vec> sample_law(const LevyProcessSpec& spec, std::uint64_t seed, std::size_t N, const SampleOptions& opt) {
    const LevySampler sampler(spec);
    return replicate(N, opt.workers, [&](std::size_t j) {
        RandomStream rng(seed, j);
        return sampler.sample_increment(1.0, rng);
    });
}

double class_L_horizon(const LevyTriplet& t, const QuadratureConfig& cfg) {
    const auto& m = t.measure();
    double inner = 0.0;
    for (const auto& a : m.atoms()) {
        const double n = a.x.norm();
        if (n <= 1.0) inner += a.mass * n * n;
    }
    for (const auto& r : m.expanded_rays()) inner += r.weight * small_second_moment(r.density, 1.0, cfg);
    const double scale = t.shift().norm() + std::sqrt(std::max(0.0, t.cov().trace())) + std::sqrt(inner) +
                         m.mass_above(1.0, cfg);
    return std::min(40.0, 10.0 + std::log1p(std::isfinite(scale) ? scale : 1e12));
}

// ---------------------------------------------------------------------------

double ECFReport::max_abs_z() const {
    double m = 0.0;
    for (double z : zScores) m = std::max(m, z);
    return m;
}

double ECFReport::pass_fraction(double threshold) const {
    if (zScores.empty()) return 1.0;
    const auto ok = std::count_if(zScores.begin(), zScores.end(), [&](double z) { return z < threshold; });
    return static_cast<double>(ok) / static_cast<double>(zScores.size());
}

ECFReport ecf_compare(const std::vector<Vec>& samples, const Exponent& target, const std::vector<Vec>& yGrid) {
    if (samples.size() < 1000) throw InvalidArgument("empirical characteristic function checks need N >= 1000");
    ECFReport rep;
    rep.yGrid = yGrid;
    rep.N = samples.size();
    const auto n = static_cast<double>(samples.size());
    rep.empiricalCF.resize(yGrid.size());
    rep.theoreticalCF.resize(yGrid.size());
    rep.stderrs.resize(yGrid.size());
    rep.zScores.resize(yGrid.size());
    parallel_for(yGrid.size(), [&](std::size_t i) {
        double re = 0.0, im = 0.0;
        for (const auto& x : samples) {
            const double arg = yGrid[i].dot(x);
            re += std::cos(arg);
            im += std::sin(arg);
        }
        const std::complex<double> ecf(re / n, im / n);
        const auto theo = std::exp(target(yGrid[i]));
        const double se = std::sqrt(std::max(0.0, 1.0 - std::norm(ecf)) / n);
        const double diff = std::abs(ecf - theo);
        rep.empiricalCF[i] = ecf;
        rep.theoreticalCF[i] = theo;
        rep.stderrs[i] = se;
        rep.zScores[i] = se > 0.0 ? diff / se : (diff < 1e-12 ? 0.0 : kInfinity);
    });
    return rep;
}

std::string samples_csv(const std::vector<Vec>& samples) {
    std::string out;
    const int d = samples.empty() ? 1 : static_cast<int>(samples.front().size());
    if (d == 1) out += "x\n";
    else {
        for (int k = 0; k < d; ++k) out += (k ? ",x" : "x") + std::to_string(k + 1);
        out += "\n";
    }
    for (const auto& s : samples) {
        for (int k = 0; k < d; ++k) out += (k ? "," : "") + format_double(s[k]);
        out += "\n";
    }
    return out;
}

std::string ecf_csv(const ECFReport& r) {
    std::string out;
    const int d = r.yGrid.empty() ? 1 : static_cast<int>(r.yGrid.front().size());
    if (d == 1) out += "y";
    else {
        for (int k = 0; k < d; ++k) out += (k ? ",y" : "y") + std::to_string(k + 1);
    }
    out += ",ecf_re,ecf_im,cf_re,cf_im,stderr,z\n";
    for (std::size_t i = 0; i < r.yGrid.size(); ++i) {
        for (int k = 0; k < d; ++k) out += (k ? "," : "") + format_double(r.yGrid[i][k]);
        out += "," + format_double(r.empiricalCF[i].real()) + "," + format_double(r.empiricalCF[i].imag()) + "," +
               format_double(r.theoreticalCF[i].real()) + "," + format_double(r.theoreticalCF[i].imag()) + "," +
               format_double(r.stderrs[i]) + "," + format_double(r.zScores[i]) + "\n";
    }
    return out;
}

std::vector<Vec> add_samples(const std::vector<Vec>& a, const std::vector<Vec>& b) {
    if (a.size() != b.size()) throw InvalidArgument("sample sets differ in size");
    std::vector<Vec> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

}  // namespace levycalc
