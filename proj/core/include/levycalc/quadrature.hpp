#pragma once

// Adaptive Gauss-Legendre quadrature for real and complex integrands.
//
// Panels are refined by bisection: an interval is accepted once the n-point
// rule on the whole interval agrees with the sum of the rules on its two
// halves to within the interval's share of the absolute target. The target is
// relTol times an estimate of the integral of |f|, so oscillatory integrands
// with near-zero integrals do not demand impossible relative accuracy.

#include <cmath>
#include <complex>
#include <cstddef>
#include <algorithm>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

#include "levycalc/errors.hpp"

namespace levycalc {

struct QuadratureConfig {
    /// Gauss-Legendre panel size.
    int nodes = 16;
    /// Upper cut of the u-range when integrating over (0, inf) after s = exp(-u).
    double truncationU = 240.0;
    double relTol = 1e-12;
    double absTol = 1e-15;
    std::size_t maxEvaluations = 4'000'000;

    void validate() const;
};

class GaussLegendreRule {
public:
    /// Rule with n nodes on [-1, 1]; rules are built once and cached.
    static const GaussLegendreRule& get(int n);

    std::span<const double> abscissae() const noexcept { return x_; }
    std::span<const double> weights() const noexcept { return w_; }
    int size() const noexcept { return static_cast<int>(x_.size()); }

private:
    explicit GaussLegendreRule(int n);
    std::vector<double> x_;
    std::vector<double> w_;
};

template <class T>
struct QuadResult {
    T value{};
    double error = 0.0;
    double absIntegral = 0.0;
    std::size_t evaluations = 0;
    bool converged = true;
};

namespace detail {

template <class T>
inline double magnitude(const T& v) {
    return std::abs(v);
}

template <class F>
using integrand_t = std::decay_t<std::invoke_result_t<const F&, double>>;

template <class F, class T = integrand_t<F>>
inline T gl_panel(const F& f, double a, double b, const GaussLegendreRule& rule, double* absOut) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    T sum{};
    double asum = 0.0;
    const auto x = rule.abscissae();
    const auto w = rule.weights();
    for (std::size_t i = 0; i < x.size(); ++i) {
        const T v = f(mid + half * x[i]);
        sum += w[i] * v;
        asum += w[i] * magnitude(v);
    }
    if (absOut) *absOut = asum * std::abs(half);
    return sum * half;
}

}  // namespace detail

/// Adaptive integral of f over [a, b]. A positive absTarget overrides the
/// relative target derived from cfg.
template <class F, class T = detail::integrand_t<F>>
QuadResult<T> integrate_adaptive(const F& f, double a, double b, const QuadratureConfig& cfg,
                                 double absTarget = -1.0) {
    QuadResult<T> out;
    if (a == b) return out;
    const auto& rule = GaussLegendreRule::get(cfg.nodes);
    const std::size_t perPanel = static_cast<std::size_t>(rule.size());

    double rootAbs = 0.0;
    const T root = detail::gl_panel(f, a, b, rule, &rootAbs);
    out.evaluations = perPanel;
    const double target =
        absTarget > 0.0 ? absTarget : std::max(cfg.relTol * rootAbs, cfg.absTol);
    const double width = b - a;

    struct Segment {
        double lo, hi;
        T whole;
        double wholeAbs;
    };
    std::vector<Segment> stack;
    stack.reserve(64);
    stack.push_back({a, b, root, rootAbs});
    T total{};
    double totalAbs = 0.0;
    double unconverged = 0.0;

    while (!stack.empty()) {
        const Segment seg = stack.back();
        stack.pop_back();
        const double mid = 0.5 * (seg.lo + seg.hi);
        double la = 0.0, ra = 0.0;
        const T left = detail::gl_panel(f, seg.lo, mid, rule, &la);
        const T right = detail::gl_panel(f, mid, seg.hi, rule, &ra);
        out.evaluations += 2 * perPanel;
        const double diff = detail::magnitude(left + right - seg.whole);
        const double local = target * std::abs((seg.hi - seg.lo) / width);
        const bool tiny = std::abs(seg.hi - seg.lo) <= 1e-13 * std::abs(width) ||
                          mid == seg.lo || mid == seg.hi;
        if (diff <= local || tiny) {
            total += left + right;
            totalAbs += la + ra;
            out.error += diff;
            if (diff > local) unconverged += diff - local;
            continue;
        }
        if (out.evaluations > cfg.maxEvaluations) {
            throw QuadratureFailure("adaptive quadrature exceeded its evaluation budget");
        }
        stack.push_back({seg.lo, mid, left, la});
        stack.push_back({mid, seg.hi, right, ra});
    }
    out.value = total;
    out.absIntegral = totalAbs;
    out.converged = unconverged <= target;
    return out;
}

/// Integral over [a, b]; throws QuadratureFailure when the target is not met.
template <class F, class T = detail::integrand_t<F>>
T integrate(const F& f, double a, double b, const QuadratureConfig& cfg) {
    auto r = integrate_adaptive(f, a, b, cfg);
    if (!r.converged) throw QuadratureFailure("adaptive quadrature did not reach its tolerance");
    return r.value;
}

/// Integral of an integrand that decays on [0, inf), e.g. g(exp(-u)) for a
/// function vanishing at the origin. Panels double in length
/// ([0,1], [1,2], [2,4], ...) until two consecutive panels contribute less
/// than relTol of the accumulated |f| mass, or truncationU is reached.
template <class F, class T = detail::integrand_t<F>>
QuadResult<T> integrate_decaying_adaptive(const F& f, const QuadratureConfig& cfg) {
    QuadResult<T> out;
    double lo = 0.0;
    double hi = 1.0;
    int quiet = 0;
    double scale = 0.0;
    while (lo < cfg.truncationU) {
        hi = std::min(hi, cfg.truncationU);
        const double target = scale > 0.0 ? std::max(cfg.relTol * scale, cfg.absTol) : -1.0;
        auto panel = integrate_adaptive(f, lo, hi, cfg, target);
        out.value += panel.value;
        out.error += panel.error;
        out.evaluations += panel.evaluations;
        out.converged = out.converged && panel.converged;
        scale += panel.absIntegral;
        out.absIntegral = scale;
        const double floor = std::max(cfg.relTol * scale, cfg.absTol);
        if (panel.absIntegral <= floor) {
            if (++quiet >= 2) return out;
        } else {
            quiet = 0;
        }
        if (out.evaluations > cfg.maxEvaluations) {
            throw QuadratureFailure("tail quadrature exceeded its evaluation budget");
        }
        lo = hi;
        hi = std::max(2.0 * hi, hi + 1.0);
    }
    // Truncated: the last panel still carried mass above the tolerance floor.
    out.converged = false;
    return out;
}

template <class F, class T = detail::integrand_t<F>>
T integrate_decaying(const F& f, const QuadratureConfig& cfg) {
    auto r = integrate_decaying_adaptive(f, cfg);
    if (!r.converged) {
        throw QuadratureFailure("integral over (0, inf) not converged before truncationU");
    }
    return r.value;
}

/// Integral of g over [a, inf) for a > 0 via r = a exp(v).
template <class F, class T = detail::integrand_t<F>>
T integrate_to_infinity(const F& g, double a, const QuadratureConfig& cfg) {
    if (!(a > 0.0)) throw InvalidArgument("integrate_to_infinity needs a positive lower limit");
    auto h = [&](double v) -> T {
        const double r = a * std::exp(v);
        if (!std::isfinite(r)) return T{};
        return g(r) * r;
    };
    return integrate_decaying(h, cfg);
}

}  // namespace levycalc

namespace levycalc {

/// Integral of g over [a, b] with 0 <= a < b <= inf, split at the given
/// breakpoints. A piece starting at the origin is mapped by r = hi e^{-v} so
/// integrable singularities at 0 are resolved; a piece reaching infinity is
/// mapped by r = lo e^{v}.
template <class F, class T = detail::integrand_t<F>>
T integrate_piecewise(const F& g, double a, double b, std::span<const double> breaks,
                      const QuadratureConfig& cfg) {
    if (!(b > a)) return T{};
    std::vector<double> cuts;
    cuts.reserve(breaks.size() + 3);
    cuts.push_back(a);
    for (double x : breaks) {
        if (x > a && x < b && std::isfinite(x)) cuts.push_back(x);
    }
    std::sort(cuts.begin() + 1, cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    if (!std::isfinite(b)) {
        // Ensure the semi-infinite piece starts away from the origin.
        if (cuts.size() == 1 && cuts.front() == 0.0) cuts.push_back(1.0);
    }
    cuts.push_back(b);

    T total{};
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (!std::isfinite(hi)) {
            total += integrate_to_infinity(g, lo, cfg);
        } else if (lo == 0.0) {
            auto h = [&](double v) -> T {
                const double r = hi * std::exp(-v);
                if (r <= 0.0) return T{};
                return g(r) * r;
            };
            total += integrate_decaying(h, cfg);
        } else {
            total += integrate(g, lo, hi, cfg);
        }
    }
    return total;
}

}  // namespace levycalc
