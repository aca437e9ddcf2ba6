#include "levycalc/density.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "levycalc/errors.hpp"
#include "levycalc/special.hpp"

namespace levycalc {

using json = nlohmann::json;
using NodePtr = std::shared_ptr<const DensityNode>;

namespace {

json number_to_json(double x) {
    if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
    return json(x);
}

double number_from_json(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInfinity;
        if (s == "-inf") return -kInfinity;
        throw InvalidArgument("expected a number or \"inf\", got \"" + s + "\"");
    }
    return j.get<double>();
}

double factorial(int n) {
    double f = 1.0;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

bool is_small_integer(double q, int lo, int hi) {
    return q == std::floor(q) && q >= lo && q <= hi;
}

// int_x^inf t^n e^{-t} dt for integer n >= 0.
double upper_gamma_int(int n, double x) {
    if (std::isinf(x)) return 0.0;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= n; ++k) {
        term *= x / k;
        sum += term;
    }
    return factorial(n) * std::exp(-x) * sum;
}

}  // namespace

class DensityNode {
public:
    virtual ~DensityNode() = default;
    virtual RadialDensity::Kind kind() const = 0;
    virtual double value(double r) const = 0;
    virtual std::optional<double> derivative(double r) const = 0;
    virtual double rmax() const = 0;
    virtual void breakpoints(std::vector<double>& out) const = 0;
    virtual std::optional<bool> log_moment_finite(int order) const = 0;
    virtual std::optional<bool> levy_integrable() const = 0;
    virtual json to_json() const = 0;

    virtual double integral(double a, double b, const QuadratureConfig& cfg) const {
        b = std::min(b, rmax());
        if (!(b > a)) return 0.0;
        std::vector<double> br;
        breakpoints(br);
        return integrate_piecewise([this](double r) { return value(r); }, a, b, br, cfg);
    }

    /// Leaves carry their own multiplicative coefficient.
    virtual bool is_leaf() const { return false; }
    virtual double coefficient() const { return 1.0; }
    virtual NodePtr with_coefficient(double) const { return nullptr; }
};

namespace {

class ZeroNode final : public DensityNode {
public:
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::Zero; }
    double value(double) const override { return 0.0; }
    std::optional<double> derivative(double) const override { return 0.0; }
    double rmax() const override { return 0.0; }
    void breakpoints(std::vector<double>&) const override {}
    double integral(double, double, const QuadratureConfig&) const override { return 0.0; }
    std::optional<bool> log_moment_finite(int) const override { return true; }
    std::optional<bool> levy_integrable() const override { return true; }
    json to_json() const override { return {{"kind", "zero"}}; }
};

class PowerLogNode final : public DensityNode {
public:
    PowerLogNode(double c, double q, double rmax, double s) : c_(c), q_(q), rmax_(rmax), s_(s) {
        if (!std::isfinite(c) || !std::isfinite(q) || !std::isfinite(s) || !(rmax > 0.0)) {
            throw InvalidArgument("power density needs finite c, q, s and rmax > 0");
        }
    }
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::PowerLog; }
    double value(double r) const override {
        if (!(r > 0.0) || r > rmax_) return 0.0;
        double v = c_ * (q_ == 0.0 ? 1.0 : std::pow(r, q_));
        if (s_ != 0.0) v *= std::pow(1.0 + std::log1p(r), s_);
        return v;
    }
    std::optional<double> derivative(double r) const override {
        if (!(r > 0.0) || r > rmax_) return 0.0;
        const double L = 1.0 + std::log1p(r);
        const double rq = q_ == 0.0 ? 1.0 : std::pow(r, q_);
        double d = (q_ == 0.0 ? 0.0 : q_ * rq / r) * (s_ == 0.0 ? 1.0 : std::pow(L, s_));
        if (s_ != 0.0) d += rq * s_ * std::pow(L, s_ - 1.0) / (1.0 + r);
        return c_ * d;
    }
    double rmax() const override { return rmax_; }
    void breakpoints(std::vector<double>& out) const override {
        if (std::isfinite(rmax_)) out.push_back(rmax_);
    }
    double integral(double a, double b, const QuadratureConfig& cfg) const override {
        b = std::min(b, rmax_);
        a = std::max(a, 0.0);
        if (!(b > a)) return 0.0;
        if (s_ != 0.0) return DensityNode::integral(a, b, cfg);
        if (q_ == -1.0) {
            if (a == 0.0 || std::isinf(b)) return kInfinity * (c_ > 0 ? 1.0 : -1.0);
            return c_ * std::log(b / a);
        }
        const double e = q_ + 1.0;
        if (std::isinf(b)) {
            if (e >= 0.0) return kInfinity * (c_ > 0 ? 1.0 : -1.0);
            return -c_ * std::pow(a, e) / e;
        }
        if (a == 0.0 && e <= 0.0) return kInfinity * (c_ > 0 ? 1.0 : -1.0);
        return c_ * (std::pow(b, e) - (a == 0.0 ? 0.0 : std::pow(a, e))) / e;
    }
    std::optional<bool> log_moment_finite(int order) const override {
        if (std::isfinite(rmax_) || c_ == 0.0) return true;
        if (q_ < -1.0) return true;
        if (q_ > -1.0) return false;
        return order + s_ < -1.0;
    }
    std::optional<bool> levy_integrable() const override {
        if (c_ == 0.0) return true;
        if (!(q_ > -3.0)) return false;
        if (std::isfinite(rmax_)) return true;
        return q_ < -1.0 || (q_ == -1.0 && s_ < -1.0);
    }
    json to_json() const override {
        return {{"kind", "power"}, {"c", c_}, {"q", q_}, {"s", s_}, {"rmax", number_to_json(rmax_)}};
    }
    bool is_leaf() const override { return true; }
    double coefficient() const override { return c_; }
    NodePtr with_coefficient(double c) const override {
        return std::make_shared<PowerLogNode>(c, q_, rmax_, s_);
    }
    double q() const { return q_; }
    double s() const { return s_; }

private:
    double c_, q_, rmax_, s_;
};

class GammaKernelNode final : public DensityNode {
public:
    GammaKernelNode(double c, double q, double rate) : c_(c), q_(q), rate_(rate) {
        if (!std::isfinite(c) || !std::isfinite(q) || !(rate > 0.0)) {
            throw InvalidArgument("gamma kernel needs finite c, q and rate > 0");
        }
    }
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::GammaKernel; }
    double value(double r) const override {
        if (!(r > 0.0)) return 0.0;
        return c_ * (q_ == 0.0 ? 1.0 : std::pow(r, q_)) * std::exp(-rate_ * r);
    }
    std::optional<double> derivative(double r) const override {
        if (!(r > 0.0)) return 0.0;
        const double rq = q_ == 0.0 ? 1.0 : std::pow(r, q_);
        return c_ * std::exp(-rate_ * r) * ((q_ == 0.0 ? 0.0 : q_ * rq / r) - rate_ * rq);
    }
    double rmax() const override { return kInfinity; }
    void breakpoints(std::vector<double>&) const override {}
    double integral(double a, double b, const QuadratureConfig& cfg) const override {
        a = std::max(a, 0.0);
        if (!(b > a)) return 0.0;
        if (q_ == -1.0) {
            if (a == 0.0) return kInfinity * (c_ > 0 ? 1.0 : -1.0);
            const double hi = std::isinf(b) ? 0.0 : expint_e1(rate_ * b);
            return c_ * (expint_e1(rate_ * a) - hi);
        }
        if (is_small_integer(q_, 0, 12)) {
            const int n = static_cast<int>(q_);
            const double lo = upper_gamma_int(n, rate_ * a);
            const double hi = std::isinf(b) ? 0.0 : upper_gamma_int(n, rate_ * b);
            return c_ * (lo - hi) / std::pow(rate_, n + 1);
        }
        return DensityNode::integral(a, b, cfg);
    }
    std::optional<bool> log_moment_finite(int) const override { return true; }
    std::optional<bool> levy_integrable() const override { return c_ == 0.0 || q_ > -3.0; }
    json to_json() const override {
        return {{"kind", "gamma"}, {"c", c_}, {"q", q_}, {"rate", rate_}};
    }
    bool is_leaf() const override { return true; }
    double coefficient() const override { return c_; }
    NodePtr with_coefficient(double c) const override {
        return std::make_shared<GammaKernelNode>(c, q_, rate_);
    }
    double q() const { return q_; }
    double rate() const { return rate_; }

private:
    double c_, q_, rate_;
};

class ExpIntKernelNode final : public DensityNode {
public:
    ExpIntKernelNode(double c, double q, double rate) : c_(c), q_(q), rate_(rate) {
        if (!std::isfinite(c) || !std::isfinite(q) || !(rate > 0.0)) {
            throw InvalidArgument("exponential-integral kernel needs finite c, q and rate > 0");
        }
    }
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::ExpIntKernel; }
    double value(double r) const override {
        if (!(r > 0.0)) return 0.0;
        return c_ * (q_ == 0.0 ? 1.0 : std::pow(r, q_)) * expint_e1(rate_ * r);
    }
    std::optional<double> derivative(double r) const override {
        if (!(r > 0.0)) return 0.0;
        const double rq1 = std::pow(r, q_ - 1.0);
        return c_ * rq1 * (q_ * expint_e1(rate_ * r) - std::exp(-rate_ * r));
    }
    double rmax() const override { return kInfinity; }
    void breakpoints(std::vector<double>&) const override {}
    double integral(double a, double b, const QuadratureConfig& cfg) const override {
        a = std::max(a, 0.0);
        if (!(b > a)) return 0.0;
        if (q_ == 0.0) {
            // d/dr [r E1(rate r) - e^{-rate r} / rate] = E1(rate r)
            auto F = [this](double r) {
                if (std::isinf(r)) return 0.0;
                if (r == 0.0) return -1.0 / rate_;
                return r * expint_e1(rate_ * r) - std::exp(-rate_ * r) / rate_;
            };
            return c_ * (F(b) - F(a));
        }
        return DensityNode::integral(a, b, cfg);
    }
    std::optional<bool> log_moment_finite(int) const override { return true; }
    std::optional<bool> levy_integrable() const override { return c_ == 0.0 || q_ > -3.0; }
    json to_json() const override {
        return {{"kind", "expint"}, {"c", c_}, {"q", q_}, {"rate", rate_}};
    }
    bool is_leaf() const override { return true; }
    double coefficient() const override { return c_; }
    NodePtr with_coefficient(double c) const override {
        return std::make_shared<ExpIntKernelNode>(c, q_, rate_);
    }
    double q() const { return q_; }
    double rate() const { return rate_; }

private:
    double c_, q_, rate_;
};

class TabulatedNode final : public DensityNode {
public:
    TabulatedNode(std::vector<double> r, std::vector<double> v, double c = 1.0)
        : r_(std::move(r)), v_(std::move(v)), c_(c) {
        if (r_.size() < 2 || r_.size() != v_.size()) {
            throw InvalidArgument("tabulated density needs at least two knots and matching sizes");
        }
        if (!(r_.front() > 0.0)) throw InvalidArgument("tabulated density knots must be positive");
        for (std::size_t i = 1; i < r_.size(); ++i) {
            if (!(r_[i] > r_[i - 1])) throw InvalidArgument("tabulated density knots must increase");
        }
        for (double x : v_) {
            if (!std::isfinite(x)) throw InvalidArgument("tabulated density values must be finite");
        }
    }
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::Tabulated; }
    double value(double r) const override {
        if (!(r > 0.0) || r > r_.back()) return 0.0;
        if (r <= r_.front()) return c_ * v_.front();
        const auto it = std::upper_bound(r_.begin(), r_.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - r_.begin()) - 1;
        if (i + 1 >= r_.size()) return c_ * v_.back();
        const double t = (r - r_[i]) / (r_[i + 1] - r_[i]);
        return c_ * (v_[i] + t * (v_[i + 1] - v_[i]));
    }
    std::optional<double> derivative(double r) const override {
        if (!(r > r_.front()) || r > r_.back()) return 0.0;
        auto it = std::lower_bound(r_.begin(), r_.end(), r);
        std::size_t i = static_cast<std::size_t>(it - r_.begin());
        if (i == 0) i = 1;
        return c_ * (v_[i] - v_[i - 1]) / (r_[i] - r_[i - 1]);
    }
    double rmax() const override { return r_.back(); }
    void breakpoints(std::vector<double>& out) const override { out.insert(out.end(), r_.begin(), r_.end()); }
    double integral(double a, double b, const QuadratureConfig&) const override {
        a = std::max(a, 0.0);
        b = std::min(b, r_.back());
        if (!(b > a)) return 0.0;
        // Exact for the piecewise-linear interpolant.
        std::vector<double> pts{a};
        if (r_.front() > a && r_.front() < b) pts.push_back(r_.front());
        for (double x : r_) {
            if (x > a && x < b) pts.push_back(x);
        }
        pts.push_back(b);
        std::sort(pts.begin(), pts.end());
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            s += 0.5 * (value(pts[i]) + value(pts[i + 1])) * (pts[i + 1] - pts[i]);
        }
        // value() at a == 0 returns 0; the flat extension is v_0 on (0, r_0].
        if (a == 0.0) s += 0.5 * c_ * v_.front() * (pts[1] - pts[0]);
        return s;
    }
    std::optional<bool> log_moment_finite(int) const override { return true; }
    std::optional<bool> levy_integrable() const override { return true; }
    json to_json() const override {
        json vals = json::array();
        for (double x : v_) vals.push_back(c_ * x);
        return {{"kind", "tabulated"}, {"r", r_}, {"values", vals}};
    }
    bool is_leaf() const override { return true; }
    double coefficient() const override { return c_; }
    NodePtr with_coefficient(double c) const override {
        return std::make_shared<TabulatedNode>(r_, v_, c);
    }
    json shape_json() const { return {{"kind", "tabulated"}, {"r", r_}, {"values", v_}}; }

private:
    std::vector<double> r_, v_;
    double c_;
};

struct Term {
    double coef;
    NodePtr node;
};

class SumNode final : public DensityNode {
public:
    explicit SumNode(std::vector<Term> terms) : terms_(std::move(terms)) {}
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::Sum; }
    double value(double r) const override {
        double s = 0.0;
        for (const auto& t : terms_) s += t.coef * t.node->value(r);
        return s;
    }
    std::optional<double> derivative(double r) const override {
        double s = 0.0;
        for (const auto& t : terms_) {
            auto d = t.node->derivative(r);
            if (!d) return std::nullopt;
            s += t.coef * *d;
        }
        return s;
    }
    double rmax() const override {
        double m = 0.0;
        for (const auto& t : terms_) m = std::max(m, t.node->rmax());
        return m;
    }
    void breakpoints(std::vector<double>& out) const override {
        for (const auto& t : terms_) t.node->breakpoints(out);
    }
    double integral(double a, double b, const QuadratureConfig& cfg) const override {
        // Termwise integrals can be individually infinite (e.g. r^{-1} pieces
        // cancelling near 0); fall back to joint quadrature then.
        double s = 0.0;
        for (const auto& t : terms_) {
            const double v = t.node->integral(a, b, cfg);
            if (!std::isfinite(v)) return DensityNode::integral(a, b, cfg);
            s += t.coef * v;
        }
        return s;
    }
    std::optional<bool> log_moment_finite(int order) const override {
        bool unknown = false;
        for (const auto& t : terms_) {
            auto f = t.node->log_moment_finite(order);
            if (!f) unknown = true;
            else if (!*f) return false;
        }
        if (unknown) return std::nullopt;
        return true;
    }
    std::optional<bool> levy_integrable() const override {
        bool unknown = false;
        for (const auto& t : terms_) {
            auto f = t.node->levy_integrable();
            if (!f) unknown = true;
            else if (!*f) return false;
        }
        if (unknown) return std::nullopt;
        return true;
    }
    json to_json() const override {
        json arr = json::array();
        for (const auto& t : terms_) arr.push_back({{"coef", t.coef}, {"density", t.node->to_json()}});
        return {{"kind", "sum"}, {"terms", arr}};
    }
    const std::vector<Term>& terms() const { return terms_; }

private:
    std::vector<Term> terms_;
};

class JImageNode final : public DensityNode {
public:
    JImageNode(int power, RadialDensity parent, QuadratureConfig cfg)
        : power_(power), parent_(std::move(parent)), cfg_(cfg) {
        if (power_ < 1) throw InvalidArgument("J image power must be at least 1");
    }
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::JImage; }
    double value(double r) const override {
        const double R = parent_.rmax();
        if (!(r > 0.0) || r >= R) return 0.0;
        const double norm = 1.0 / factorial(power_ - 1);
        auto f = [&](double v) {
            const double base = parent_(r * std::exp(v));
            return power_ == 1 ? base : base * std::pow(v, power_ - 1) * norm;
        };
        std::vector<double> cuts{0.0};
        for (double b : parent_.breakpoints()) {
            if (b > r && b < R) cuts.push_back(std::log(b / r));
        }
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) total += integrate(f, cuts[i], cuts[i + 1], cfg_);
        if (std::isfinite(R)) {
            total += integrate(f, cuts.back(), std::log(R / r), cfg_);
        } else {
            const double v0 = cuts.back();
            total += integrate_decaying([&](double t) { return f(v0 + t); }, cfg_);
        }
        return total;
    }
    std::optional<double> derivative(double r) const override {
        if (!(r > 0.0) || r >= parent_.rmax()) return 0.0;
        const double lower = power_ == 1 ? parent_(r) : lower_image()(r);
        return -lower / r;
    }
    double rmax() const override { return parent_.rmax(); }
    void breakpoints(std::vector<double>& out) const override {
        auto b = parent_.breakpoints();
        out.insert(out.end(), b.begin(), b.end());
    }
    double integral(double a, double b, const QuadratureConfig& cfg) const override {
        // int_a^b m_k = [r m_k(r)]_a^b + int_a^b m_{k-1}, from (r m_k)' = m_k - m_{k-1}.
        b = std::min(b, rmax());
        a = std::max(a, 0.0);
        if (!(b > a)) return 0.0;
        const double lower =
            power_ == 1 ? parent_.integral(a, b, cfg) : lower_image().integral(a, b, cfg);
        if (!std::isfinite(lower)) return DensityNode::integral(a, b, cfg);
        const double hiTerm = std::isfinite(b) ? b * value(b) : 0.0;
        const double loTerm = a > 0.0 ? a * value(a) : 0.0;
        return hiTerm - loTerm + lower;
    }
    std::optional<bool> log_moment_finite(int order) const override {
        return parent_.log_moment_finite(order);
    }
    std::optional<bool> levy_integrable() const override { return parent_.levy_integrable(); }
    json to_json() const override {
        return {{"kind", "j_image"}, {"power", power_}, {"of", parent_.to_json()}};
    }
    int power() const { return power_; }
    const RadialDensity& parent() const { return parent_; }
    const QuadratureConfig& config() const { return cfg_; }

private:
    RadialDensity lower_image() const { return RadialDensity::j_image(power_ - 1, parent_, cfg_); }
    int power_;
    RadialDensity parent_;
    QuadratureConfig cfg_;
};

class IImageNode final : public DensityNode {
public:
    IImageNode(RadialDensity parent, QuadratureConfig cfg) : parent_(std::move(parent)), cfg_(cfg) {}
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::IImage; }
    double value(double r) const override {
        if (!(r > 0.0) || r >= parent_.rmax()) return 0.0;
        return parent_.integral(r, parent_.rmax(), cfg_) / r;
    }
    std::optional<double> derivative(double r) const override {
        if (!(r > 0.0) || r >= parent_.rmax()) return 0.0;
        return -(value(r) + parent_(r)) / r;
    }
    double rmax() const override { return parent_.rmax(); }
    void breakpoints(std::vector<double>& out) const override {
        auto b = parent_.breakpoints();
        out.insert(out.end(), b.begin(), b.end());
    }
    std::optional<bool> log_moment_finite(int order) const override {
        return parent_.log_moment_finite(order + 1);
    }
    std::optional<bool> levy_integrable() const override {
        auto lm = parent_.log_moment_finite(1);
        auto li = parent_.levy_integrable();
        if (lm && !*lm) return false;
        if (li && !*li) return false;
        if (!lm || !li) return std::nullopt;
        return true;
    }
    json to_json() const override { return {{"kind", "i_image"}, {"of", parent_.to_json()}}; }
    const RadialDensity& parent() const { return parent_; }

private:
    RadialDensity parent_;
    QuadratureConfig cfg_;
};

class DilatedNode final : public DensityNode {
public:
    DilatedNode(double c, RadialDensity parent) : c_(c), parent_(std::move(parent)) {
        if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("density dilation needs c > 0");
    }
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::Dilated; }
    double value(double r) const override { return parent_(r / c_) / c_; }
    std::optional<double> derivative(double r) const override {
        auto d = parent_.derivative(r / c_);
        if (!d) return std::nullopt;
        return *d / (c_ * c_);
    }
    double rmax() const override { return c_ * parent_.rmax(); }
    void breakpoints(std::vector<double>& out) const override {
        for (double b : parent_.breakpoints()) out.push_back(c_ * b);
    }
    double integral(double a, double b, const QuadratureConfig& cfg) const override {
        return parent_.integral(a / c_, b / c_, cfg);
    }
    std::optional<bool> log_moment_finite(int order) const override {
        return parent_.log_moment_finite(order);
    }
    std::optional<bool> levy_integrable() const override { return parent_.levy_integrable(); }
    json to_json() const override { return {{"kind", "dilated"}, {"c", c_}, {"of", parent_.to_json()}}; }
    double factor() const { return c_; }
    const RadialDensity& parent() const { return parent_; }

private:
    double c_;
    RadialDensity parent_;
};

class NegRDerivativeNode final : public DensityNode {
public:
    explicit NegRDerivativeNode(RadialDensity parent) : parent_(std::move(parent)) {}
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::NegRDerivative; }
    double value(double r) const override {
        if (!(r > 0.0) || r > parent_.rmax()) return 0.0;
        return -r * parent_.derivative_or_fd(r);
    }
    std::optional<double> derivative(double) const override { return std::nullopt; }
    double rmax() const override { return parent_.rmax(); }
    void breakpoints(std::vector<double>& out) const override {
        auto b = parent_.breakpoints();
        out.insert(out.end(), b.begin(), b.end());
    }
    std::optional<bool> log_moment_finite(int) const override { return std::nullopt; }
    std::optional<bool> levy_integrable() const override { return std::nullopt; }
    json to_json() const override { return {{"kind", "neg_r_derivative"}, {"of", parent_.to_json()}}; }

private:
    RadialDensity parent_;
};

class PositivePartNode final : public DensityNode {
public:
    PositivePartNode(RadialDensity parent, bool negate, QuadratureConfig cfg)
        : parent_(std::move(parent)), negate_(negate), cfg_(cfg) {}
    RadialDensity::Kind kind() const override { return RadialDensity::Kind::PositivePart; }
    double value(double r) const override {
        const double v = negate_ ? -parent_(r) : parent_(r);
        return v > 0.0 ? v : 0.0;
    }
    std::optional<double> derivative(double r) const override {
        const double v = negate_ ? -parent_(r) : parent_(r);
        if (!(v > 0.0)) return 0.0;
        auto d = parent_.derivative(r);
        if (!d) return std::nullopt;
        return negate_ ? -*d : *d;
    }
    double rmax() const override { return parent_.rmax(); }
    void breakpoints(std::vector<double>& out) const override {
        auto b = parent_.breakpoints();
        out.insert(out.end(), b.begin(), b.end());
    }
    std::optional<bool> log_moment_finite(int order) const override {
        return parent_.log_moment_finite(order);
    }
    std::optional<bool> levy_integrable() const override { return parent_.levy_integrable(); }
    json to_json() const override {
        return {{"kind", "positive_part"}, {"negate", negate_}, {"of", parent_.to_json()}};
    }

private:
    RadialDensity parent_;
    bool negate_;
    QuadratureConfig cfg_;
};

const NodePtr& zero_node() {
    static const NodePtr z = std::make_shared<ZeroNode>();
    return z;
}

// Flattens `d` scaled by `coef` into unit-coefficient terms.
void collect_terms(const NodePtr& node, double coef, std::vector<Term>& out) {
    if (coef == 0.0) return;
    if (node->kind() == RadialDensity::Kind::Zero) return;
    if (auto s = dynamic_cast<const SumNode*>(node.get())) {
        for (const auto& t : s->terms()) collect_terms(t.node, coef * t.coef, out);
        return;
    }
    if (node->is_leaf()) {
        const double c = node->coefficient();
        if (c == 0.0) return;
        out.push_back({coef * c, node->with_coefficient(1.0)});
        return;
    }
    out.push_back({coef, node});
}

std::string node_key(const NodePtr& node) {
    if (auto t = dynamic_cast<const TabulatedNode*>(node.get())) return t->shape_json().dump();
    return node->to_json().dump();
}

NodePtr build_sum(std::vector<Term> terms) {
    std::map<std::string, std::size_t> index;
    std::vector<Term> merged;
    for (auto& t : terms) {
        const auto k = node_key(t.node);
        auto it = index.find(k);
        if (it == index.end()) {
            index.emplace(k, merged.size());
            merged.push_back(t);
        } else {
            merged[it->second].coef += t.coef;
        }
    }
    double maxCoef = 0.0;
    for (const auto& t : merged) maxCoef = std::max(maxCoef, std::abs(t.coef));
    std::vector<Term> kept;
    for (const auto& t : merged) {
        if (std::abs(t.coef) > 1e-14 * maxCoef) kept.push_back(t);
    }
    if (kept.empty()) return zero_node();
    if (kept.size() == 1) {
        const auto& t = kept.front();
        if (t.node->is_leaf()) return t.node->with_coefficient(t.coef);
        if (t.coef == 1.0) return t.node;
    }
    return std::make_shared<SumNode>(std::move(kept));
}

std::vector<Term> terms_of(const RadialDensity& d) {
    std::vector<Term> out;
    collect_terms(d.node_ptr(), 1.0, out);
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

RadialDensity::RadialDensity() : node_(zero_node()) {}

RadialDensity RadialDensity::power(double c, double q, double rmax, double s) {
    if (c == 0.0) return {};
    return RadialDensity(std::make_shared<PowerLogNode>(c, q, rmax, s));
}

RadialDensity RadialDensity::gamma_kernel(double c, double q, double rate) {
    if (c == 0.0) return {};
    return RadialDensity(std::make_shared<GammaKernelNode>(c, q, rate));
}

RadialDensity RadialDensity::expint_kernel(double c, double q, double rate) {
    if (c == 0.0) return {};
    return RadialDensity(std::make_shared<ExpIntKernelNode>(c, q, rate));
}

RadialDensity RadialDensity::tabulated(std::vector<double> r, std::vector<double> values) {
    return RadialDensity(std::make_shared<TabulatedNode>(std::move(r), std::move(values)));
}

RadialDensity RadialDensity::sum(const std::vector<std::pair<double, RadialDensity>>& terms) {
    std::vector<Term> flat;
    for (const auto& [c, d] : terms) collect_terms(d.node_, c, flat);
    return RadialDensity(build_sum(std::move(flat)));
}

RadialDensity RadialDensity::j_image(int power, RadialDensity parent, const QuadratureConfig& cfg) {
    if (parent.is_zero()) return {};
    return RadialDensity(std::make_shared<JImageNode>(power, std::move(parent), cfg));
}

RadialDensity RadialDensity::i_image(RadialDensity parent, const QuadratureConfig& cfg) {
    if (parent.is_zero()) return {};
    return RadialDensity(std::make_shared<IImageNode>(std::move(parent), cfg));
}

RadialDensity RadialDensity::dilated(double c, RadialDensity parent) {
    if (parent.is_zero()) return {};
    if (c == 1.0) return parent;
    return RadialDensity(std::make_shared<DilatedNode>(c, std::move(parent)));
}

RadialDensity RadialDensity::neg_r_derivative(RadialDensity parent) {
    if (parent.is_zero()) return {};
    return RadialDensity(std::make_shared<NegRDerivativeNode>(std::move(parent)));
}

RadialDensity RadialDensity::positive_part(RadialDensity parent, bool negate, const QuadratureConfig& cfg) {
    if (parent.is_zero()) return {};
    return RadialDensity(std::make_shared<PositivePartNode>(std::move(parent), negate, cfg));
}

double RadialDensity::operator()(double r) const { return node_->value(r); }

std::optional<double> RadialDensity::derivative(double r) const { return node_->derivative(r); }

double RadialDensity::derivative_or_fd(double r) const {
    if (auto d = node_->derivative(r)) return *d;
    const double h = 1e-5 * r;
    return (node_->value(r + h) - node_->value(r - h)) / (2.0 * h);
}

double RadialDensity::rmax() const { return node_->rmax(); }

std::vector<double> RadialDensity::breakpoints() const {
    std::vector<double> out;
    node_->breakpoints(out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double RadialDensity::integral(double a, double b, const QuadratureConfig& cfg) const {
    return node_->integral(a, b, cfg);
}

std::optional<bool> RadialDensity::log_moment_finite(int order) const {
    return node_->log_moment_finite(order);
}

std::optional<bool> RadialDensity::levy_integrable() const { return node_->levy_integrable(); }

RadialDensity::Kind RadialDensity::kind() const { return node_->kind(); }

RadialDensity RadialDensity::scaled(double c) const { return sum({{c, *this}}); }

json RadialDensity::to_json() const { return node_->to_json(); }

std::string RadialDensity::key() const { return node_key(node_); }

RadialDensity RadialDensity::from_json(const json& j) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "zero") return {};
    if (kind == "power") {
        return power(j.at("c").get<double>(), j.at("q").get<double>(),
                     j.contains("rmax") ? number_from_json(j.at("rmax")) : kInfinity,
                     j.value("s", 0.0));
    }
    if (kind == "gamma") {
        return gamma_kernel(j.at("c").get<double>(), j.at("q").get<double>(), j.at("rate").get<double>());
    }
    if (kind == "expint") {
        return expint_kernel(j.at("c").get<double>(), j.at("q").get<double>(), j.at("rate").get<double>());
    }
    if (kind == "tabulated") {
        return tabulated(j.at("r").get<std::vector<double>>(), j.at("values").get<std::vector<double>>());
    }
    if (kind == "sum") {
        std::vector<std::pair<double, RadialDensity>> terms;
        for (const auto& t : j.at("terms")) terms.emplace_back(t.at("coef").get<double>(), from_json(t.at("density")));
        // Rebuild without re-merging so the tree shape survives a round trip.
        std::vector<Term> flat;
        for (const auto& [c, d] : terms) flat.push_back({c, d.node_});
        if (flat.empty()) return {};
        return RadialDensity(std::make_shared<SumNode>(std::move(flat)));
    }
    if (kind == "j_image") return j_image(j.at("power").get<int>(), from_json(j.at("of")));
    if (kind == "i_image") return i_image(from_json(j.at("of")));
    if (kind == "dilated") return dilated(j.at("c").get<double>(), from_json(j.at("of")));
    if (kind == "neg_r_derivative") return neg_r_derivative(from_json(j.at("of")));
    if (kind == "positive_part") return positive_part(from_json(j.at("of")), j.at("negate").get<bool>());
    throw InvalidArgument("unknown radial density kind \"" + kind + "\"");
}

RadialDensity operator+(const RadialDensity& a, const RadialDensity& b) {
    return RadialDensity::sum({{1.0, a}, {1.0, b}});
}

RadialDensity operator-(const RadialDensity& a, const RadialDensity& b) {
    return RadialDensity::sum({{1.0, a}, {-1.0, b}});
}

// ---------------------------------------------------------------------------
// Structural algebra

namespace {

// J of a unit-coefficient term.
RadialDensity j_of_unit(const NodePtr& node, const QuadratureConfig& cfg) {
    const RadialDensity self(node);
    if (auto p = dynamic_cast<const PowerLogNode*>(node.get())) {
        const double q = p->q();
        const double R = p->rmax();
        if (p->s() == 0.0 && q != 0.0) {
            if (std::isinf(R)) {
                if (q < 0.0) return RadialDensity::power(-1.0 / q, q);
            } else {
                // int_r^R w^{q-1} dw = (R^q - r^q) / q
                return RadialDensity::sum({{std::pow(R, q) / q, RadialDensity::power(1.0, 0.0, R)},
                                           {-1.0 / q, RadialDensity::power(1.0, q, R)}});
            }
        }
    }
    if (auto g = dynamic_cast<const GammaKernelNode*>(node.get())) {
        const double b = g->rate();
        const double q = g->q();
        if (q == -1.0) {
            // int_r^inf e^{-b w} w^{-2} dw = e^{-b r}/r - b E1(b r)
            return RadialDensity::sum({{1.0, RadialDensity::gamma_kernel(1.0, -1.0, b)},
                                       {-b, RadialDensity::expint_kernel(1.0, 0.0, b)}});
        }
        if (q == 0.0) return RadialDensity::expint_kernel(1.0, 0.0, b);
        if (is_small_integer(q, 1, 12)) {
            // int_r^inf w^{n-1} e^{-b w} dw = (n-1)! e^{-b r} sum_k (b r)^k / k! / b^n
            const int n = static_cast<int>(q);
            std::vector<std::pair<double, RadialDensity>> terms;
            for (int k = 0; k <= n - 1; ++k) {
                const double c = factorial(n - 1) / factorial(k) * std::pow(b, k) / std::pow(b, n);
                terms.emplace_back(c, RadialDensity::gamma_kernel(1.0, k, b));
            }
            return RadialDensity::sum(terms);
        }
    }
    if (auto e = dynamic_cast<const ExpIntKernelNode*>(node.get())) {
        if (e->q() == 1.0) {
            // int_r^inf E1(b w) dw = e^{-b r}/b - r E1(b r)
            const double b = e->rate();
            return RadialDensity::sum({{1.0 / b, RadialDensity::gamma_kernel(1.0, 0.0, b)},
                                       {-1.0, RadialDensity::expint_kernel(1.0, 1.0, b)}});
        }
    }
    if (auto jn = dynamic_cast<const JImageNode*>(node.get())) {
        return RadialDensity::j_image(jn->power() + 1, jn->parent(), jn->config());
    }
    if (auto dn = dynamic_cast<const DilatedNode*>(node.get())) {
        return RadialDensity::dilated(dn->factor(), apply_j(dn->parent(), cfg));
    }
    return RadialDensity::j_image(1, self, cfg);
}

RadialDensity i_of_unit(const NodePtr& node, const QuadratureConfig& cfg) {
    const RadialDensity self(node);
    if (auto p = dynamic_cast<const PowerLogNode*>(node.get())) {
        const double q = p->q();
        const double R = p->rmax();
        if (p->s() == 0.0 && q != -1.0) {
            const double e = q + 1.0;
            if (std::isinf(R)) {
                if (e < 0.0) return RadialDensity::power(-1.0 / e, q);
            } else {
                // r^{-1} int_r^R w^q dw = (R^e r^{-1} - r^q) / e
                return RadialDensity::sum({{std::pow(R, e) / e, RadialDensity::power(1.0, -1.0, R)},
                                           {-1.0 / e, RadialDensity::power(1.0, q, R)}});
            }
        }
    }
    if (auto g = dynamic_cast<const GammaKernelNode*>(node.get())) {
        const double b = g->rate();
        const double q = g->q();
        if (q == -1.0) return RadialDensity::expint_kernel(1.0, -1.0, b);
        if (is_small_integer(q, 0, 12)) {
            // r^{-1} int_r^inf w^n e^{-b w} dw = n! / b^{n+1} sum_k (b r)^k / k! e^{-b r} r^{-1}
            const int n = static_cast<int>(q);
            std::vector<std::pair<double, RadialDensity>> terms;
            for (int k = 0; k <= n; ++k) {
                const double c = factorial(n) / factorial(k) * std::pow(b, k) / std::pow(b, n + 1);
                terms.emplace_back(c, RadialDensity::gamma_kernel(1.0, k - 1.0, b));
            }
            return RadialDensity::sum(terms);
        }
    }
    if (auto e = dynamic_cast<const ExpIntKernelNode*>(node.get())) {
        if (e->q() == 0.0) {
            // r^{-1} int_r^inf E1(b w) dw = e^{-b r} / (b r) - E1(b r)
            const double b = e->rate();
            return RadialDensity::sum({{1.0 / b, RadialDensity::gamma_kernel(1.0, -1.0, b)},
                                       {-1.0, RadialDensity::expint_kernel(1.0, 0.0, b)}});
        }
    }
    if (auto dn = dynamic_cast<const DilatedNode*>(node.get())) {
        return RadialDensity::dilated(dn->factor(), apply_i(dn->parent(), cfg));
    }
    return RadialDensity::i_image(self, cfg);
}

void add_atom(std::vector<std::pair<double, double>>& atoms, double r, double mass) {
    if (mass == 0.0) return;
    for (auto& [ar, am] : atoms) {
        if (ar == r) {
            am += mass;
            return;
        }
    }
    atoms.emplace_back(r, mass);
}

Inversion invert_j_unit(const NodePtr& node, const QuadratureConfig& cfg) {
    const RadialDensity self(node);
    Inversion out;
    if (auto p = dynamic_cast<const PowerLogNode*>(node.get())) {
        const double R = p->rmax();
        if (p->s() == 0.0) {
            out.density = RadialDensity::power(-p->q(), p->q(), R);
        } else {
            out.density = RadialDensity::neg_r_derivative(self);
        }
        if (std::isfinite(R)) add_atom(out.boundaryAtoms, R, R * self(R));
        return out;
    }
    if (auto g = dynamic_cast<const GammaKernelNode*>(node.get())) {
        const double q = g->q();
        const double b = g->rate();
        out.density = RadialDensity::sum({{-q, RadialDensity::gamma_kernel(1.0, q, b)},
                                          {b, RadialDensity::gamma_kernel(1.0, q + 1.0, b)}});
        return out;
    }
    if (auto e = dynamic_cast<const ExpIntKernelNode*>(node.get())) {
        const double q = e->q();
        const double b = e->rate();
        out.density = RadialDensity::sum({{-q, RadialDensity::expint_kernel(1.0, q, b)},
                                          {1.0, RadialDensity::gamma_kernel(1.0, q, b)}});
        return out;
    }
    if (auto jn = dynamic_cast<const JImageNode*>(node.get())) {
        out.density = jn->power() == 1 ? jn->parent()
                                       : RadialDensity::j_image(jn->power() - 1, jn->parent(), jn->config());
        return out;
    }
    if (auto in = dynamic_cast<const IImageNode*>(node.get())) {
        // -r (I n)' = I n + n
        out.density = RadialDensity::sum({{1.0, self}, {1.0, in->parent()}});
        return out;
    }
    if (auto dn = dynamic_cast<const DilatedNode*>(node.get())) {
        auto inner = invert_j(dn->parent(), cfg);
        out.density = RadialDensity::dilated(dn->factor(), inner.density);
        for (auto [r, m] : inner.boundaryAtoms) add_atom(out.boundaryAtoms, dn->factor() * r, m);
        return out;
    }
    out.density = RadialDensity::neg_r_derivative(self);
    const double R = self.rmax();
    if (std::isfinite(R)) add_atom(out.boundaryAtoms, R, R * self(R));
    return out;
}

}  // namespace

RadialDensity apply_j(const RadialDensity& n, const QuadratureConfig& cfg) {
    std::vector<std::pair<double, RadialDensity>> parts;
    for (const auto& t : terms_of(n)) parts.emplace_back(t.coef, j_of_unit(t.node, cfg));
    return RadialDensity::sum(parts);
}

RadialDensity apply_i(const RadialDensity& n, const QuadratureConfig& cfg) {
    std::vector<std::pair<double, RadialDensity>> parts;
    for (const auto& t : terms_of(n)) parts.emplace_back(t.coef, i_of_unit(t.node, cfg));
    return RadialDensity::sum(parts);
}

Inversion invert_j(const RadialDensity& m, const QuadratureConfig& cfg) {
    Inversion out;
    std::vector<std::pair<double, RadialDensity>> parts;
    for (const auto& t : terms_of(m)) {
        auto inv = invert_j_unit(t.node, cfg);
        parts.emplace_back(t.coef, inv.density);
        for (auto [r, mass] : inv.boundaryAtoms) add_atom(out.boundaryAtoms, r, t.coef * mass);
    }
    out.density = RadialDensity::sum(parts);
    std::erase_if(out.boundaryAtoms, [](const auto& a) { return a.second == 0.0; });
    return out;
}

Inversion invert_i(const RadialDensity& m, const QuadratureConfig& cfg) {
    Inversion out;
    std::vector<std::pair<double, RadialDensity>> parts;
    for (const auto& t : terms_of(m)) {
        if (auto in = dynamic_cast<const IImageNode*>(t.node.get())) {
            parts.emplace_back(t.coef, in->parent());
            continue;
        }
        if (auto dn = dynamic_cast<const DilatedNode*>(t.node.get())) {
            auto inner = invert_i(dn->parent(), cfg);
            parts.emplace_back(t.coef, RadialDensity::dilated(dn->factor(), inner.density));
            for (auto [r, mass] : inner.boundaryAtoms) add_atom(out.boundaryAtoms, dn->factor() * r, t.coef * mass);
            continue;
        }
        // -(r m)' = -r m' - m
        auto inv = invert_j_unit(t.node, cfg);
        parts.emplace_back(t.coef, inv.density);
        parts.emplace_back(-t.coef, RadialDensity(t.node));
        for (auto [r, mass] : inv.boundaryAtoms) add_atom(out.boundaryAtoms, r, t.coef * mass);
    }
    out.density = RadialDensity::sum(parts);
    std::erase_if(out.boundaryAtoms, [](const auto& a) { return a.second == 0.0; });
    return out;
}

std::vector<double> radial_grid(double rmax, std::size_t points, double lo, double hi) {
    if (points < 2) points = 2;
    double top = std::min(hi, rmax);
    if (lo >= top) lo = top * 1e-6;
    std::vector<double> grid(points);
    const double a = std::log(lo);
    const double b = std::log(top);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
    }
    grid.back() = top;
    return grid;
}

}  // namespace levycalc
