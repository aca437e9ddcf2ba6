#include "levycalc/exponent.hpp"

#include <cmath>
#include <sstream>

#include "levycalc/operators.hpp"

namespace levycalc {

using C = std::complex<double>;

class ExponentNode {
public:
    virtual ~ExponentNode() = default;
    virtual C eval(const Vec& y, double s) const = 0;
    virtual int dim() const = 0;
    virtual Exponent::Kind kind() const = 0;
    virtual Exponent::Op op() const { return Exponent::Op::None; }
    virtual std::vector<std::pair<double, Exponent>> operands() const { return {}; }
    virtual double parameter() const { return 0.0; }
    virtual std::optional<LevyTriplet> triplet() const { return std::nullopt; }
    virtual int log_order() const = 0;
    /// Maximal nesting depth of I below and including this node.
    virtual int i_depth() const { return 0; }
    virtual std::string describe() const = 0;
    virtual std::optional<Exponent> closed_image(Exponent::Image) const { return std::nullopt; }
};

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(12);
    os << x;
    return os.str();
}

class TripletNode final : public ExponentNode {
public:
    TripletNode(LevyTriplet t, QuadratureConfig cfg) : t_(std::move(t)), cfg_(cfg) {
        t_.validate();
        order_ = log_moment_order(t_.measure(), cfg_);
    }
    C eval(const Vec& y, double s) const override { return eval_exponent_scaled(t_, y, s, cfg_); }
    int dim() const override { return t_.dim(); }
    Exponent::Kind kind() const override { return Exponent::Kind::TripletBacked; }
    std::optional<LevyTriplet> triplet() const override { return t_; }
    int log_order() const override { return order_; }
    std::string describe() const override { return "triplet"; }

private:
    LevyTriplet t_;
    QuadratureConfig cfg_;
    int order_ = kLogMomentCap;
};

enum class ClosedTag { Zero, Gaussian, Stable, Gamma, Laplace, GammaJ, GammaTilde, LaplaceJ, LaplaceTilde };

C gamma_j_value(double shape, double z_im) {
    // shape * [1 + (1 - z) log(1 - z) / z] with z = i z_im.
    const C z(0.0, z_im);
    if (std::abs(z_im) < 0.1) {
        C sum{};
        C zp = z;  // z^{n-1}
        for (int n = 2; n < 40; ++n) {
            sum += zp / (static_cast<double>(n) * (n - 1));
            zp *= z;
        }
        return shape * sum;
    }
    return shape * (1.0 + (1.0 - z) * std::log(1.0 - z) / z);
}

double laplace_j_value(double t) {
    if (std::abs(t) < 1e-2) {
        double sum = 0.0;
        double t2n = 1.0;
        const double t2 = t * t;
        for (int n = 1; n <= 12; ++n) {
            t2n *= t2;
            sum += (n % 2 ? -1.0 : 1.0) * t2n / (n * (2.0 * n + 1.0));
        }
        return sum;
    }
    return 2.0 - std::log1p(t * t) - 2.0 * std::atan(t) / t;
}

double laplace_tilde_value(double t) {
    if (std::abs(t) < 1e-2) {
        double sum = 0.0;
        double t2n = 1.0;
        const double t2 = t * t;
        for (int n = 1; n <= 12; ++n) {
            t2n *= t2;
            sum += (n % 2 ? -1.0 : 1.0) * 2.0 * t2n / (2.0 * n + 1.0);
        }
        return sum;
    }
    return 2.0 * (std::atan(t) - t) / t;
}

class ClosedNode final : public ExponentNode {
public:
    ClosedNode(ClosedTag tag, int dim) : tag_(tag), dim_(dim), cov_(Mat::Zero(dim, dim)), u_(Vec::Zero(dim)) {}

    static std::shared_ptr<ClosedNode> make(ClosedTag tag, int dim) { return std::make_shared<ClosedNode>(tag, dim); }

    C eval(const Vec& y, double s) const override {
        if (y.size() != dim_) throw InvalidArgument("argument dimension does not match the exponent");
        if (s == 0.0) return {};
        switch (tag_) {
            case ClosedTag::Zero:
                return {};
            case ClosedTag::Gaussian:
                return -0.5 * s * s * y.dot(cov_ * y);
            case ClosedTag::Stable: {
                double v = 0.0;
                for (const auto& sp : stable_.spectral) v -= sp.w * std::pow(std::abs(s * y.dot(sp.u)), stable_.p);
                return v;
            }
            case ClosedTag::Gamma:
                return -a_ * std::log(C(1.0, -s * y.dot(u_) / b_));
            case ClosedTag::GammaJ:
                return gamma_j_value(a_, s * y.dot(u_) / b_);
            case ClosedTag::GammaTilde: {
                const double k = s * y.dot(u_);
                return -a_ * std::log(C(1.0, -k / b_)) - gamma_j_value(a_, k / b_);
            }
            case ClosedTag::Laplace: {
                const double t = s * y.dot(u_);
                return -std::log1p(t * t);
            }
            case ClosedTag::LaplaceJ:
                return laplace_j_value(s * y.dot(u_));
            case ClosedTag::LaplaceTilde:
                return laplace_tilde_value(s * y.dot(u_));
        }
        return {};
    }
    int dim() const override { return dim_; }
    Exponent::Kind kind() const override { return Exponent::Kind::ClosedForm; }
    int log_order() const override { return kLogMomentCap; }

    std::optional<LevyTriplet> triplet() const override {
        switch (tag_) {
            case ClosedTag::Zero:
                return LevyTriplet(dim_);
            case ClosedTag::Gaussian:
                return LevyTriplet::gaussian(cov_);
            case ClosedTag::Stable:
                return LevyTriplet::pure_jump(LevyMeasure::family(dim_, stable_));
            case ClosedTag::Gamma:
                return gamma_triplet();
            case ClosedTag::Laplace:
                return LevyTriplet::pure_jump(LevyMeasure::laplace(u_));
            case ClosedTag::GammaJ:
                return apply_J_triplet(gamma_triplet());
            case ClosedTag::GammaTilde:
                return tilde_triplet(gamma_triplet());
            case ClosedTag::LaplaceJ:
                return apply_J_triplet(LevyTriplet::pure_jump(LevyMeasure::laplace(u_)));
            case ClosedTag::LaplaceTilde:
                return tilde_triplet(LevyTriplet::pure_jump(LevyMeasure::laplace(u_)));
        }
        return std::nullopt;
    }

    std::string describe() const override {
        switch (tag_) {
            case ClosedTag::Zero:
                return "zero";
            case ClosedTag::Gaussian:
                return "gaussian";
            case ClosedTag::Stable:
                return "stable(" + fmt(stable_.p) + ")";
            case ClosedTag::Gamma:
                return "gamma(" + fmt(a_) + "," + fmt(b_) + ")";
            case ClosedTag::GammaJ:
                return "J[gamma(" + fmt(a_) + "," + fmt(b_) + ")]";
            case ClosedTag::GammaTilde:
                return "(I-J)[gamma(" + fmt(a_) + "," + fmt(b_) + ")]";
            case ClosedTag::Laplace:
                return "laplace";
            case ClosedTag::LaplaceJ:
                return "J[laplace]";
            case ClosedTag::LaplaceTilde:
                return "(I-J)[laplace]";
        }
        return "closed";
    }

    std::optional<Exponent> closed_image(Exponent::Image which) const override {
        using Im = Exponent::Image;
        switch (tag_) {
            case ClosedTag::Zero:
                return Exponent(dim_);
            case ClosedTag::Gaussian: {
                const double f = which == Im::J ? 1.0 / 3.0 : which == Im::I ? 0.5 : 2.0 / 3.0;
                return Exponent::gaussian(f * cov_);
            }
            case ClosedTag::Stable: {
                const double p = stable_.p;
                const double f = which == Im::J ? 1.0 / (p + 1.0) : which == Im::I ? 1.0 / p : p / (p + 1.0);
                auto sp = stable_.spectral;
                for (auto& x : sp) x.w *= f;
                return Exponent::stable(p, sp);
            }
            case ClosedTag::Gamma:
                if (which == Im::J) return Exponent::gamma_j(a_, b_, u_);
                if (which == Im::Tilde) return Exponent::gamma_tilde(a_, b_, u_);
                return std::nullopt;
            case ClosedTag::Laplace:
                if (which == Im::J) return Exponent::laplace_j(u_);
                if (which == Im::Tilde) return Exponent::laplace_tilde(u_);
                return std::nullopt;
            default:
                return std::nullopt;
        }
    }

    ClosedTag tag_;
    int dim_;
    Mat cov_;
    StableFamily stable_;
    double a_ = 1.0, b_ = 1.0;
    Vec u_;

private:
    LevyTriplet gamma_triplet() const {
        return LevyTriplet(a_ * (-std::expm1(-b_)) / b_ * u_, Mat::Zero(dim_, dim_),
                           LevyMeasure::gamma(a_, b_, u_));
    }
};

class JNode final : public ExponentNode {
public:
    JNode(Exponent parent, QuadratureConfig cfg) : parent_(std::move(parent)), cfg_(cfg) { cfg_.validate(); }
    C eval(const Vec& y, double s) const override {
        if (s == 0.0) return {};
        auto res = integrate_adaptive([&](double t) { return parent_.eval_scaled(y, s * t); }, 0.0, 1.0, cfg_);
        if (!res.converged) throw QuadratureFailure("J quadrature did not reach its tolerance");
        return res.value;
    }
    int dim() const override { return parent_.dim(); }
    Exponent::Kind kind() const override { return Exponent::Kind::OperatorApplied; }
    Exponent::Op op() const override { return Exponent::Op::J; }
    std::vector<std::pair<double, Exponent>> operands() const override { return {{1.0, parent_}}; }
    int log_order() const override { return parent_.log_moment_order(); }
    int i_depth() const override { return parent_.node().i_depth(); }
    std::string describe() const override { return "J[" + parent_.describe() + "]"; }

private:
    Exponent parent_;
    QuadratureConfig cfg_;
};

class INode final : public ExponentNode {
public:
    INode(Exponent parent, QuadratureConfig cfg) : parent_(std::move(parent)), cfg_(cfg) {
        cfg_.validate();
        if (parent_.log_moment_order() < 1) {
            const int order = parent_.node().i_depth() + 1;
            throw DomainViolation("I requires a finite log^" + std::to_string(order) +
                                      " moment of the underlying Levy measure",
                                  order);
        }
    }
    C eval(const Vec& y, double s) const override {
        if (s == 0.0) return {};
        // int_0^1 Phi(t s y) dt / t with t = e^{-u}.
        auto res = integrate_decaying_adaptive([&](double u) { return parent_.eval_scaled(y, s * std::exp(-u)); },
                                               cfg_);
        if (!res.converged) throw QuadratureFailure("I quadrature did not converge before truncationU");
        return res.value;
    }
    int dim() const override { return parent_.dim(); }
    Exponent::Kind kind() const override { return Exponent::Kind::OperatorApplied; }
    Exponent::Op op() const override { return Exponent::Op::I; }
    std::vector<std::pair<double, Exponent>> operands() const override { return {{1.0, parent_}}; }
    int log_order() const override { return parent_.log_moment_order() - 1; }
    int i_depth() const override { return parent_.node().i_depth() + 1; }
    std::string describe() const override { return "I[" + parent_.describe() + "]"; }

private:
    Exponent parent_;
    QuadratureConfig cfg_;
};

class JPowerNode final : public ExponentNode {
public:
    JPowerNode(Exponent parent, int k, QuadratureConfig cfg) : parent_(std::move(parent)), k_(k), cfg_(cfg) {
        cfg_.validate();
        if (k_ < 1) throw InvalidArgument("J power must be at least 1");
        norm_ = std::exp(-std::lgamma(static_cast<double>(k_)));
    }
    C eval(const Vec& y, double s) const override {
        if (s == 0.0) return {};
        auto res = integrate_decaying_adaptive(
            [&](double u) {
                const double w = std::exp(-u);
                const double kern = k_ == 1 ? w : w * std::pow(u, k_ - 1) * norm_;
                return kern * parent_.eval_scaled(y, s * w);
            },
            cfg_);
        if (!res.converged) throw QuadratureFailure("J power quadrature did not converge before truncationU");
        return res.value;
    }
    int dim() const override { return parent_.dim(); }
    Exponent::Kind kind() const override { return Exponent::Kind::OperatorApplied; }
    Exponent::Op op() const override { return Exponent::Op::JPower; }
    std::vector<std::pair<double, Exponent>> operands() const override { return {{1.0, parent_}}; }
    double parameter() const override { return k_; }
    int log_order() const override { return parent_.log_moment_order(); }
    int i_depth() const override { return parent_.node().i_depth(); }
    std::string describe() const override { return "J^" + std::to_string(k_) + "[" + parent_.describe() + "]"; }

private:
    Exponent parent_;
    int k_;
    QuadratureConfig cfg_;
    double norm_ = 1.0;
};

class ScaleNode final : public ExponentNode {
public:
    ScaleNode(Exponent parent, double lambda, bool dilation)
        : parent_(std::move(parent)), lambda_(lambda), dilation_(dilation) {}
    C eval(const Vec& y, double s) const override {
        if (dilation_) return parent_.eval_scaled(y, s * lambda_);
        return lambda_ * parent_.eval_scaled(y, s);
    }
    int dim() const override { return parent_.dim(); }
    Exponent::Kind kind() const override { return Exponent::Kind::OperatorApplied; }
    Exponent::Op op() const override { return dilation_ ? Exponent::Op::Dilate : Exponent::Op::Scale; }
    std::vector<std::pair<double, Exponent>> operands() const override { return {{1.0, parent_}}; }
    double parameter() const override { return lambda_; }
    int log_order() const override {
        if (lambda_ == 0.0) return kLogMomentCap;
        return parent_.log_moment_order();
    }
    int i_depth() const override { return parent_.node().i_depth(); }
    std::string describe() const override {
        return std::string(dilation_ ? "dilate(" : "scale(") + fmt(lambda_) + ")[" + parent_.describe() + "]";
    }

private:
    Exponent parent_;
    double lambda_;
    bool dilation_;
};

class LinearNode final : public ExponentNode {
public:
    explicit LinearNode(std::vector<std::pair<double, Exponent>> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) throw InvalidArgument("linear combination needs at least one term");
        for (const auto& t : terms_) {
            if (t.second.dim() != terms_.front().second.dim()) {
                throw InvalidArgument("linear combination of exponents of different dimensions");
            }
        }
    }
    C eval(const Vec& y, double s) const override {
        C total{};
        for (const auto& [c, e] : terms_) total += c * e.eval_scaled(y, s);
        return total;
    }
    int dim() const override { return terms_.front().second.dim(); }
    Exponent::Kind kind() const override { return Exponent::Kind::OperatorApplied; }
    Exponent::Op op() const override { return Exponent::Op::Sum; }
    std::vector<std::pair<double, Exponent>> operands() const override { return terms_; }
    int log_order() const override {
        int o = kLogMomentCap;
        for (const auto& t : terms_) o = std::min(o, t.second.log_moment_order());
        return o;
    }
    int i_depth() const override {
        int d = 0;
        for (const auto& t : terms_) d = std::max(d, t.second.node().i_depth());
        return d;
    }
    std::string describe() const override {
        std::string s = "sum(";
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) s += ", ";
            s += fmt(terms_[i].first) + "*" + terms_[i].second.describe();
        }
        return s + ")";
    }

private:
    std::vector<std::pair<double, Exponent>> terms_;
};

}  // namespace

Exponent::Exponent(int dim) : node_(ClosedNode::make(ClosedTag::Zero, dim)) {}

Exponent Exponent::from_triplet(LevyTriplet t, const QuadratureConfig& cfg) {
    return Exponent(std::make_shared<TripletNode>(std::move(t), cfg));
}

Exponent Exponent::gaussian(Mat cov) {
    LevyTriplet::gaussian(cov);  // validates
    auto n = ClosedNode::make(ClosedTag::Gaussian, static_cast<int>(cov.rows()));
    n->cov_ = std::move(cov);
    return Exponent(n);
}

Exponent Exponent::stable(double p, std::vector<SpectralPoint> spectral) {
    const auto m = LevyMeasure::stable(p, std::move(spectral));
    auto n = ClosedNode::make(ClosedTag::Stable, m.dim());
    if (m.families().empty()) return Exponent(m.dim());
    n->stable_ = std::get<StableFamily>(m.families().front());
    return Exponent(n);
}

namespace {

Exponent gamma_like(ClosedTag tag, double shape, double rate, Vec direction) {
    const auto m = LevyMeasure::gamma(shape, rate, std::move(direction));
    const auto& g = std::get<GammaFamily>(m.families().front());
    auto n = ClosedNode::make(tag, m.dim());
    n->a_ = g.shape;
    n->b_ = g.rate;
    n->u_ = g.direction;
    return Exponent(n);
}

Exponent laplace_like(ClosedTag tag, Vec direction) {
    const int d = static_cast<int>(direction.size());
    auto n = ClosedNode::make(tag, d);
    n->u_ = unit(direction);
    return Exponent(n);
}

}  // namespace

Exponent Exponent::gamma(double shape, double rate, Vec direction) {
    return gamma_like(ClosedTag::Gamma, shape, rate, std::move(direction));
}
Exponent Exponent::gamma_j(double shape, double rate, Vec direction) {
    return gamma_like(ClosedTag::GammaJ, shape, rate, std::move(direction));
}
Exponent Exponent::gamma_tilde(double shape, double rate, Vec direction) {
    return gamma_like(ClosedTag::GammaTilde, shape, rate, std::move(direction));
}
Exponent Exponent::laplace(Vec direction) { return laplace_like(ClosedTag::Laplace, std::move(direction)); }
Exponent Exponent::laplace_j(Vec direction) { return laplace_like(ClosedTag::LaplaceJ, std::move(direction)); }
Exponent Exponent::laplace_tilde(Vec direction) {
    return laplace_like(ClosedTag::LaplaceTilde, std::move(direction));
}

Exponent Exponent::apply_j(Exponent parent, const QuadratureConfig& cfg) {
    return Exponent(std::make_shared<JNode>(std::move(parent), cfg));
}

Exponent Exponent::apply_i(Exponent parent, const QuadratureConfig& cfg) {
    return Exponent(std::make_shared<INode>(std::move(parent), cfg));
}

Exponent Exponent::apply_j_power(Exponent parent, int k, const QuadratureConfig& cfg) {
    return Exponent(std::make_shared<JPowerNode>(std::move(parent), k, cfg));
}

Exponent Exponent::scale(Exponent parent, double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw NegativeScale("exponents can only be scaled by lambda >= 0");
    return Exponent(std::make_shared<ScaleNode>(std::move(parent), lambda, false));
}

Exponent Exponent::dilate(Exponent parent, double c) {
    if (!std::isfinite(c)) throw InvalidArgument("dilation factor must be finite");
    return Exponent(std::make_shared<ScaleNode>(std::move(parent), c, true));
}

Exponent Exponent::linear(std::vector<std::pair<double, Exponent>> terms) {
    return Exponent(std::make_shared<LinearNode>(std::move(terms)));
}

std::complex<double> Exponent::operator()(const Vec& y) const { return node_->eval(y, 1.0); }

std::complex<double> Exponent::eval_scaled(const Vec& y, double s) const { return node_->eval(y, s); }

std::complex<double> Exponent::at(double t) const {
    if (dim() != 1) throw InvalidArgument("scalar evaluation needs a one-dimensional exponent");
    Vec y(1);
    y[0] = t;
    return node_->eval(y, 1.0);
}

int Exponent::dim() const { return node_->dim(); }
Exponent::Kind Exponent::kind() const { return node_->kind(); }
Exponent::Op Exponent::op() const { return node_->op(); }
std::vector<std::pair<double, Exponent>> Exponent::operands() const { return node_->operands(); }
double Exponent::parameter() const { return node_->parameter(); }
std::optional<Exponent> Exponent::closed_image(Image which) const { return node_->closed_image(which); }
std::optional<LevyTriplet> Exponent::triplet() const { return node_->triplet(); }
int Exponent::log_moment_order() const { return node_->log_order(); }
std::string Exponent::describe() const { return node_->describe(); }

int log_moment_order(const LevyMeasure& m, const QuadratureConfig& cfg) {
    const auto rays = m.expanded_rays();
    for (int k = 1; k <= kLogMomentCap; ++k) {
        for (const auto& r : rays) {
            if (!(r.density.rmax() > 1.0)) continue;
            const auto known = r.density.log_moment_finite(k);
            if (known) {
                if (!*known) return k - 1;
                continue;
            }
            try {
                const double v = integrate_piecewise(
                    [&](double x) { return std::pow(std::log(x), k) * std::abs(r.density(x)); }, 1.0,
                    r.density.rmax(), r.density.breakpoints(), cfg);
                if (!std::isfinite(v)) return k - 1;
            } catch (const QuadratureFailure&) {
                return k - 1;
            }
        }
    }
    return kLogMomentCap;
}

}  // namespace levycalc
