#include "levycalc/operator_expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "levycalc/errors.hpp"

namespace levycalc {

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

OperatorExpr OperatorExpr::identity() { return {}; }

OperatorExpr OperatorExpr::j() {
    OperatorExpr e;
    e.kind_ = Kind::J;
    return e;
}

OperatorExpr OperatorExpr::i() {
    OperatorExpr e;
    e.kind_ = Kind::I;
    return e;
}

OperatorExpr OperatorExpr::scale(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw NegativeScale("scale factors must be finite and >= 0");
    OperatorExpr e;
    e.kind_ = Kind::Scale;
    e.value_ = lambda;
    return e;
}

OperatorExpr OperatorExpr::dilate(double c) {
    if (!std::isfinite(c)) throw InvalidArgument("dilation factor must be finite");
    OperatorExpr e;
    e.kind_ = Kind::Dilate;
    e.value_ = c;
    return e;
}

OperatorExpr OperatorExpr::sum(std::vector<OperatorExpr> terms) {
    if (terms.empty()) throw InvalidArgument("add needs at least one operand");
    OperatorExpr e;
    e.kind_ = Kind::Sum;
    e.children_ = std::move(terms);
    return e;
}

OperatorExpr OperatorExpr::sub(OperatorExpr a, OperatorExpr b) {
    OperatorExpr e;
    e.kind_ = Kind::Sub;
    e.children_ = {std::move(a), std::move(b)};
    return e;
}

OperatorExpr OperatorExpr::compose(std::vector<OperatorExpr> factors) {
    if (factors.empty()) throw InvalidArgument("compose needs at least one operand");
    OperatorExpr e;
    e.kind_ = Kind::Compose;
    e.children_ = std::move(factors);
    return e;
}

int OperatorExpr::i_depth() const {
    switch (kind_) {
        case Kind::I:
            return 1;
        case Kind::Sum:
        case Kind::Sub: {
            int d = 0;
            for (const auto& c : children_) d = std::max(d, c.i_depth());
            return d;
        }
        case Kind::Compose: {
            int d = 0;
            for (const auto& c : children_) d += c.i_depth();
            return d;
        }
        default:
            return 0;
    }
}

std::string OperatorExpr::to_string() const {
    switch (kind_) {
        case Kind::Identity:
            return "id";
        case Kind::J:
            return "J";
        case Kind::I:
            return "I";
        case Kind::Scale:
            return "(scale " + format_double(value_) + ")";
        case Kind::Dilate:
            return "(dilate " + format_double(value_) + ")";
        case Kind::Sum:
        case Kind::Sub:
        case Kind::Compose: {
            std::string s = kind_ == Kind::Sum ? "(add" : kind_ == Kind::Sub ? "(sub" : "(compose";
            for (const auto& c : children_) s += " " + c.to_string();
            return s + ")";
        }
    }
    return {};
}

bool operator==(const OperatorExpr& a, const OperatorExpr& b) {
    return a.kind_ == b.kind_ && a.value_ == b.value_ && a.children_ == b.children_;
}

// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    OperatorExpr parse_all() {
        skip_ws();
        auto e = parse_expr();
        skip_ws();
        if (pos_ < text_.size()) fail("unexpected trailing input", "end of input");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg, const std::string& expected) const {
        throw ParseError(msg, pos_ + 1, expected);
    }

    void skip_ws() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                       text_[pos_] == '\r')) {
            ++pos_;
        }
    }

    static bool is_delim(char c) { return c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

    std::string_view word() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && !is_delim(text_[pos_])) ++pos_;
        return text_.substr(start, pos_ - start);
    }

    OperatorExpr parse_expr() {
        skip_ws();
        static const std::string kExpr = "id, J, I or '('";
        if (pos_ >= text_.size()) fail("unexpected end of input", kExpr);
        if (text_[pos_] == ')') fail("unexpected ')'", kExpr);
        if (text_[pos_] != '(') {
            const std::size_t start = pos_;
            const auto w = word();
            if (w == "id") return OperatorExpr::identity();
            if (w == "J") return OperatorExpr::j();
            if (w == "I") return OperatorExpr::i();
            pos_ = start;
            fail("unknown operator '" + std::string(w) + "'", kExpr);
        }
        ++pos_;
        skip_ws();
        const std::size_t headPos = pos_;
        const auto head = word();
        static const std::string kHead = "scale, dilate, add, sub or compose";
        if (head.empty()) {
            if (pos_ >= text_.size()) fail("unexpected end of input", kHead);
            fail("missing operator name", kHead);
        }
        OperatorExpr out;
        if (head == "scale" || head == "dilate") {
            const double v = parse_number(head == "scale");
            out = head == "scale" ? OperatorExpr::scale(v) : OperatorExpr::dilate(v);
        } else if (head == "add" || head == "compose") {
            std::vector<OperatorExpr> items;
            items.push_back(parse_expr());
            while (true) {
                skip_ws();
                if (pos_ < text_.size() && text_[pos_] == ')') break;
                items.push_back(parse_expr());
            }
            out = head == "add" ? OperatorExpr::sum(std::move(items)) : OperatorExpr::compose(std::move(items));
        } else if (head == "sub") {
            auto a = parse_expr();
            auto b = parse_expr();
            out = OperatorExpr::sub(std::move(a), std::move(b));
        } else {
            pos_ = headPos;
            fail("unknown form '" + std::string(head) + "'", kHead);
        }
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input", "')'");
        if (text_[pos_] != ')') fail("unexpected input", "')'");
        ++pos_;
        return out;
    }

    double parse_number(bool nonnegative) {
        skip_ws();
        const std::size_t start = pos_;
        const auto w = word();
        const std::string expected = nonnegative ? "nonnegative number" : "number";
        if (w.empty()) fail(pos_ >= text_.size() ? "unexpected end of input" : "missing number", expected);
        double v = 0.0;
        auto res = std::from_chars(w.data(), w.data() + w.size(), v);
        if (res.ec != std::errc{} || res.ptr != w.data() + w.size() || !std::isfinite(v)) {
            pos_ = start;
            fail("malformed number '" + std::string(w) + "'", expected);
        }
        if (nonnegative && v < 0.0) {
            pos_ = start;
            fail("negative scale factor", expected);
        }
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

OperatorExpr OperatorExpr::parse(std::string_view text) { return Parser(text).parse_all(); }

// ---------------------------------------------------------------------------

void OperatorPolynomial::add(const Key& k, double coef) {
    if (coef == 0.0) return;
    if (std::get<0>(k) == 0.0) return;  // Phi(0 y) = 0
    auto [it, inserted] = terms_.emplace(k, coef);
    if (!inserted) {
        it->second += coef;
        if (it->second == 0.0) terms_.erase(it);
    }
}

OperatorPolynomial OperatorPolynomial::monomial(double coef, double c, int i, int j) {
    OperatorPolynomial p;
    if (i > 0 && j > 0) {
        // J^i I^j = J^{i-1} I^j - J^i I^{j-1}
        auto a = monomial(coef, c, i - 1, j);
        auto b = monomial(-coef, c, i, j - 1);
        return a + b;
    }
    p.add({c, i, j}, coef);
    return p;
}

OperatorPolynomial OperatorPolynomial::operator+(const OperatorPolynomial& o) const {
    OperatorPolynomial out = *this;
    for (const auto& [k, v] : o.terms_) out.add(k, v);
    return out;
}

OperatorPolynomial OperatorPolynomial::scaled(double s) const {
    OperatorPolynomial out;
    for (const auto& [k, v] : terms_) out.add(k, s * v);
    return out;
}

OperatorPolynomial OperatorPolynomial::operator*(const OperatorPolynomial& o) const {
    OperatorPolynomial out;
    for (const auto& [ka, va] : terms_) {
        for (const auto& [kb, vb] : o.terms_) {
            const auto [ca, ia, ja] = ka;
            const auto [cb, ib, jb] = kb;
            out = out + monomial(va * vb, ca * cb, ia + ib, ja + jb);
        }
    }
    return out;
}

OperatorPolynomial OperatorPolynomial::from_expr(const OperatorExpr& e) {
    using K = OperatorExpr::Kind;
    switch (e.kind()) {
        case K::Identity:
            return monomial(1.0, 1.0, 0, 0);
        case K::J:
            return monomial(1.0, 1.0, 1, 0);
        case K::I:
            return monomial(1.0, 1.0, 0, 1);
        case K::Scale:
            return monomial(e.value(), 1.0, 0, 0);
        case K::Dilate:
            return monomial(1.0, e.value(), 0, 0);
        case K::Sum: {
            OperatorPolynomial p;
            for (const auto& c : e.children()) p = p + from_expr(c);
            return p;
        }
        case K::Sub:
            return from_expr(e.children()[0]) + from_expr(e.children()[1]).scaled(-1.0);
        case K::Compose: {
            OperatorPolynomial p = monomial(1.0, 1.0, 0, 0);
            for (const auto& c : e.children()) p = p * from_expr(c);
            return p;
        }
    }
    return {};
}

namespace {

OperatorExpr monomial_expr(double magnitude, double c, int i, int j) {
    std::vector<OperatorExpr> f;
    if (magnitude != 1.0) f.push_back(OperatorExpr::scale(magnitude));
    for (int k = 0; k < i; ++k) f.push_back(OperatorExpr::j());
    for (int k = 0; k < j; ++k) f.push_back(OperatorExpr::i());
    if (c != 1.0) f.push_back(OperatorExpr::dilate(c));
    if (f.empty()) return OperatorExpr::identity();
    if (f.size() == 1) return f.front();
    return OperatorExpr::compose(std::move(f));
}

OperatorExpr combine(std::vector<OperatorExpr> parts) {
    if (parts.empty()) return OperatorExpr::scale(0.0);
    if (parts.size() == 1) return parts.front();
    return OperatorExpr::sum(std::move(parts));
}

}  // namespace

OperatorExpr OperatorPolynomial::to_expr() const {
    // Order: identity, J powers, I powers; undilated terms first.
    std::vector<std::pair<Key, double>> items(terms_.begin(), terms_.end());
    auto rank = [](const Key& k) {
        const auto [c, i, j] = k;
        return std::make_tuple(c != 1.0, c, j > 0, i + j);
    };
    std::stable_sort(items.begin(), items.end(),
                     [&](const auto& a, const auto& b) { return rank(a.first) < rank(b.first); });
    std::vector<OperatorExpr> pos, neg;
    for (const auto& [k, v] : items) {
        const auto [c, i, j] = k;
        (v > 0.0 ? pos : neg).push_back(monomial_expr(std::abs(v), c, i, j));
    }
    if (neg.empty()) return combine(std::move(pos));
    return OperatorExpr::sub(combine(std::move(pos)), combine(std::move(neg)));
}

OperatorExpr normalize_operator_expr(const OperatorExpr& e) { return OperatorPolynomial::from_expr(e).to_expr(); }

}  // namespace levycalc
