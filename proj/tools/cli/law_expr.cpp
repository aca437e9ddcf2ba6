#include "cli/law_expr.hpp"

#include <cctype>
#include <cmath>
#include <charconv>
#include <vector>

#include <levycalc/json_io.hpp>

namespace levycalc::cli {

namespace {

struct Value {
    enum class Kind { Number, List, Tuple, Text };
    Kind kind = Kind::Number;
    double number = 0.0;
    std::vector<Value> items;
    std::string text;
    std::string key;
    std::size_t column = 1;
};

class Parser {
public:
    explicit Parser(std::string_view s) : s_(s) {}

    std::pair<std::string, std::vector<Value>> call() {
        skip();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        if (pos_ == start) fail("expected a law name", "stable, laplace, gaussian, gamma, cpoisson or triplet");
        std::string name(s_.substr(start, pos_ - start));
        expect('(');
        std::vector<Value> args;
        skip();
        if (peek() != ')') {
            args.push_back(value());
            while (skip(), peek() == ',') {
                ++pos_;
                args.push_back(value());
            }
        }
        expect(')');
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input", "end of input");
        return {name, args};
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    [[noreturn]] void fail(const std::string& msg, const std::string& expected) const {
        throw ParseError(msg, pos_ + 1, expected);
    }
    void expect(char c) {
        skip();
        if (peek() != c) fail(std::string("expected '") + c + "'", std::string("'") + c + "'");
        ++pos_;
    }

    Value sequence(char close, Value::Kind kind) {
        Value v;
        v.kind = kind;
        v.column = pos_ + 1;
        ++pos_;
        skip();
        if (peek() != close) {
            v.items.push_back(value());
            while (skip(), peek() == ',') {
                ++pos_;
                v.items.push_back(value());
            }
        }
        expect(close);
        return v;
    }

    Value value() {
        skip();
        const char c = peek();
        if (c == '[') return sequence(']', Value::Kind::List);
        if (c == '(') return sequence(')', Value::Kind::Tuple);
        if (c == '"') {
            Value v;
            v.kind = Value::Kind::Text;
            v.column = pos_ + 1;
            const auto end = s_.find('"', pos_ + 1);
            if (end == std::string_view::npos) fail("unterminated string", "'\"'");
            v.text = std::string(s_.substr(pos_ + 1, end - pos_ - 1));
            pos_ = end + 1;
            return v;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string key(s_.substr(start, pos_ - start));
            skip();
            if (peek() != '=') {
                pos_ = start;
                fail("expected a number", "number, list or key=value");
            }
            ++pos_;
            skip();
            Value v;
            if (peek() == '"') {
                v = value();
            } else {
                v.kind = Value::Kind::Text;
                v.column = pos_ + 1;
                const std::size_t vs = pos_;
                while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ')') ++pos_;
                v.text = std::string(s_.substr(vs, pos_ - vs));
                while (!v.text.empty() && std::isspace(static_cast<unsigned char>(v.text.back()))) v.text.pop_back();
            }
            v.key = key;
            return v;
        }
        Value v;
        v.column = pos_ + 1;
        const char* first = s_.data() + pos_;
        const char* last = s_.data() + s_.size();
        if (*first == '+') ++first;
        const auto [ptr, ec] = std::from_chars(first, last, v.number);
        if (ec != std::errc{}) fail("expected a number", "number, list or key=value");
        pos_ = static_cast<std::size_t>(ptr - s_.data());
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

double number(const Value& v, const std::string& what) {
    if (v.kind != Value::Kind::Number) throw ParseError(what + " must be a number", v.column, "number");
    return v.number;
}

Vec point(const Value& v) {
    if (v.kind == Value::Kind::Number) return Vec::Constant(1, v.number);
    if (v.kind != Value::Kind::List || v.items.empty()) throw ParseError("jump must be a number or a list", v.column, "number or [..]");
    Vec x(static_cast<int>(v.items.size()));
    for (std::size_t i = 0; i < v.items.size(); ++i) x[static_cast<int>(i)] = number(v.items[i], "jump coordinate");
    return x;
}

void arity(const std::string& name, const std::vector<Value>& args, std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi) {
        throw InvalidArgument(name + " takes " + (lo == hi ? std::to_string(lo) : std::to_string(lo) + " to " + std::to_string(hi)) +
                              " arguments, got " + std::to_string(args.size()));
    }
}

Vec e1(int d) {
    Vec u = Vec::Zero(d);
    u[0] = 1.0;
    return u;
}

}  // namespace

Law parse_law(std::string_view text, const QuadratureConfig& cfg) {
    auto [name, args] = Parser(text).call();
    Law law{std::string(text), Exponent(1), std::nullopt};
    if (name == "stable") {
        arity(name, args, 2, 3);
        const double p = number(args[0], "p"), scale = number(args[1], "scale");
        const double d = args.size() == 3 ? number(args[2], "d") : 1.0;
        if (!(p > 0.0 && p < 2.0)) throw InvalidArgument("stable index p must lie in (0, 2)");
        if (!(scale > 0.0)) throw InvalidArgument("stable scale must be positive");
        if (!(d >= 1.0) || d != std::floor(d) || d > 64) throw InvalidArgument("dimension must be a positive integer");
        const int dim = static_cast<int>(d);
        std::vector<SpectralPoint> sp;
        for (int k = 0; k < dim; ++k) {
            Vec u = Vec::Zero(dim);
            u[k] = 1.0;
            sp.push_back({u, scale});
        }
        law.exponent = Exponent::stable(p, sp);
    } else if (name == "laplace") {
        arity(name, args, 0, 0);
        law.exponent = Exponent::laplace(e1(1));
    } else if (name == "gaussian") {
        arity(name, args, 1, 1);
        const double s2 = number(args[0], "sigma2");
        if (!(s2 >= 0.0) || !std::isfinite(s2)) throw InvalidArgument("sigma2 must be nonnegative");
        law.exponent = Exponent::gaussian(Mat::Constant(1, 1, s2));
    } else if (name == "gamma") {
        arity(name, args, 2, 2);
        const double shape = number(args[0], "shape"), rate = number(args[1], "rate");
        if (!(shape > 0.0) || !(rate > 0.0)) throw InvalidArgument("gamma needs shape > 0 and rate > 0");
        law.exponent = Exponent::gamma(shape, rate, e1(1));
    } else if (name == "cpoisson") {
        arity(name, args, 2, 2);
        const double lambda = number(args[0], "lambda");
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("cpoisson intensity must be positive");
        if (args[1].kind != Value::Kind::List || args[1].items.empty()) {
            throw ParseError("cpoisson needs a list of (x, w) pairs", args[1].column, "[(x, w), ...]");
        }
        std::vector<Atom> atoms;
        int dim = 0;
        for (const auto& it : args[1].items) {
            if (it.kind != Value::Kind::Tuple || it.items.size() != 2) throw ParseError("expected a pair (x, w)", it.column, "(x, w)");
            Vec x = point(it.items[0]);
            const double w = number(it.items[1], "weight");
            if (!(w >= 0.0)) throw InvalidArgument("cpoisson weights must be nonnegative");
            if (dim == 0) dim = static_cast<int>(x.size());
            if (x.size() != dim) throw InvalidArgument("cpoisson jumps must share one dimension");
            if (x.norm() == 0.0) throw InvalidArgument("cpoisson jumps must be nonzero");
            atoms.push_back({x, lambda * w});
        }
        // Uncompensated: the shift undoes the compensation of jumps in the closed unit ball.
        Vec shift = Vec::Zero(dim);
        for (const auto& a : atoms) {
            if (a.x.norm() <= 1.0) shift += a.mass * a.x;
        }
        law.exponent = Exponent::from_triplet(LevyTriplet(shift, Mat::Zero(dim, dim), LevyMeasure::discrete(dim, atoms)), cfg);
    } else if (name == "triplet") {
        arity(name, args, 1, 1);
        if (args[0].kind != Value::Kind::Text || !(args[0].key.empty() || args[0].key == "file")) {
            throw ParseError("triplet needs file=path", args[0].column, "file=path");
        }
        law.exponent = Exponent::from_triplet(load_triplet(args[0].text), cfg);
    } else {
        throw ParseError("unknown law \"" + name + "\"", 1, "stable, laplace, gaussian, gamma, cpoisson or triplet");
    }
    law.triplet = law.exponent.triplet();
    return law;
}

}  // namespace levycalc::cli
