#pragma once

// Operator expressions over {id, J, I, scaling, dilation, sum, composition}
// and their prefix s-expression syntax:
//
//   expr := id | J | I
//         | (scale x) | (dilate x)
//         | (add expr+) | (sub expr expr) | (compose expr+)
//
// (compose A B) applies B first. Normal forms are linear combinations of
// monomials D_c J^i I^j with i = 0 or j = 0, obtained with J I = I J = I - J.

#include <map>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace levycalc {

class OperatorExpr {
public:
    enum class Kind { Identity, J, I, Scale, Dilate, Sum, Sub, Compose };

    OperatorExpr() = default;

    static OperatorExpr identity();
    static OperatorExpr j();
    static OperatorExpr i();
    /// lambda * id; throws NegativeScale for lambda < 0.
    static OperatorExpr scale(double lambda);
    /// Phi -> Phi(c .).
    static OperatorExpr dilate(double c);
    static OperatorExpr sum(std::vector<OperatorExpr> terms);
    static OperatorExpr sub(OperatorExpr a, OperatorExpr b);
    static OperatorExpr compose(std::vector<OperatorExpr> factors);

    Kind kind() const { return kind_; }
    double value() const { return value_; }
    const std::vector<OperatorExpr>& children() const { return children_; }

    /// Number of nested I factors; the log-moment order the operand needs.
    int i_depth() const;

    std::string to_string() const;
    /// Throws ParseError with a 1-based column.
    static OperatorExpr parse(std::string_view text);

    friend bool operator==(const OperatorExpr& a, const OperatorExpr& b);

private:
    Kind kind_ = Kind::Identity;
    double value_ = 0.0;
    std::vector<OperatorExpr> children_;
};

/// Formal linear combination of monomials D_c J^i I^j, keyed by (c, i, j).
class OperatorPolynomial {
public:
    using Key = std::tuple<double, int, int>;

    static OperatorPolynomial from_expr(const OperatorExpr& e);
    static OperatorPolynomial monomial(double coef, double c, int i, int j);

    OperatorPolynomial operator+(const OperatorPolynomial& o) const;
    OperatorPolynomial operator*(const OperatorPolynomial& o) const;
    OperatorPolynomial scaled(double s) const;

    const std::map<Key, double>& terms() const { return terms_; }
    OperatorExpr to_expr() const;

private:
    void add(const Key& k, double coef);
    std::map<Key, double> terms_;
};

/// Canonical form: J I adjacencies removed, scalars merged, dilations innermost.
OperatorExpr normalize_operator_expr(const OperatorExpr& e);

/// Shortest round-trip decimal representation.
std::string format_double(double x);

}  // namespace levycalc
