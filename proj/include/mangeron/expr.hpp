#pragma once

// A deliberately small expression language for coefficients and data.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('+' | '-') unary | power
//   power   := primary ('^' unary)?          right associative, -x^2 = -(x^2)
//   primary := number | 'x' | 'y' | 'pi' | 'zero'
//            | ('sin' | 'cos' | 'exp') '(' expr ')' | '(' expr ')'
//
// Exponents must not depend on x or y. A field may additionally be written as
//
//   piecewise([xb1, xb2, ...], [yb1, ...], e_00, e_01, ..., e_mn)
//
// with interior cut positions and one expression per subrectangle, x-cell
// outer. On a cut line the lower cell wins.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mangeron/core_fields.hpp"

namespace mangeron::expr {

enum class Var { X, Y };

class Expr {
public:
    struct Node;

    Expr();  // the constant 0
    explicit Expr(double c);

    static Expr parse(std::string_view text);
    static Expr variable(Var v);

    double operator()(double x, double y) const;
    Expr derivative(Var v) const;
    bool depends_on(Var v) const;
    bool is_constant() const { return !depends_on(Var::X) && !depends_on(Var::Y); }
    std::string str() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);

    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    const std::shared_ptr<const Node>& node() const { return node_; }

private:
    std::shared_ptr<const Node> node_;
};

struct PiecewiseExpr {
    std::vector<double> x_breaks;
    std::vector<double> y_breaks;
    std::vector<Expr> cells;
};

/// Either a plain expression or a piecewise one.
struct FieldExpr {
    bool piecewise = false;
    Expr plain;
    PiecewiseExpr pieces;
    std::string text;
};

FieldExpr parse_field(std::string_view text);

/// 2D field from text; smoothness tag is attached by the caller's context.
Field2D make_field2d(std::string_view text, Smoothness tag);

/// 1D field in the given variable, carrying symbolic first and second
/// derivatives. Throws ParseError if the text depends on the other variable
/// or is piecewise.
Field1D make_field1d(std::string_view text, Var v);

}  // namespace mangeron::expr
