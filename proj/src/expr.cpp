#include "mangeron/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "mangeron/error.hpp"

namespace mangeron::expr {

enum class Op { Const, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp };

struct Expr::Node {
    Op op;
    double value = 0.0;
    std::shared_ptr<const Node> a;
    std::shared_ptr<const Node> b;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

NodePtr make(Op op, NodePtr a = nullptr, NodePtr b = nullptr, double value = 0.0) {
    auto n = std::make_shared<Expr::Node>();
    n->op = op;
    n->value = value;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr constant(double c) { return make(Op::Const, nullptr, nullptr, c); }

bool is_const(const NodePtr& n, double c) { return n->op == Op::Const && n->value == c; }
bool is_const(const NodePtr& n) { return n->op == Op::Const; }

double eval(const Expr::Node& n, double x, double y) {
    switch (n.op) {
        case Op::Const: return n.value;
        case Op::VarX: return x;
        case Op::VarY: return y;
        case Op::Neg: return -eval(*n.a, x, y);
        case Op::Add: return eval(*n.a, x, y) + eval(*n.b, x, y);
        case Op::Sub: return eval(*n.a, x, y) - eval(*n.b, x, y);
        case Op::Mul: return eval(*n.a, x, y) * eval(*n.b, x, y);
        case Op::Div: return eval(*n.a, x, y) / eval(*n.b, x, y);
        case Op::Pow: return std::pow(eval(*n.a, x, y), eval(*n.b, x, y));
        case Op::Sin: return std::sin(eval(*n.a, x, y));
        case Op::Cos: return std::cos(eval(*n.a, x, y));
        case Op::Exp: return std::exp(eval(*n.a, x, y));
    }
    return 0.0;
}

// Constructors with light constant folding so derivatives stay readable.
NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return constant(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make(Op::Add, std::move(a), std::move(b));
}

NodePtr neg(NodePtr a) {
    if (is_const(a)) return constant(-a->value);
    if (a->op == Op::Neg) return a->a;
    return make(Op::Neg, std::move(a));
}

NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return constant(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return neg(std::move(b));
    return make(Op::Sub, std::move(a), std::move(b));
}

NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return constant(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make(Op::Mul, std::move(a), std::move(b));
}

NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return constant(a->value / b->value);
    if (is_const(a, 0.0)) return constant(0.0);
    if (is_const(b, 1.0)) return a;
    return make(Op::Div, std::move(a), std::move(b));
}

NodePtr pow_(NodePtr a, NodePtr b) {
    if (is_const(a) && is_const(b)) return constant(std::pow(a->value, b->value));
    if (is_const(b, 0.0)) return constant(1.0);
    if (is_const(b, 1.0)) return a;
    return make(Op::Pow, std::move(a), std::move(b));
}

NodePtr func(Op op, NodePtr a) {
    if (is_const(a)) return constant(eval(*make(op, a), 0.0, 0.0));
    return make(op, std::move(a));
}

bool depends(const Expr::Node& n, Op var) {
    if (n.op == var) return true;
    return (n.a && depends(*n.a, var)) || (n.b && depends(*n.b, var));
}

NodePtr diff(const NodePtr& n, Op var) {
    switch (n->op) {
        case Op::Const: return constant(0.0);
        case Op::VarX:
        case Op::VarY: return constant(n->op == var ? 1.0 : 0.0);
        case Op::Neg: return neg(diff(n->a, var));
        case Op::Add: return add(diff(n->a, var), diff(n->b, var));
        case Op::Sub: return sub(diff(n->a, var), diff(n->b, var));
        case Op::Mul: return add(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var)));
        case Op::Div:
            return div(sub(mul(diff(n->a, var), n->b), mul(n->a, diff(n->b, var))), pow_(n->b, constant(2.0)));
        case Op::Pow:
            // exponent is variable-free (checked at parse time)
            return mul(mul(n->b, pow_(n->a, sub(n->b, constant(1.0)))), diff(n->a, var));
        case Op::Sin: return mul(func(Op::Cos, n->a), diff(n->a, var));
        case Op::Cos: return neg(mul(func(Op::Sin, n->a), diff(n->a, var)));
        case Op::Exp: return mul(n, diff(n->a, var));
    }
    return constant(0.0);
}

int precedence(Op op) {
    switch (op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        default: return 5;
    }
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print(const Expr::Node& n) {
    auto wrap = [](const Expr::Node& child, int min_prec) {
        std::string s = print(child);
        int p = precedence(child.op);
        if (child.op == Op::Const && child.value < 0) p = 3;
        return p < min_prec ? "(" + s + ")" : s;
    };
    switch (n.op) {
        case Op::Const: return format_number(n.value);
        case Op::VarX: return "x";
        case Op::VarY: return "y";
        case Op::Neg: return "-" + wrap(*n.a, 4);
        case Op::Add: return wrap(*n.a, 1) + " + " + wrap(*n.b, 2);
        case Op::Sub: return wrap(*n.a, 1) + " - " + wrap(*n.b, 2);
        case Op::Mul: return wrap(*n.a, 2) + "*" + wrap(*n.b, 3);
        case Op::Div: return wrap(*n.a, 2) + "/" + wrap(*n.b, 3);
        case Op::Pow: return wrap(*n.a, 5) + "^" + wrap(*n.b, 5);
        case Op::Sin: return "sin(" + print(*n.a) + ")";
        case Op::Cos: return "cos(" + print(*n.a) + ")";
        case Op::Exp: return "exp(" + print(*n.a) + ")";
    }
    return "?";
}

// ---------------------------------------------------------------- parser

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    NodePtr parse_all() {
        NodePtr n = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        return n;
    }

    bool try_keyword(std::string_view kw) {
        skip_ws();
        if (s_.substr(pos_, kw.size()) != kw) return false;
        const std::size_t end = pos_ + kw.size();
        if (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_')) return false;
        pos_ = end;
        return true;
    }

    void expect(char c) {
        skip_ws();
        if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
        ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    double parse_number_literal() {
        skip_ws();
        const char* begin = s_.data() + pos_;
        std::string tmp(s_.substr(pos_));
        char* endp = nullptr;
        const double v = std::strtod(tmp.c_str(), &endp);
        if (endp == tmp.c_str()) fail("expected a number");
        pos_ += static_cast<std::size_t>(endp - tmp.c_str());
        (void)begin;
        return v;
    }

    std::vector<double> parse_number_list() {
        std::vector<double> out;
        expect('[');
        if (accept(']')) return out;
        do {
            bool negative = accept('-');
            double v = parse_number_literal();
            out.push_back(negative ? -v : v);
        } while (accept(','));
        expect(']');
        return out;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        while (true) {
            if (accept('+')) lhs = add(lhs, parse_term());
            else if (accept('-')) lhs = sub(lhs, parse_term());
            else return lhs;
        }
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("expression '" + std::string(s_) + "': " + msg + " at position " + std::to_string(pos_));
    }

    bool at_end() {
        skip_ws();
        return pos_ == s_.size();
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        while (true) {
            if (accept('*')) lhs = mul(lhs, parse_unary());
            else if (accept('/')) lhs = div(lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return neg(parse_unary());
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) {
            NodePtr e = parse_unary();
            if (depends(*e, Op::VarX) || depends(*e, Op::VarY)) fail("exponent must not depend on x or y");
            return pow_(base, e);
        }
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return constant(parse_number_literal());
        if (accept('(')) {
            NodePtr n = parse_expr();
            expect(')');
            return n;
        }
        if (try_keyword("x")) return make(Op::VarX);
        if (try_keyword("y")) return make(Op::VarY);
        if (try_keyword("pi")) return constant(std::numbers::pi);
        if (try_keyword("zero")) return constant(0.0);
        for (auto [name, op] : {std::pair{"sin", Op::Sin}, std::pair{"cos", Op::Cos}, std::pair{"exp", Op::Exp}}) {
            if (try_keyword(name)) {
                expect('(');
                NodePtr arg = parse_expr();
                expect(')');
                return func(op, arg);
            }
        }
        fail("unknown token");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expr::Expr() : node_(constant(0.0)) {}
Expr::Expr(double c) : node_(constant(c)) {}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse_all()); }

Expr Expr::variable(Var v) { return Expr(make(v == Var::X ? Op::VarX : Op::VarY)); }

double Expr::operator()(double x, double y) const { return eval(*node_, x, y); }

Expr Expr::derivative(Var v) const { return Expr(diff(node_, v == Var::X ? Op::VarX : Op::VarY)); }

bool Expr::depends_on(Var v) const { return depends(*node_, v == Var::X ? Op::VarX : Op::VarY); }

std::string Expr::str() const { return print(*node_); }

Expr operator+(const Expr& a, const Expr& b) { return Expr(add(a.node(), b.node())); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(sub(a.node(), b.node())); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(mul(a.node(), b.node())); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(div(a.node(), b.node())); }
Expr operator-(const Expr& a) { return Expr(neg(a.node())); }

FieldExpr parse_field(std::string_view text) {
    FieldExpr out;
    out.text = std::string(text);
    Parser p(text);
    if (p.try_keyword("piecewise")) {
        out.piecewise = true;
        p.expect('(');
        out.pieces.x_breaks = p.parse_number_list();
        p.expect(',');
        out.pieces.y_breaks = p.parse_number_list();
        while (p.accept(',')) out.pieces.cells.emplace_back(p.parse_expr());
        p.expect(')');
        if (!p.at_end()) p.fail("trailing input after piecewise(...)");
        const std::size_t want = (out.pieces.x_breaks.size() + 1) * (out.pieces.y_breaks.size() + 1);
        if (out.pieces.cells.size() != want) {
            p.fail("piecewise needs " + std::to_string(want) + " cell expressions, got " +
                   std::to_string(out.pieces.cells.size()));
        }
        return out;
    }
    out.plain = Expr::parse(text);
    return out;
}

Field2D make_field2d(std::string_view text, Smoothness tag) {
    FieldExpr f = parse_field(text);
    if (f.piecewise) {
        std::vector<Field2D::Fn> cells;
        for (const Expr& e : f.pieces.cells) cells.emplace_back([e](double x, double y) { return e(x, y); });
        return Field2D::piecewise(f.pieces.x_breaks, f.pieces.y_breaks, std::move(cells), tag, f.text);
    }
    const auto& n = f.plain.node();
    if (n->op == Op::Const) return Field2D::constant(n->value, tag);
    Expr e = f.plain;
    return Field2D::analytic([e](double x, double y) { return e(x, y); }, tag, f.text);
}

Field1D make_field1d(std::string_view text, Var v) {
    FieldExpr f = parse_field(text);
    if (f.piecewise) throw ParseError("expression '" + f.text + "': piecewise is only allowed for 2D fields");
    const Var other = v == Var::X ? Var::Y : Var::X;
    if (f.plain.depends_on(other)) {
        throw ParseError("expression '" + f.text + "' depends on " + (other == Var::X ? "x" : "y") +
                         " but is a function of " + (v == Var::X ? "x" : "y"));
    }
    const Expr e0 = f.plain;
    const Expr e1 = e0.derivative(v);
    const Expr e2 = e1.derivative(v);
    auto bind = [v](Expr e) -> Field1D::Fn {
        if (v == Var::X) return [e](double t) { return e(t, 0.0); };
        return [e](double t) { return e(0.0, t); };
    };
    return Field1D::analytic(bind(e0), bind(e1), bind(e2), f.text);
}

}  // namespace mangeron::expr
