#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "mangeron/error.hpp"
#include "mangeron/expr.hpp"

using namespace mangeron;
using expr::Expr;
using expr::Var;

TEST(Expr, Evaluates) {
    EXPECT_DOUBLE_EQ(Expr::parse("1 + 2*x*y")(0.5, 3.0), 4.0);
    EXPECT_DOUBLE_EQ(Expr::parse("-x^2")(3.0, 0.0), -9.0);
    EXPECT_DOUBLE_EQ(Expr::parse("2^3^2")(0.0, 0.0), 512.0);
    EXPECT_NEAR(Expr::parse("sin(pi/2) + cos(0) + exp(0)")(0.0, 0.0), 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(Expr::parse("zero")(1.0, 2.0), 0.0);
    EXPECT_DOUBLE_EQ(Expr::parse("1.5e-1*x")(2.0, 0.0), 0.3);
}

TEST(Expr, SymbolicDerivatives) {
    const Expr e = Expr::parse("x^2*sin(y) + exp(x*y)");
    const double x = 0.3, y = 0.7;
    EXPECT_NEAR(e.derivative(Var::X)(x, y), 2.0 * x * std::sin(y) + y * std::exp(x * y), 1e-14);
    EXPECT_NEAR(e.derivative(Var::Y).derivative(Var::Y)(x, y), -x * x * std::sin(y) + x * x * std::exp(x * y),
                1e-14);
    EXPECT_FALSE(Expr::parse("3*y").depends_on(Var::X));
    EXPECT_TRUE(Expr::parse("2 + 3").is_constant());
}

TEST(Expr, StrRoundTrips) {
    const Expr e = Expr::parse("-(x - 2)^2/(1 + y) * cos(x)");
    const Expr back = Expr::parse(e.str());
    for (double x : {0.0, 0.4, 1.3}) {
        for (double y : {0.0, 0.9}) EXPECT_NEAR(back(x, y), e(x, y), 1e-14);
    }
}

TEST(Expr, Errors) {
    EXPECT_THROW(Expr::parse("z + 1"), ParseError);
    EXPECT_THROW(Expr::parse("x^y"), ParseError);
    EXPECT_THROW(Expr::parse("sin(x"), ParseError);
    EXPECT_THROW(Expr::parse(""), ParseError);
    EXPECT_THROW(expr::parse_field("piecewise([0.5], [], 1)"), ParseError);
}

TEST(Expr, PiecewiseField) {
    const Field2D f = expr::make_field2d("piecewise([0.5], [0.25], 1, 2, x, y)", Smoothness::Lp);
    EXPECT_EQ(f(0.1, 0.1), 1.0);
    EXPECT_EQ(f(0.1, 0.9), 2.0);
    EXPECT_DOUBLE_EQ(f(0.8, 0.1), 0.8);
    EXPECT_DOUBLE_EQ(f(0.8, 0.9), 0.9);
    EXPECT_EQ(f(0.5, 0.25), 1.0);
    ASSERT_EQ(f.x_breakpoints().size(), 1u);
    EXPECT_EQ(f.x_breakpoints()[0], 0.5);
    const Field2D g = expr::make_field2d("piecewise([0.5], [], 1, 2)", Smoothness::Lp);
    EXPECT_EQ(g(0.7, 0.3), 2.0);
    EXPECT_TRUE(g.y_breakpoints().empty());
}

TEST(Expr, Field1DCarriesDerivatives) {
    const Field1D f = expr::make_field1d("sin(2*y)", Var::Y);
    ASSERT_TRUE(f.has_derivatives());
    EXPECT_NEAR(f.derivative(1)(0.3), 2.0 * std::cos(0.6), 1e-14);
    EXPECT_NEAR(f.derivative(2)(0.3), -4.0 * std::sin(0.6), 1e-14);
    EXPECT_THROW(expr::make_field1d("x + y", Var::Y), ParseError);
    EXPECT_THROW(expr::make_field1d("piecewise([0.5], [], 1, 2)", Var::X), ParseError);
}
