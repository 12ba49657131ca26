#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mangeron/error.hpp"
#include "mangeron/expr.hpp"
#include "mangeron/mms.hpp"
#include "mangeron/problem_data.hpp"

using namespace mangeron;

namespace {

Field1D fx(const char* text) { return expr::make_field1d(text, expr::Var::X); }
Field1D fy(const char* text) { return expr::make_field1d(text, expr::Var::Y); }

// Traces of u = x + y on the unit square.
ClassicalData linear_traces() {
    ClassicalData cd;
    cd.phi1 = fy("y");
    cd.phi2 = fy("1 + y");
    cd.psi1 = fx("x");
    cd.psi2 = fx("1 + x");
    return cd;
}

double max_abs_diff(const Field1D& a, const Field1D& b, const Axis& axis) {
    double m = 0.0;
    for (double t : axis.nodes()) m = std::max(m, std::abs(a(t) - b(t)));
    return m;
}

}  // namespace

TEST(ClassicalToNonclassical, LinearTraces) {
    const NonclassicalData z = classical_to_nonclassical(linear_traces(), Domain(1.0, 1.0));
    EXPECT_DOUBLE_EQ(z.z00, 0.0);
    EXPECT_DOUBLE_EQ(z.z10, 1.0);
    EXPECT_DOUBLE_EQ(z.z01, 1.0);
    EXPECT_DOUBLE_EQ(z.z00_h1, 1.0);
    EXPECT_DOUBLE_EQ(z.z01_h1, 1.0);
    EXPECT_DOUBLE_EQ(z.z00_h2, 1.0);
    EXPECT_DOUBLE_EQ(z.z10_h2, 1.0);
    for (double t : {0.0, 0.3, 1.0}) {
        EXPECT_EQ(z.z20(t), 0.0);
        EXPECT_EQ(z.z02(t), 0.0);
        EXPECT_EQ(z.z02_h1(t), 0.0);
        EXPECT_EQ(z.z20_h2(t), 0.0);
    }
}

TEST(ClassicalToNonclassical, SampledLinearTracesUseDifferences) {
    const Axis a = build_axis(1.0, 11);
    auto sampled = [&](double c) {
        std::vector<double> v;
        for (double t : a.nodes()) v.push_back(c + t);
        return Field1D::samples(std::vector<double>(a.nodes().begin(), a.nodes().end()), v);
    };
    ClassicalData cd{sampled(0.0), sampled(1.0), sampled(0.0), sampled(1.0)};
    const NonclassicalData z = classical_to_nonclassical(cd, Domain(1.0, 1.0), kCornerTolSampled);
    EXPECT_NEAR(z.z10, 1.0, 1e-10);
    EXPECT_NEAR(z.z01_h1, 1.0, 1e-10);
    EXPECT_NEAR(z.z20(0.5), 0.0, 1e-9);
}

TEST(ClassicalToNonclassical, ZeroTracesGiveZero) {
    ClassicalData cd{Field1D::constant(0.0), Field1D::constant(0.0), Field1D::constant(0.0),
                     Field1D::constant(0.0)};
    const NonclassicalData z = classical_to_nonclassical(cd, Domain(1.0, 1.0));
    EXPECT_EQ(z.z00, 0.0);
    EXPECT_EQ(z.z10_h2, 0.0);
    EXPECT_EQ(z.z02_h1(0.4), 0.0);
}

TEST(ClassicalToNonclassical, CornerMismatchThrows) {
    ClassicalData cd = linear_traces();
    cd.psi1 = fx("0.5 + x");
    try {
        classical_to_nonclassical(cd, Domain(1.0, 1.0));
        FAIL() << "expected CornerMismatchError";
    } catch (const CornerMismatchError& e) {
        EXPECT_NEAR(e.residual(), 0.5, 1e-15);
    }
}

TEST(NonclassicalToClassical, Examples) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 21, 21);
    NonclassicalData z;
    z.z01 = 1.0;
    z.z20 = Field1D::constant(0.0);
    z.z02 = Field1D::constant(0.0);
    z.z02_h1 = Field1D::constant(0.0);
    z.z20_h2 = Field1D::constant(2.0);
    z.z00_h2 = 1.0;
    z.z10_h2 = 2.0;
    const ClassicalData cd = nonclassical_to_classical(z, g);
    for (double y : g.y().nodes()) EXPECT_NEAR(cd.phi1(y), y, 1e-15);
    // ψ2 = 1 + 2x + x²: the moment of a constant is integrated exactly.
    for (double x : g.x().nodes()) EXPECT_NEAR(cd.psi2(x), 1.0 + 2.0 * x + x * x, 1e-14);

    const ClassicalData zero = nonclassical_to_classical(NonclassicalData::zero(), g);
    for (double t : g.x().nodes()) EXPECT_EQ(zero.psi1(t), 0.0);
}

TEST(CheckMatching, Examples) {
    const CheckReport ok = check_matching(linear_traces(), Domain(1.0, 1.0), 1e-12);
    EXPECT_TRUE(ok.passed);
    EXPECT_EQ(ok.max_residual(), 0.0);

    ClassicalData bad = linear_traces();
    bad.phi2 = fy("5 + y");  // φ2(0) = 5 ≠ ψ1(h1) = 1, φ2(h2) = 6 ≠ ψ2(h1) = 2
    const CheckReport r = check_matching(bad, Domain(1.0, 1.0), 1e-12);
    EXPECT_FALSE(r.passed);
    EXPECT_NEAR(r.residual("phi2(0)=psi1(h1)"), 4.0, 1e-15);
    EXPECT_NEAR(r.residual("phi2(h2)=psi2(h1)"), 4.0, 1e-15);
    EXPECT_EQ(r.residual("phi1(0)=psi1(0)"), 0.0);
}

TEST(CheckMatching, RandomDataWithinQuadratureError) {
    std::mt19937_64 rng(2024);
    const Grid2D g = build_grid(Domain(1.0, 1.5), 17, 13);
    for (int trial = 0; trial < 20; ++trial) {
        const NonclassicalData z = random_admissible_data(g.domain(), rng);
        const auto est = matching_quadrature_error(z, g);
        const CheckReport r = check_matching(nonclassical_to_classical(z, g), g.domain(), 0.0);
        for (std::size_t k = 0; k < 4; ++k) {
            EXPECT_LE(r.residuals[k].second, 10.0 * est[k] + 1e-13) << r.residuals[k].first;
        }
    }
}

TEST(DataConstraints, Examples) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 9, 9);
    const NonclassicalData lin = classical_to_nonclassical(linear_traces(), g.domain());
    EXPECT_EQ(check_data_constraints(lin, g, 1e-12).max_residual(), 0.0);
    EXPECT_TRUE(check_data_constraints(NonclassicalData::zero(), g, 1e-12).passed);

    NonclassicalData z;
    z.z00_h1 = 1.0;
    const CheckReport r = check_data_constraints(z, g, 1e-12);
    EXPECT_FALSE(r.passed);
    EXPECT_DOUBLE_EQ(r.residual("u(h1,0)"), 1.0);
    EXPECT_EQ(r.residual("far_corner"), 0.0);

    // u_y(h1,0) inconsistent with u_x(0,h2): only the far-corner row fails.
    NonclassicalData f;
    f.z01_h1 = 0.25;
    const CheckReport rf = check_data_constraints(f, g, 1e-12);
    EXPECT_NEAR(rf.residual("far_corner"), 0.25, 1e-15);
    EXPECT_EQ(rf.residual("u(0,h2)"), 0.0);
}

TEST(DataConstraints, RandomAdmissiblePassCalibratedTolerance) {
    std::mt19937_64 rng(5);
    const Grid2D g = build_grid(Domain(1.2, 0.8), 21, 17);
    for (int trial = 0; trial < 20; ++trial) {
        const NonclassicalData z = random_admissible_data(g.domain(), rng);
        const double tol = calibrated_tolerance(z, g);
        EXPECT_GT(tol, 0.0);
        EXPECT_TRUE(check_data_constraints(z, g, tol).passed);
    }
}

TEST(RoundTrip, SecondOrderBothWays) {
    std::mt19937_64 rng(99);
    const Domain d(1.0, 1.0);
    const AdmissibleSample s = random_admissible_sample(d, rng);
    double prev_a = 0.0, prev_b = 0.0;
    for (std::size_t n : {17, 33, 65}) {
        const Grid2D g = build_grid(d, n, n);
        // Z → classical samples → Z, compared on the second-derivative traces.
        const NonclassicalData back = classical_to_nonclassical(nonclassical_to_classical(s.z, g), d, kCornerTolSampled);
        const double ea = std::max({max_abs_diff(back.z20, s.z.z20, g.x()), max_abs_diff(back.z02_h1, s.z.z02_h1, g.y()),
                                    std::abs(back.z10_h2 - s.z.z10_h2), std::abs(back.z01 - s.z.z01)});
        // classical → Z → classical samples, compared on the traces.
        const ClassicalData cb = nonclassical_to_classical(classical_to_nonclassical(s.classical, d), g);
        const double eb = std::max({max_abs_diff(cb.phi1, s.classical.phi1, g.y()),
                                    max_abs_diff(cb.phi2, s.classical.phi2, g.y()),
                                    max_abs_diff(cb.psi1, s.classical.psi1, g.x()),
                                    max_abs_diff(cb.psi2, s.classical.psi2, g.x())});
        if (prev_a > 0.0) {
            EXPECT_GE(std::log2(prev_a / ea), 1.9);
            EXPECT_GE(std::log2(prev_b / eb), 1.9);
        }
        prev_a = ea;
        prev_b = eb;
    }
}

TEST(Combine, IsLinear) {
    std::mt19937_64 rng(3);
    const Domain d(1.0, 1.0);
    const NonclassicalData a = random_admissible_data(d, rng), b = random_admissible_data(d, rng);
    const NonclassicalData c = combine(2.0, a, -0.5, b);
    EXPECT_NEAR(c.z10_h2, 2.0 * a.z10_h2 - 0.5 * b.z10_h2, 1e-15);
    EXPECT_NEAR(c.z20(0.3), 2.0 * a.z20(0.3) - 0.5 * b.z20(0.3), 1e-14);
    EXPECT_NEAR(c.z02_h1.derivative(2)(0.7), 2.0 * a.z02_h1.derivative(2)(0.7) - 0.5 * b.z02_h1.derivative(2)(0.7),
                1e-13);
}

TEST(Ep22, Examples) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 9, 9);
    EXPECT_EQ(ep22_norm(NonclassicalData::zero(), g, NormSpec(2.0)), 0.0);
    NonclassicalData z;
    z.z00 = -2.0;
    EXPECT_DOUBLE_EQ(ep22_norm(z, g, NormSpec(2.0)), 2.0);
    z = NonclassicalData::zero();
    z.z20 = Field1D::constant(1.0);
    EXPECT_NEAR(ep22_norm(z, g, NormSpec(1.0)), 1.0, 1e-15);
}
