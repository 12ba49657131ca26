#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mangeron/error.hpp"
#include "mangeron/expr.hpp"
#include "mangeron/mms.hpp"
#include "mangeron/reduction.hpp"
#include "mangeron/solver.hpp"

using namespace mangeron;

namespace {

SolutionBundle exact_bundle(const ExactSolution& u, const Grid2D& g) {
    SolutionBundle b;
    auto comps = b.by_order();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) *comps[static_cast<std::size_t>(3 * i + j)] = u.sample(g, i, j);
    }
    return b;
}

Field2D field(const char* text, const char* name) {
    return expr::make_field2d(text, Coefficients::required_class(name));
}

}  // namespace

TEST(B0, Examples) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 21, 21);
    const B0Bundle zero = assemble_B0(NonclassicalData::zero(), g);
    for (double v : zero.b0.values) EXPECT_EQ(v, 0.0);

    NonclassicalData z;
    z.z00 = 1.0;
    z.z10 = 2.0;
    const B0Bundle lin = assemble_B0(z, g);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) EXPECT_NEAR(lin.b0.at(i, j), 1.0 + 2.0 * g.x().node(i), 1e-15);
    }

    // z20 ≡ 2: the moment integrand is linear, so B0 = x² exactly.
    NonclassicalData q;
    q.z20 = Field1D::constant(2.0);
    const B0Bundle b = assemble_B0(q, g);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double x = g.x().node(i);
            EXPECT_NEAR(b.b0.at(i, j), x * x, 1e-14);
            EXPECT_NEAR(b.b0_x.at(i, j), 2.0 * x, 1e-14);
            EXPECT_EQ(b.b0_xx.at(i, j), 2.0);
            EXPECT_EQ(b.b0_yy.at(i, j), 0.0);
        }
    }
}

TEST(B0, SecondDerivativesAreTraces) {
    std::mt19937_64 rng(12);
    const Grid2D g = build_grid(Domain(1.0, 2.0), 9, 13);
    const NonclassicalData z = random_admissible_data(g.domain(), rng);
    const B0Bundle b = assemble_B0(z, g);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            EXPECT_EQ(b.b0_xx.at(i, j), z.z20(g.x().node(i)));
            EXPECT_EQ(b.b0_yy.at(i, j), z.z02(g.y().node(j)));
        }
    }
}

TEST(V22, Examples) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 9, 9);
    const ExactSolution xy = mms_case("bilinear").u_star;
    Coefficients a;
    a.a11 = field("1", "a11");
    for (double v : apply_V22(a, exact_bundle(xy, g)).values) EXPECT_DOUBLE_EQ(v, 1.0);

    const ExactSolution x2y2 = mms_case("biquadratic").u_star;
    for (double v : apply_V22(Coefficients::zero(), exact_bundle(x2y2, g)).values) EXPECT_DOUBLE_EQ(v, 4.0);

    Coefficients b;
    b.a00 = field("1", "a00");
    const GridFn2D r = apply_V22(b, exact_bundle(x2y2, g));
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double x = g.x().node(i), y = g.y().node(j);
            EXPECT_NEAR(r.at(i, j), 4.0 + x * x * y * y, 1e-15);
        }
    }
}

TEST(Rtilde, Examples) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 9, 9);
    PdeProblem p;
    p.z22 = expr::make_field2d("x*y + 3", Smoothness::Lp);
    const GridFn2D r = compute_Rtilde(p, assemble_B0(p.data, g));
    for (std::size_t n = 0; n < g.size(); ++n) EXPECT_EQ(r.values[n], p.z22.sample(g).values[n]);

    PdeProblem zero;
    for (double v : compute_Rtilde(zero, assemble_B0(zero.data, g)).values) EXPECT_EQ(v, 0.0);
}

TEST(Rtilde, AgreesWithClosedFormB0) {
    // B0 with closed-form moments of the random traces; R̃ differs only by
    // quadrature error, which shrinks at second order.
    std::mt19937_64 rng(31);
    const Domain d(1.0, 1.0);
    const Trace t20 = Trace::random(rng), t02 = Trace::random(rng);
    PdeProblem p;
    p.coeffs = random_smooth_coefficients(rng, 0.5);
    p.z22 = random_rhs(rng);
    p.data.z00 = 0.3;
    p.data.z10 = -0.2;
    p.data.z01 = 0.7;
    p.data.z20 = t20.field();
    p.data.z02 = t02.field();
    double prev = 0.0;
    for (std::size_t n : {9, 17, 33}) {
        const Grid2D g = build_grid(d, n, n);
        const GridFn2D r = compute_Rtilde(p, assemble_B0(p.data, g));
        double e = 0.0;
        for (std::size_t j = 0; j < g.ny(); ++j) {
            for (std::size_t i = 0; i < g.nx(); ++i) {
                const double x = g.x().node(i), y = g.y().node(j);
                const auto& c = p.coeffs;
                const double b0 = 0.3 - 0.2 * x + 0.7 * y + t20.moment(x) + t02.moment(y);
                const double ref = p.z22(x, y) - (c.a20(x, y) * t20(x) + c.a02(x, y) * t02(y) +
                                                  c.a10(x, y) * (-0.2 + t20.integral(x)) +
                                                  c.a01(x, y) * (0.7 + t02.integral(y)) + c.a00(x, y) * b0);
                e = std::max(e, std::abs(r.at(i, j) - ref));
            }
        }
        if (prev > 0.0) {
            EXPECT_GE(std::log2(prev / e), 1.9);
        }
        prev = e;
    }
}

TEST(KernelSet, GroupedKernelIdentities) {
    std::mt19937_64 rng(17);
    const Coefficients c = random_smooth_coefficients(rng, 1.0);
    const KernelSet k(c);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        const double x = u(rng), y = u(rng), a = u(rng), b = u(rng);
        EXPECT_NEAR(k.ke(x, y, x, y), c.a11(x, y), 1e-15);
        EXPECT_NEAR(k.ka(x, y, x), y * c.a10(x, y) + c.a11(x, y), 1e-15);
        EXPECT_NEAR(k.kc(x, y, y), x * c.a01(x, y) + c.a11(x, y), 1e-15);
        EXPECT_NEAR(k.kb(x, y, x), c.a12(x, y), 1e-15);
        EXPECT_NEAR(k.kd(x, y, y), c.a21(x, y), 1e-15);
        // P = KE(x,y,0,0), Q = KD(x,y,0), S = KB(x,y,0).
        EXPECT_NEAR(k.p(x, y), k.ke(x, y, 0.0, 0.0), 1e-14);
        EXPECT_NEAR(k.q(x, y), k.kd(x, y, 0.0), 1e-14);
        EXPECT_NEAR(k.s(x, y), k.kb(x, y, 0.0), 1e-14);
        const double ke = (x - a) * (y - b) * c.a00(x, y) + (y - b) * c.a10(x, y) + (x - a) * c.a01(x, y) + c.a11(x, y);
        EXPECT_NEAR(k.ke(x, y, a, b), ke, 1e-14);
    }
}

TEST(KernelSet, TablesAgreeWithContinuousKernels) {
    std::mt19937_64 rng(19);
    const Coefficients c = random_smooth_coefficients(rng, 1.0);
    const Grid2D g = build_grid(Domain(1.0, 1.0), 5, 4);
    const KernelTables t = make_tables(c, g);
    const KernelSet k(c);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double x = t.x[i], y = t.y[j];
            EXPECT_NEAR(t.ka(i, j, 1), k.ka(x, y, t.x[1]), 1e-14);
            EXPECT_NEAR(t.kc(i, j, 2), k.kc(x, y, t.y[2]), 1e-14);
            EXPECT_NEAR(t.ke(i, j, 3, 1), k.ke(x, y, t.x[3], t.y[1]), 1e-14);
            EXPECT_NEAR(t.p(i, j), k.p(x, y), 1e-14);
        }
    }
}

TEST(Coupled, Examples) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 5, 5);
    PdeProblem zero;
    const CoupledSystem s0 = assemble_coupled(zero, g);
    EXPECT_EQ(s0.rhs.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(s0.matrix.rows(), static_cast<Eigen::Index>(1 + 5 + 5 + 25));

    PdeProblem p;
    p.data.z01_h1 = 1.0;
    const auto [h, rep] = solve_coupled(assemble_coupled(p, g));
    EXPECT_NEAR(h.b11, 1.0, 1e-14);
    for (double v : h.b21.values) EXPECT_NEAR(v, 0.0, 1e-14);
    EXPECT_EQ(rep.method, "coupled-dense");

    // u = xy + x²y² with a11 = 1: b22 = u_xxyy = 4.
    const MmsCase m = mms_case("mixed");
    const auto [hm, rm] = solve_coupled(assemble_coupled(m.problem, g));
    for (double v : hm.b22.values) EXPECT_NEAR(v, 4.0, 1e-10);
}

TEST(Coupled, DomainMismatchRejected) {
    PdeProblem p;
    EXPECT_THROW(assemble_coupled(p, build_grid(Domain(2.0, 1.0), 5, 5)), InvalidInput);
}

TEST(Eliminated, ZeroCoefficientsGiveIdentity) {
    std::mt19937_64 rng(23);
    const Grid2D g = build_grid(Domain(1.0, 1.0), 7, 7);
    PdeProblem p;
    p.z22 = random_rhs(rng);
    p.data = random_admissible_data(p.domain, rng);
    const DiscreteOperator op = assemble_eliminated(p, g);
    ASSERT_TRUE(op.has_dense());
    EXPECT_EQ(op.dense_kernel().cwiseAbs().maxCoeff(), 0.0);
    const GridFn2D r = compute_Rtilde(p, assemble_B0(p.data, g));
    for (std::size_t n = 0; n < g.size(); ++n) EXPECT_EQ(op.rhs().values[n], r.values[n]);
}

TEST(Eliminated, AgreesWithCoupledOnRandomProblems) {
    std::mt19937_64 rng(29);
    const Grid2D g = build_grid(Domain(1.0, 1.0), 9, 9);
    for (int trial = 0; trial < 3; ++trial) {
        PdeProblem p;
        p.coeffs = random_smooth_coefficients(rng, 1.0);
        p.z22 = random_rhs(rng);
        p.data = random_admissible_data(p.domain, rng);
        const auto [bd, rd] = solve_dense(assemble_eliminated(p, g));
        const auto [hc, rc] = solve_coupled(assemble_coupled(p, g));
        double diff = 0.0, scale = 0.0;
        for (std::size_t n = 0; n < g.size(); ++n) {
            diff = std::max(diff, std::abs(bd.values[n] - hc.b22.values[n]));
            scale = std::max(scale, std::abs(hc.b22.values[n]));
        }
        EXPECT_LE(diff, 1e-8 * scale);
    }
}

TEST(Eliminated, DenseModesAndRhsSwap) {
    PdeProblem p;
    const Grid2D g = build_grid(Domain(1.0, 1.0), 5, 5);
    const DiscreteOperator never = assemble_eliminated(p, g, DenseMode::Never);
    EXPECT_FALSE(never.has_dense());
    EXPECT_THROW(never.dense_kernel(), InvalidInput);
    GridFn2D other(g);
    other.values.assign(g.size(), 2.0);
    EXPECT_EQ(never.with_rhs(other).rhs().values[3], 2.0);
    EXPECT_THROW(never.with_rhs(GridFn2D(build_grid(Domain(1.0, 1.0), 6, 5))), StructuralError);
}

TEST(Eliminated, OperatorIsLinear) {
    std::mt19937_64 rng(37);
    PdeProblem p;
    p.coeffs = random_smooth_coefficients(rng, 1.0);
    const Grid2D g = build_grid(Domain(1.0, 1.0), 8, 6);
    const DiscreteOperator op = assemble_eliminated(p, g, DenseMode::Never);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> a(g.size()), b(g.size()), c(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) {
        a[n] = u(rng);
        b[n] = u(rng);
        c[n] = 1.5 * a[n] - 2.0 * b[n];
    }
    const auto ka = op.apply(a), kb = op.apply(b), kc = op.apply(c);
    for (std::size_t n = 0; n < g.size(); ++n) EXPECT_NEAR(kc[n], 1.5 * ka[n] - 2.0 * kb[n], 1e-13);
}
