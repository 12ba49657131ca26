#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mangeron/error.hpp"
#include "mangeron/expr.hpp"
#include "mangeron/mms.hpp"
#include "mangeron/solver.hpp"

using namespace mangeron;

namespace {

Coefficients constant_a11(double c) {
    Coefficients a;
    a.a11 = Field2D::constant(c, Smoothness::Lp);
    return a;
}

PdeProblem random_problem(std::mt19937_64& rng, double coeff_scale) {
    PdeProblem p;
    p.coeffs = random_smooth_coefficients(rng, coeff_scale);
    p.z22 = random_rhs(rng);
    p.data = random_admissible_data(p.domain, rng);
    return p;
}

double sup_diff(const GridFn2D& a, const GridFn2D& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.values[n] - b.values[n]));
    return m;
}

double sup_abs(const GridFn2D& a) {
    double m = 0.0;
    for (double v : a.values) m = std::max(m, std::abs(v));
    return m;
}

// Gaussian elimination with partial pivoting.
std::vector<double> gauss_solve(Eigen::MatrixXd a, std::vector<double> b) {
    const auto n = a.rows();
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index piv = c;
        for (Eigen::Index r = c + 1; r < n; ++r) {
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        }
        a.row(c).swap(a.row(piv));
        std::swap(b[static_cast<std::size_t>(c)], b[static_cast<std::size_t>(piv)]);
        for (Eigen::Index r = c + 1; r < n; ++r) {
            const double f = a(r, c) / a(c, c);
            for (Eigen::Index k = c; k < n; ++k) a(r, k) -= f * a(c, k);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(c)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n));
    for (Eigen::Index r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (Eigen::Index k = r + 1; k < n; ++k) s -= a(r, k) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(r)] = s / a(r, r);
    }
    return x;
}

}  // namespace

TEST(Method, ParseAndPrint) {
    EXPECT_EQ(parse_method("auto"), Method::Auto);
    EXPECT_EQ(parse_method("neumann"), Method::Neumann);
    EXPECT_EQ(parse_method("dense"), Method::Dense);
    EXPECT_EQ(parse_method("coupled"), Method::Coupled);
    EXPECT_EQ(to_string(Method::Coupled), "coupled");
    EXPECT_THROW(parse_method("gmres"), InvalidInput);
}

TEST(Neumann, ZeroKernelConvergesImmediately) {
    std::mt19937_64 rng(1);
    PdeProblem p;
    p.z22 = random_rhs(rng);
    const DiscreteOperator op = assemble_eliminated(p, build_grid(p.domain, 7, 7));
    const auto [b, rep] = solve_neumann(op);
    EXPECT_EQ(rep.iterations, 1u);
    EXPECT_FALSE(rep.diverged);
    EXPECT_EQ(b.values, op.rhs().values);
}

TEST(Neumann, SmallKernelMatchesDense) {
    std::mt19937_64 rng(2);
    PdeProblem p;
    p.coeffs = constant_a11(0.1);
    p.z22 = random_rhs(rng);
    p.data = random_admissible_data(p.domain, rng);
    const DiscreteOperator op = assemble_eliminated(p, build_grid(p.domain, 13, 13));
    const auto [bn, rn] = solve_neumann(op, 1e-12);
    const auto [bd, rd] = solve_dense(op);
    EXPECT_FALSE(rn.diverged);
    EXPECT_LE(sup_diff(bn, bd), 1e-9);
    ASSERT_GE(rn.update_norms.size(), 3u);
    for (std::size_t k = 1; k < rn.update_norms.size(); ++k) {
        EXPECT_LT(rn.update_norms[k], rn.update_norms[k - 1]);
    }
    ASSERT_TRUE(rd.condition_estimate.has_value());
    EXPECT_GE(*rd.condition_estimate, 1.0);
}

TEST(Neumann, LargeKernelDivergesAndSpectralRadiusExceedsOne) {
    PdeProblem p;
    p.coeffs = constant_a11(50.0);
    p.z22 = expr::make_field2d("sin(x)*sin(y)", Smoothness::Lp);
    const Grid2D g = build_grid(p.domain, 9, 9);
    DiscreteOperator op = assemble_eliminated(p, g);
    const auto [b, rep] = solve_neumann(op);
    EXPECT_TRUE(rep.diverged);
    // Power iteration oracle on the dense K.
    op.form_dense();
    const Eigen::MatrixXd& k = op.dense_kernel();
    Eigen::VectorXd v = Eigen::VectorXd::Ones(k.rows());
    double rho = 0.0;
    for (int it = 0; it < 200; ++it) {
        const Eigen::VectorXd w = k * v;
        rho = w.norm() / v.norm();
        v = w / w.norm();
    }
    EXPECT_GT(rho, 1.0);
}

TEST(Dense, MatchesGaussianElimination) {
    std::mt19937_64 rng(3);
    const PdeProblem p = random_problem(rng, 1.0);
    DiscreteOperator op = assemble_eliminated(p, build_grid(p.domain, 5, 4));
    op.form_dense();
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(op.dense_kernel().rows(), op.dense_kernel().cols()) +
                              op.dense_kernel();
    const auto x = gauss_solve(a, op.rhs().values);
    const auto [b, rep] = solve_dense(op);
    for (std::size_t n = 0; n < x.size(); ++n) EXPECT_NEAR(b.values[n], x[n], 1e-12 * (1.0 + std::abs(x[n])));
}

TEST(Dense, ZeroKernelReturnsRhs) {
    std::mt19937_64 rng(4);
    PdeProblem p;
    p.z22 = random_rhs(rng);
    const DiscreteOperator op = assemble_eliminated(p, build_grid(p.domain, 6, 6));
    const auto [b, rep] = solve_dense(op);
    for (std::size_t n = 0; n < b.size(); ++n) EXPECT_NEAR(b.values[n], op.rhs().values[n], 1e-15);
}

TEST(Reconstruct, Examples) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 9, 9);
    const ReducedUnknowns zero = reconstruct_lower(NonclassicalData::zero(), GridFn2D(g));
    EXPECT_EQ(zero.b11, 0.0);
    for (double v : zero.b21.values) EXPECT_EQ(v, 0.0);

    NonclassicalData z;
    z.z01_h1 = 1.0;
    EXPECT_DOUBLE_EQ(reconstruct_lower(z, GridFn2D(g)).b11, 1.0);

    // b22 ≡ 4, zero data: b21 = −∫(1−y)4 = −2, b12 = −2, b11 = −∫(1−x)(−2) = 1.
    GridFn2D four(g);
    four.values.assign(g.size(), 4.0);
    const ReducedUnknowns h = reconstruct_lower(NonclassicalData::zero(), four);
    for (double v : h.b21.values) EXPECT_NEAR(v, -2.0, 1e-14);
    for (double v : h.b12.values) EXPECT_NEAR(v, -2.0, 1e-14);
    EXPECT_NEAR(h.b11, 1.0, 1e-14);
}

TEST(AssembleSolution, BilinearFromB11) {
    const Grid2D g = build_grid(Domain(1.0, 1.0), 5, 7);
    ReducedUnknowns h{1.0, GridFn1D(g.x()), GridFn1D(g.y()), GridFn2D(g), 0.0, 0.0};
    const SolutionBundle s = assemble_solution(NonclassicalData::zero(), h, g);
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            const double x = g.x().node(i), y = g.y().node(j);
            EXPECT_NEAR(s.u.at(i, j), x * y, 1e-15);
            EXPECT_NEAR(s.ux.at(i, j), y, 1e-15);
            EXPECT_NEAR(s.uy.at(i, j), x, 1e-15);
            EXPECT_EQ(s.uxy.at(i, j), 1.0);
            EXPECT_EQ(s.uxx.at(i, j), 0.0);
        }
    }
}

TEST(AssembleSolution, BiquadraticFromItsUnknowns) {
    const MmsCase m = mms_case("biquadratic-zero");
    const Grid2D g = build_grid(m.problem.domain, 11, 11);
    GridFn2D four(g);
    four.values.assign(g.size(), 4.0);
    const ReducedUnknowns h = reconstruct_lower(m.problem.data, four);
    const SolutionBundle s = assemble_solution(m.problem.data, h, g);
    EXPECT_LE(sup_error(s.u, m.u_star), 1e-13);
    EXPECT_EQ(s.uxxyy.values, four.values);
    SolutionBundle bad = s;
    bad.uxy = GridFn2D();
    EXPECT_THROW(bad.require_complete(), StructuralError);
    EXPECT_THROW(assemble_solution(m.problem.data, h, build_grid(m.problem.domain, 9, 11)), StructuralError);
}

TEST(Pipeline, ZeroCoefficientBilinearExactOnAnyGrid) {
    const MmsCase m = mms_case("bilinear");
    const std::vector<double> xb{0.31}, yb{0.77, 0.9};
    for (const Grid2D& g : {build_grid(m.problem.domain, 21, 21), build_grid(m.problem.domain, 5, 12, xb, yb)}) {
        const SolveResult r = solve_problem(m.problem, g);
        EXPECT_LE(sup_error(r.bundle.u, m.u_star), 1e-12);
        EXPECT_TRUE(r.report.residual_passed);
    }
}

TEST(Pipeline, AllMethodsAgree) {
    const MmsCase m = mms_case("smooth-variable");
    const Grid2D g = mms_grid(m, 11);
    SolveOptions o;
    o.tol = 1e-13;
    GridFn2D ref;
    for (Method method : {Method::Dense, Method::Neumann, Method::Coupled, Method::Auto}) {
        o.method = method;
        const SolveResult r = solve_problem(m.problem, g, o);
        EXPECT_TRUE(r.report.residual_passed) << to_string(method);
        if (ref.values.empty()) {
            ref = r.bundle.u;
        } else {
            EXPECT_LE(sup_diff(r.bundle.u, ref), 1e-10) << to_string(method);
        }
    }
}

TEST(Pipeline, SerialAndParallelIdentical) {
    std::mt19937_64 rng(5);
    const PdeProblem p = random_problem(rng, 0.5);
    const Grid2D g = build_grid(p.domain, 13, 9);
    SolveOptions s, q;
    s.exec = Exec::Serial;
    q.exec = Exec::Parallel;
    const SolveResult a = solve_problem(p, g, s), b = solve_problem(p, g, q);
    EXPECT_EQ(a.bundle.u.values, b.bundle.u.values);
    EXPECT_EQ(a.report.iterations, b.report.iterations);
}

TEST(Pipeline, LargeA11FallsBackToDense) {
    PdeProblem p;
    p.coeffs = constant_a11(50.0);
    p.z22 = expr::make_field2d("sin(x)*sin(y) + 50*cos(x)*cos(y)", Smoothness::Lp);
    const SolveResult r = solve_problem(p, build_grid(p.domain, 11, 11));
    EXPECT_EQ(r.report.method, "dense");
    ASSERT_TRUE(r.neumann_attempt.has_value());
    EXPECT_TRUE(r.neumann_attempt->diverged);
    EXPECT_TRUE(r.report.residual_passed);
    EXPECT_EQ(r.report.warnings.size(), 1u);
}

TEST(Pipeline, DataConstraintGate) {
    PdeProblem p;
    p.data.z00_h1 = 1.0;
    const Grid2D g = build_grid(p.domain, 9, 9);
    EXPECT_THROW(solve_problem(p, g), DataConstraintError);
    SolveOptions o;
    o.force = true;
    const SolveResult r = solve_problem(p, g, o);
    EXPECT_FALSE(r.constraints.passed);
    EXPECT_FALSE(r.report.residual_passed);
    EXPECT_NEAR(r.report.residual_bc[5].second, 1.0, 1e-12);
    EXPECT_EQ(r.report.residual_bc[5].first, "u(h1,0)");
    EXPECT_FALSE(r.report.warnings.empty());
}

TEST(Residuals, ElevenNamedEntriesAndCorruptionDetected) {
    const MmsCase m = mms_case("sinsin-a00");
    const Grid2D g = mms_grid(m, 17);
    const SolveResult r = solve_problem(m.problem, g);
    ASSERT_EQ(r.report.residual_bc.size(), 11u);
    ASSERT_TRUE(r.report.residual_passed);
    EXPECT_LE(r.report.residual_pde, r.report.discrete_threshold);
    EXPECT_LE(r.report.discrete_threshold, r.report.residual_threshold);

    SolutionBundle bad = r.bundle;
    bad.u.at(8, 5) += 1e-6;
    SolveReport rep;
    residual_report(m.problem, bad, NormSpec(2.0), rep);
    EXPECT_GT(rep.residual_bundle, r.report.discrete_threshold);
    EXPECT_GT(rep.residual_pde, r.report.discrete_threshold);
}

TEST(Residuals, ExactBundleSatisfiesBoundaryRows) {
    const MmsCase m = mms_case("mixed");
    const Grid2D g = mms_grid(m, 9);
    SolutionBundle b;
    auto comps = b.by_order();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) *comps[static_cast<std::size_t>(3 * i + j)] = m.u_star.sample(g, i, j);
    }
    SolveReport rep;
    residual_report(m.problem, b, NormSpec(2.0), rep);
    EXPECT_LE(rep.residual_pde, 1e-13);
    for (const auto& [name, v] : rep.residual_bc) EXPECT_LE(v, 1e-14) << name;
    // x²y² + xy satisfies the discrete Taylor relation up to the cubic
    // remainder only when that vanishes; it does along each axis.
    EXPECT_LE(rep.residual_bundle, 1e-14);
}

TEST(B11Routes, ConsistentOnAdmissibleData) {
    std::mt19937_64 rng(6);
    const Grid2D g = build_grid(Domain(1.0, 1.0), 17, 17);
    for (int trial = 0; trial < 5; ++trial) {
        const PdeProblem p = random_problem(rng, 0.5);
        const SolveResult r = solve_problem(p, g);
        const double est = constraint_quadrature_error(p.data, g)[2];
        EXPECT_LE(r.unknowns.b11_alt_discrepancy, 10.0 * est + 1e-12);
    }
}

TEST(B11Routes, DiscrepancyEqualsFarCornerResidual) {
    std::mt19937_64 rng(7);
    PdeProblem p = random_problem(rng, 0.5);
    p.domain = Domain(1.0, 1.0);
    p.data.z10_h2 += 0.1;
    const Grid2D g = build_grid(p.domain, 13, 13);
    SolveOptions o;
    o.force = true;
    const SolveResult r = solve_problem(p, g, o);
    const double r3 = r.constraints.residual("far_corner");
    EXPECT_GT(r3, 0.05);
    EXPECT_NEAR(r.report.b11_alt_discrepancy, r3, 1e-10);
    EXPECT_FALSE(r.constraints.passed);
}

TEST(WellPosedness, PipelineIsLinear) {
    std::mt19937_64 rng(8);
    const Coefficients c = random_smooth_coefficients(rng, 0.5);
    PdeProblem p1 = random_problem(rng, 0.5), p2 = random_problem(rng, 0.5);
    p1.coeffs = c;
    p2.coeffs = c;
    PdeProblem p3 = p1;
    p3.data = combine(2.0, p1.data, -3.0, p2.data);
    p3.z22 = Field2D::analytic([a = p1.z22, b = p2.z22](double x, double y) { return 2.0 * a(x, y) - 3.0 * b(x, y); },
                               Smoothness::Lp);
    const Grid2D g = build_grid(p1.domain, 11, 11);
    SolveOptions o;
    o.method = Method::Dense;
    const GridFn2D u1 = solve_problem(p1, g, o).bundle.u, u2 = solve_problem(p2, g, o).bundle.u;
    const GridFn2D u3 = solve_problem(p3, g, o).bundle.u;
    GridFn2D lin(g);
    for (std::size_t n = 0; n < g.size(); ++n) lin.values[n] = 2.0 * u1.values[n] - 3.0 * u2.values[n];
    EXPECT_LE(sup_diff(u3, lin), 1e-8 * sup_abs(lin));
}

TEST(WellPosedness, M1ScaleInvariant) {
    std::mt19937_64 rng(9);
    const PdeProblem p = random_problem(rng, 0.5);
    PdeProblem q = p;
    q.data = combine(2.0, p.data, 0.0, p.data);
    q.z22 = Field2D::analytic([f = p.z22](double x, double y) { return 2.0 * f(x, y); }, Smoothness::Lp);
    const Grid2D g = build_grid(p.domain, 11, 11);
    SolveOptions o;
    o.method = Method::Dense;
    const double a = solve_problem(p, g, o).report.m1_estimate, b = solve_problem(q, g, o).report.m1_estimate;
    EXPECT_NEAR(a, b, 1e-10 * a);
}

TEST(WellPosedness, EstimateM1CountsExclusions) {
    std::mt19937_64 rng(10);
    const PdeProblem good = random_problem(rng, 0.3);
    PdeProblem bad = good;
    bad.data.z00_h1 += 1.0;
    const Grid2D g = build_grid(good.domain, 9, 9);
    const M1Estimate e = estimate_M1([&](std::size_t k) { return k == 1 ? bad : good; }, 3, g);
    EXPECT_EQ(e.trials, 2u);
    EXPECT_EQ(e.excluded, 1u);
    EXPECT_NEAR(e.value, solve_problem(good, g).report.m1_estimate, 1e-12);
}
