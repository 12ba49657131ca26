#include "mangeron/solver.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "mangeron/error.hpp"

namespace mangeron {

std::string to_string(Method m) {
    switch (m) {
        case Method::Auto: return "auto";
        case Method::Neumann: return "neumann";
        case Method::Dense: return "dense";
        case Method::Coupled: return "coupled";
    }
    return "auto";
}

Method parse_method(std::string_view text) {
    if (text == "auto") return Method::Auto;
    if (text == "neumann") return Method::Neumann;
    if (text == "dense") return Method::Dense;
    if (text == "coupled") return Method::Coupled;
    throw InvalidInput("unknown solver method '" + std::string(text) + "'");
}

namespace {

// Singular below this reciprocal condition number.
constexpr double kMinRcond = 1e-14;

int thread_count(Exec exec) { return exec == Exec::Parallel ? parallel_threads() : 1; }

Eigen::VectorXd lu_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, SolveReport& rep, const char* what) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rcond = lu.rcond();
    const double cond = rcond > 0.0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    rep.condition_estimate = cond;
    if (!(rcond > kMinRcond)) {
        throw SingularSystemError(std::string(what) + ": matrix is numerically singular (condition estimate " +
                                      std::to_string(cond) + ")",
                                  cond);
    }
    Eigen::VectorXd x = lu.solve(b);
    if (!x.allFinite()) throw SingularSystemError(std::string(what) + ": non-finite solution", cond);
    return x;
}

// y-direction running integrals of every column of a grid function.
void column_integrals(const Grid2D& g, std::span<const double> f, std::vector<double>& c, std::vector<double>& m) {
    c.assign(g.size(), 0.0);
    m.assign(g.size(), 0.0);
    const auto y = g.y().nodes();
    for (std::size_t i = 0; i < g.nx(); ++i) {
        detail::running_integrals(y.data(), g.ny(), f.data() + i, g.nx(), c.data() + i, m.data() + i, g.nx());
    }
}

void row_integrals(const Grid2D& g, std::span<const double> f, std::vector<double>& c, std::vector<double>& m) {
    c.assign(g.size(), 0.0);
    m.assign(g.size(), 0.0);
    const auto x = g.x().nodes();
    for (std::size_t j = 0; j < g.ny(); ++j) {
        const std::size_t r = g.index(0, j);
        detail::running_integrals(x.data(), g.nx(), f.data() + r, 1, c.data() + r, m.data() + r, 1);
    }
}

double b11_route_h2(const NonclassicalData& z, const GridFn1D& b12, double h2) {
    const Axis& ay = b12.axis;
    double s = 0.0;
    for (std::size_t l = 0; l < ay.size(); ++l) s += ay.weight(l) * (h2 - ay.node(l)) * b12[l];
    return (z.z10_h2 - z.z10) / h2 - s / h2;
}

double data_scale(const PdeProblem& problem, const Grid2D& grid) {
    const NormSpec inf = NormSpec::infinity();
    return ep22_norm(problem.data, grid, inf) + lp_norm(problem.z22.sample(grid), inf);
}

}  // namespace

std::pair<GridFn2D, SolveReport> solve_neumann(const DiscreteOperator& op, double tol, std::size_t max_iter) {
    SolveReport rep;
    rep.method = "neumann";
    rep.threads = thread_count(op.exec());
    const std::vector<double>& g = op.rhs().values;
    std::vector<double> b = g, kb(g.size()), next(g.size());

    bool converged = false;
    int growth = 0;
    for (std::size_t k = 1; k <= max_iter; ++k) {
        op.apply_kernel(b, kb);
        double upd = 0.0;
        for (std::size_t n = 0; n < g.size(); ++n) {
            next[n] = g[n] - kb[n];
            upd = std::max(upd, std::abs(next[n] - b[n]));
        }
        if (std::isnan(upd)) upd = std::numeric_limits<double>::infinity();
        b.swap(next);
        rep.iterations = k;
        rep.final_update_norm = upd;
        if (!rep.update_norms.empty() && upd > rep.update_norms.back()) {
            ++growth;
        } else {
            growth = 0;
        }
        rep.update_norms.push_back(upd);
        if (!std::isfinite(upd) || growth >= 5) break;
        if (upd <= tol) {
            converged = true;
            break;
        }
    }
    rep.diverged = !converged;
    return {GridFn2D(op.grid(), std::move(b)), rep};
}

std::pair<GridFn2D, SolveReport> solve_dense(const DiscreteOperator& op) {
    SolveReport rep;
    rep.method = "dense";
    rep.threads = thread_count(op.exec());
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::MatrixXd a;
    if (op.has_dense()) {
        a = op.dense_kernel();
    } else {
        a.resize(n, n);
        assemble_kernel_matrix(op.tables(), a, op.exec());
    }
    a.diagonal().array() += 1.0;
    const Eigen::VectorXd g = Eigen::Map<const Eigen::VectorXd>(op.rhs().values.data(), n);
    const Eigen::VectorXd x = lu_solve(a, g, rep, "solve_dense");
    rep.iterations = 1;
    return {GridFn2D(op.grid(), std::vector<double>(x.data(), x.data() + n)), rep};
}

std::pair<ReducedUnknowns, SolveReport> solve_coupled(const CoupledSystem& sys) {
    SolveReport rep;
    rep.method = "coupled-dense";
    const Eigen::VectorXd x = lu_solve(sys.matrix, sys.rhs, rep, "solve_coupled");
    rep.iterations = 1;

    const Grid2D& g = sys.grid;
    const CoupledLayout& lay = sys.layout;
    ReducedUnknowns h{x(0), GridFn1D(g.x()), GridFn1D(g.y()), GridFn2D(g), 0.0, 0.0};
    for (std::size_t i = 0; i < g.nx(); ++i) h.b21[i] = x(static_cast<Eigen::Index>(lay.b21(i)));
    for (std::size_t j = 0; j < g.ny(); ++j) h.b12[j] = x(static_cast<Eigen::Index>(lay.b12(j)));
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) h.b22.at(i, j) = x(static_cast<Eigen::Index>(lay.b22(i, j)));
    }
    return {std::move(h), rep};
}

ReducedUnknowns reconstruct_lower(const NonclassicalData& z, const GridFn2D& b22) {
    if (!b22.complete()) throw StructuralError("reconstruct_lower: incomplete b22");
    const Grid2D& g = b22.grid;
    const double h1 = g.domain().h1(), h2 = g.domain().h2();
    const LowerData d = lower_data(z, g);

    ReducedUnknowns h{0.0, d.b21, d.b12, b22, 0.0, 0.0};
    for (std::size_t i = 0; i < g.nx(); ++i) {
        double s = 0.0;
        for (std::size_t l = 0; l < g.ny(); ++l) s += g.y().weight(l) * (h2 - g.y().node(l)) * b22.at(i, l);
        h.b21[i] -= s / h2;
    }
    for (std::size_t j = 0; j < g.ny(); ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < g.nx(); ++k) s += g.x().weight(k) * (h1 - g.x().node(k)) * b22.at(k, j);
        h.b12[j] -= s / h1;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < g.nx(); ++k) s += g.x().weight(k) * (h1 - g.x().node(k)) * h.b21[k];
    h.b11 = (z.z01_h1 - z.z01) / h1 - s / h1;
    h.b11_alt = b11_route_h2(z, h.b12, h2);
    h.b11_alt_discrepancy = std::abs(h.b11 - h.b11_alt);
    return h;
}

SolutionBundle assemble_solution(const NonclassicalData& z, const ReducedUnknowns& h, const Grid2D& grid) {
    if (!(h.b22.grid == grid) || !(h.b21.axis == grid.x()) || !(h.b12.axis == grid.y())) {
        throw StructuralError("assemble_solution: unknowns live on a different grid");
    }
    const B0Bundle b0 = assemble_B0(z, grid);
    const GridFn1D c21 = cumulative_integral(h.b21), m21 = cumulative_moment(h.b21);
    const GridFn1D c12 = cumulative_integral(h.b12), m12 = cumulative_moment(h.b12);

    const std::vector<double>& b22 = h.b22.values;
    std::vector<double> cy, my, cx, mx, cc, mc, cm, mm;
    column_integrals(grid, b22, cy, my);
    row_integrals(grid, b22, cx, mx);
    row_integrals(grid, cy, cc, mc);  // Cx∘Cy, Mx∘Cy
    row_integrals(grid, my, cm, mm);  // Cx∘My, Mx∘My

    SolutionBundle s;
    for (GridFn2D* f : s.by_order()) *f = GridFn2D(grid);
    const GridFn1D z20 = z.z20.sample(grid.x());
    const GridFn1D z02 = z.z02.sample(grid.y());
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        const double y = grid.y().node(j);
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double x = grid.x().node(i);
            const std::size_t n = grid.index(i, j);
            s.u.values[n] = b0.b0.values[n] + x * y * h.b11 + y * m21[i] + x * m12[j] + mm[n];
            s.ux.values[n] = b0.b0_x.values[n] + y * h.b11 + y * c21[i] + m12[j] + cm[n];
            s.uy.values[n] = b0.b0_y.values[n] + x * h.b11 + m21[i] + x * c12[j] + mc[n];
            s.uxx.values[n] = z20[i] + y * h.b21[i] + my[n];
            s.uyy.values[n] = z02[j] + x * h.b12[j] + mx[n];
            s.uxy.values[n] = h.b11 + c21[i] + c12[j] + cc[n];
            s.uxxy.values[n] = h.b21[i] + cy[n];
            s.uxyy.values[n] = h.b12[j] + cx[n];
            s.uxxyy.values[n] = b22[n];
        }
    }
    return s;
}

void residual_report(const PdeProblem& problem, const SolutionBundle& bundle, const NormSpec& spec,
                     SolveReport& report) {
    bundle.require_complete();
    const Grid2D& g = bundle.u.grid;
    const NonclassicalData& z = problem.data;
    const std::size_t ix = g.nx() - 1, jy = g.ny() - 1;

    GridFn2D r = apply_V22(problem.coeffs, bundle);
    const GridFn2D z22 = problem.z22.sample(g);
    for (std::size_t n = 0; n < g.size(); ++n) r.values[n] -= z22.values[n];
    report.residual_pde = lp_norm(r, spec);

    auto along_x = [&](const GridFn2D& f, std::size_t j, const Field1D& ref) {
        double m = 0.0;
        for (std::size_t i = 0; i < g.nx(); ++i) m = std::max(m, std::abs(f.at(i, j) - ref(g.x().node(i))));
        return m;
    };
    auto along_y = [&](const GridFn2D& f, std::size_t i, const Field1D& ref) {
        double m = 0.0;
        for (std::size_t j = 0; j < g.ny(); ++j) m = std::max(m, std::abs(f.at(i, j) - ref(g.y().node(j))));
        return m;
    };
    report.residual_bc = {
        {"u(0,0)", std::abs(bundle.u.at(0, 0) - z.z00)},
        {"u_x(0,0)", std::abs(bundle.ux.at(0, 0) - z.z10)},
        {"u_y(0,0)", std::abs(bundle.uy.at(0, 0) - z.z01)},
        {"u_xx(x,0)", along_x(bundle.uxx, 0, z.z20)},
        {"u_yy(0,y)", along_y(bundle.uyy, 0, z.z02)},
        {"u(h1,0)", std::abs(bundle.u.at(ix, 0) - z.z00_h1)},
        {"u_y(h1,0)", std::abs(bundle.uy.at(ix, 0) - z.z01_h1)},
        {"u_yy(h1,y)", along_y(bundle.uyy, ix, z.z02_h1)},
        {"u(0,h2)", std::abs(bundle.u.at(0, jy) - z.z00_h2)},
        {"u_x(0,h2)", std::abs(bundle.ux.at(0, jy) - z.z10_h2)},
        {"u_xx(x,h2)", along_x(bundle.uxx, jy, z.z20_h2)},
    };

    double taylor = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 1; i < g.nx(); ++i) {
            const double d = g.x().node(i) - g.x().node(i - 1);
            const double pred = bundle.u.at(i - 1, j) + d * bundle.ux.at(i - 1, j) + 0.5 * d * d * bundle.uxx.at(i - 1, j);
            taylor = std::max(taylor, std::abs(bundle.u.at(i, j) - pred));
        }
    }
    for (std::size_t i = 0; i < g.nx(); ++i) {
        for (std::size_t j = 1; j < g.ny(); ++j) {
            const double d = g.y().node(j) - g.y().node(j - 1);
            const double pred = bundle.u.at(i, j - 1) + d * bundle.uy.at(i, j - 1) + 0.5 * d * d * bundle.uyy.at(i, j - 1);
            taylor = std::max(taylor, std::abs(bundle.u.at(i, j) - pred));
        }
    }
    report.residual_bundle = taylor;
}

double residual_threshold(const PdeProblem& problem, const Grid2D& grid) {
    // The quadrature part covers trapezoid error in the data-derived
    // residuals; the floor covers iteration tolerance and round-off.
    return std::max(calibrated_tolerance(problem.data, grid), 1e-9 * (1.0 + data_scale(problem, grid)));
}

double discrete_threshold(const PdeProblem& problem, const Grid2D& grid, double tol) {
    // The nodal residual of a Neumann iterate equals its last update, so its
    // L_p norm is at most tol·|G|^(1/p).
    const double area = grid.domain().h1() * grid.domain().h2();
    return std::max(1e-9 * (1.0 + data_scale(problem, grid)), 10.0 * tol * std::max(1.0, area));
}

double m1_ratio(const PdeProblem& problem, const SolutionBundle& bundle, const NormSpec& spec) {
    const Grid2D& g = bundle.u.grid;
    const double den = ep22_norm(problem.data, g, spec) + lp_norm(problem.z22.sample(g), spec);
    const double num = wp22_norm(bundle, spec);
    if (den == 0.0) return 0.0;
    return num / den;
}

SolveResult solve_problem(const PdeProblem& problem, const Grid2D& grid, const SolveOptions& options) {
    if (!(grid.domain() == problem.domain)) throw InvalidInput("solve_problem: grid and problem domains differ");

    SolveResult res;
    const double data_tol = calibrated_tolerance(problem.data, grid);
    res.constraints = check_data_constraints(problem.data, grid, data_tol);
    if (!res.constraints.passed && !options.force) {
        throw DataConstraintError("boundary data violate the compatibility relations (max residual " +
                                      std::to_string(res.constraints.max_residual()) + ")",
                                  res.constraints.max_residual());
    }

    if (options.method == Method::Coupled) {
        auto [h, rep] = solve_coupled(assemble_coupled(problem, grid, options.exec));
        rep.threads = thread_count(options.exec);
        h.b11_alt = b11_route_h2(problem.data, h.b12, grid.domain().h2());
        h.b11_alt_discrepancy = std::abs(h.b11 - h.b11_alt);
        res.unknowns = std::move(h);
        res.report = std::move(rep);
    } else if (options.method == Method::Dense) {
        const DiscreteOperator op = assemble_eliminated(problem, grid, DenseMode::Never, options.exec);
        auto [b22, rep] = solve_dense(op);
        res.unknowns = reconstruct_lower(problem.data, b22);
        res.report = std::move(rep);
    } else {
        const DiscreteOperator op = assemble_eliminated(problem, grid, DenseMode::Never, options.exec);
        auto [b22, rep] = solve_neumann(op, options.tol, options.max_iter);
        if (rep.diverged) {
            if (grid.size() > kDenseLimit) {
                throw SolverFailure("successive approximations diverged and the grid exceeds the dense limit");
            }
            auto [b22d, repd] = solve_dense(op);
            repd.warnings.push_back("successive approximations diverged after " + std::to_string(rep.iterations) +
                                    " iterations; dense LU fallback used");
            res.neumann_attempt = std::move(rep);
            b22 = std::move(b22d);
            rep = std::move(repd);
        }
        res.unknowns = reconstruct_lower(problem.data, b22);
        res.report = std::move(rep);
    }

    if (!res.constraints.passed) {
        res.report.warnings.push_back("data-constraint gate bypassed (force); boundary residuals may be large");
    }
    res.bundle = assemble_solution(problem.data, res.unknowns, grid);
    residual_report(problem, res.bundle, options.norm, res.report);
    res.report.b11 = res.unknowns.b11;
    res.report.b11_alt = res.unknowns.b11_alt;
    res.report.b11_alt_discrepancy = res.unknowns.b11_alt_discrepancy;

    const double thr = residual_threshold(problem, grid);
    const double dthr = discrete_threshold(problem, grid, options.tol);
    res.report.residual_threshold = thr;
    res.report.discrete_threshold = dthr;
    bool ok = res.report.residual_pde <= dthr && res.report.residual_bundle <= dthr;
    for (const auto& [name, v] : res.report.residual_bc) ok = ok && v <= thr;
    res.report.residual_passed = ok;
    res.report.m1_estimate = m1_ratio(problem, res.bundle, options.norm);
    return res;
}

M1Estimate estimate_M1(const std::function<PdeProblem(std::size_t)>& sampler, std::size_t trials,
                       const Grid2D& grid, const SolveOptions& options) {
    M1Estimate est;
    for (std::size_t k = 0; k < trials; ++k) {
        const PdeProblem p = sampler(k);
        try {
            const SolveResult r = solve_problem(p, grid, options);
            if (!r.report.residual_passed) {
                ++est.excluded;
                continue;
            }
            est.ratios.push_back(r.report.m1_estimate);
            est.value = std::max(est.value, r.report.m1_estimate);
            ++est.trials;
        } catch (const std::runtime_error&) {
            ++est.excluded;
        }
    }
    return est;
}

}  // namespace mangeron
