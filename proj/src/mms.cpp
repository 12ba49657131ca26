#include "mangeron/mms.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "mangeron/error.hpp"
#include "mangeron/expr.hpp"

namespace mangeron {

ExactSolution ExactSolution::separable(std::string name, std::array<std::function<double(double)>, 3> f,
                                       std::array<std::function<double(double)>, 3> g) {
    ExactSolution s;
    s.name = std::move(name);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            s.d[3 * i + j] = [fi = f[i], gj = g[j]](double x, double y) { return fi(x) * gj(y); };
        }
    }
    return s;
}

ExactSolution ExactSolution::zero() {
    ExactSolution s;
    s.name = "zero";
    for (auto& f : s.d) f = [](double, double) { return 0.0; };
    return s;
}

ExactSolution ExactSolution::operator+(const ExactSolution& other) const {
    ExactSolution s;
    s.name = name + " + " + other.name;
    for (std::size_t k = 0; k < 9; ++k) {
        s.d[k] = [a = d[k], b = other.d[k]](double x, double y) { return a(x, y) + b(x, y); };
    }
    return s;
}

GridFn2D ExactSolution::sample(const Grid2D& grid, int i, int j) const {
    const Fn& f = d[static_cast<std::size_t>(3 * i + j)];
    GridFn2D out(grid);
    for (std::size_t jj = 0; jj < grid.ny(); ++jj) {
        for (std::size_t ii = 0; ii < grid.nx(); ++ii) out.at(ii, jj) = f(grid.x().node(ii), grid.y().node(jj));
    }
    return out;
}

MmsCase make_mms(const ExactSolution& u, const Coefficients& coeffs, const Domain& domain) {
    MmsCase c;
    c.name = u.name;
    c.u_star = u;
    c.coeffs = coeffs;
    c.problem.domain = domain;
    c.problem.coeffs = coeffs;
    c.problem.z22 = Field2D::analytic(
        [u, a = coeffs](double x, double y) {
            return u.d[8](x, y) + a.a21(x, y) * u.d[7](x, y) + a.a12(x, y) * u.d[5](x, y) +
                   a.a20(x, y) * u.d[6](x, y) + a.a02(x, y) * u.d[2](x, y) + a.a11(x, y) * u.d[4](x, y) +
                   a.a10(x, y) * u.d[3](x, y) + a.a01(x, y) * u.d[1](x, y) + a.a00(x, y) * u.d[0](x, y);
        },
        Smoothness::Lp);

    const double h1 = domain.h1(), h2 = domain.h2();
    NonclassicalData& z = c.problem.data;
    z.z00 = u(0.0, 0.0);
    z.z10 = u.d[3](0.0, 0.0);
    z.z01 = u.d[1](0.0, 0.0);
    z.z20 = Field1D::analytic([u](double x) { return u.d[6](x, 0.0); });
    z.z02 = Field1D::analytic([u](double y) { return u.d[2](0.0, y); });
    z.z00_h1 = u(h1, 0.0);
    z.z01_h1 = u.d[1](h1, 0.0);
    z.z02_h1 = Field1D::analytic([u, h1](double y) { return u.d[2](h1, y); });
    z.z00_h2 = u(0.0, h2);
    z.z10_h2 = u.d[3](0.0, h2);
    z.z20_h2 = Field1D::analytic([u, h2](double x) { return u.d[6](x, h2); });
    return c;
}

namespace {

using F1 = std::function<double(double)>;

std::array<F1, 3> lin() {
    return {[](double t) { return t; }, [](double) { return 1.0; }, [](double) { return 0.0; }};
}
std::array<F1, 3> quad() {
    return {[](double t) { return t * t; }, [](double t) { return 2.0 * t; }, [](double) { return 2.0; }};
}
std::array<F1, 3> sine() {
    return {[](double t) { return std::sin(t); }, [](double t) { return std::cos(t); },
            [](double t) { return -std::sin(t); }};
}

Field2D coeff(const std::string& text, const std::string& name) {
    return expr::make_field2d(text, Coefficients::required_class(name));
}

}  // namespace

std::vector<std::string> mms_case_names() {
    return {"bilinear", "biquadratic", "biquadratic-zero", "mixed",
            "sinsin",   "sinsin-a00",  "smooth-variable",  "piecewise-a00"};
}

MmsCase mms_case(const std::string& name) {
    const Domain unit(1.0, 1.0);
    const ExactSolution xy = ExactSolution::separable("xy", lin(), lin());
    const ExactSolution x2y2 = ExactSolution::separable("x^2*y^2", quad(), quad());
    const ExactSolution ss = ExactSolution::separable("sin(x)*sin(y)", sine(), sine());
    Coefficients a;
    MmsCase c;
    if (name == "bilinear") {
        c = make_mms(xy, a, unit);
    } else if (name == "biquadratic") {
        a.a00 = coeff("1", "a00");
        c = make_mms(x2y2, a, unit);
    } else if (name == "biquadratic-zero") {
        c = make_mms(x2y2, a, unit);
    } else if (name == "mixed") {
        a.a11 = coeff("1", "a11");
        c = make_mms(xy + x2y2, a, unit);
    } else if (name == "sinsin") {
        c = make_mms(ss, a, unit);
    } else if (name == "sinsin-a00") {
        a.a00 = coeff("1", "a00");
        c = make_mms(ss, a, unit);
    } else if (name == "smooth-variable") {
        a.a21 = coeff("0.2 + 0.1*y", "a21");
        a.a12 = coeff("0.1*x", "a12");
        a.a20 = coeff("0.3*sin(y)", "a20");
        a.a02 = coeff("-0.2*cos(x)", "a02");
        a.a11 = coeff("0.5*exp(-x*y)", "a11");
        a.a10 = coeff("0.2*x", "a10");
        a.a01 = coeff("-0.1*y", "a01");
        a.a00 = coeff("1 + 0.5*sin(x + y)", "a00");
        c = make_mms(ss + ExactSolution::separable("x^2*y", quad(), lin()), a, unit);
    } else if (name == "piecewise-a00") {
        a.a00 = coeff("piecewise([0.5], [], 1, 2)", "a00");
        c = make_mms(ss, a, unit);
    } else {
        throw InvalidInput("unknown manufactured-solution case '" + name + "'");
    }
    c.name = name;
    return c;
}

Grid2D mms_grid(const MmsCase& c, std::size_t n) {
    const auto xb = c.coeffs.x_breakpoints();
    const auto yb = c.coeffs.y_breakpoints();
    return build_grid(c.problem.domain, n, n, xb, yb);
}

double sup_error(const GridFn2D& u, const ExactSolution& u_star) {
    const Grid2D& g = u.grid;
    double m = 0.0;
    for (std::size_t j = 0; j < g.ny(); ++j) {
        for (std::size_t i = 0; i < g.nx(); ++i) {
            m = std::max(m, std::abs(u.at(i, j) - u_star(g.x().node(i), g.y().node(j))));
        }
    }
    return m;
}

// ---------------------------------------------------------------- random data

double Trace::operator()(double t) const { return c0 + c1 * t + c2 * t * t + a * std::sin(omega * t + phi); }

double Trace::d1(double t) const { return c1 + 2.0 * c2 * t + a * omega * std::cos(omega * t + phi); }

double Trace::d2(double t) const { return 2.0 * c2 - a * omega * omega * std::sin(omega * t + phi); }

double Trace::integral(double h) const {
    return c0 * h + c1 * h * h / 2.0 + c2 * h * h * h / 3.0 + a * (std::cos(phi) - std::cos(omega * h + phi)) / omega;
}

double Trace::moment(double h) const {
    // F'' = sin(ωt + φ), F(0) = F'(0) = 0
    const double w2 = omega * omega;
    const double f = -std::sin(omega * h + phi) / w2 + std::sin(phi) / w2 + h * std::cos(phi) / omega;
    return c0 * h * h / 2.0 + c1 * h * h * h / 6.0 + c2 * h * h * h * h / 12.0 + a * f;
}

Field1D Trace::field() const {
    const Trace t = *this;
    return Field1D::analytic([t](double s) { return t(s); }, [t](double s) { return t.d1(s); },
                             [t](double s) { return t.d2(s); });
}

Trace Trace::random(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(0.5, 3.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    Trace t;
    t.c0 = scale * unit(rng);
    t.c1 = scale * unit(rng);
    t.c2 = scale * unit(rng);
    t.a = scale * unit(rng);
    t.omega = freq(rng);
    t.phi = phase(rng);
    return t;
}

AdmissibleSample random_admissible_sample(const Domain& domain, std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const double h1 = domain.h1(), h2 = domain.h2();
    const Trace z20 = Trace::random(rng, scale);
    const Trace z02 = Trace::random(rng, scale);
    const Trace z02_h1 = Trace::random(rng, scale);
    const Trace z20_h2 = Trace::random(rng, scale);

    AdmissibleSample s;
    NonclassicalData& z = s.z;
    z.z00 = scale * unit(rng);
    z.z10 = scale * unit(rng);
    z.z01 = scale * unit(rng);
    z.z01_h1 = scale * unit(rng);
    z.z20 = z20.field();
    z.z02 = z02.field();
    z.z02_h1 = z02_h1.field();
    z.z20_h2 = z20_h2.field();
    z.z00_h1 = z.z00 + h1 * z.z10 + z20.moment(h1);
    z.z00_h2 = z.z00 + h2 * z.z01 + z02.moment(h2);
    const double m20 = z20_h2.moment(h1) - z20.moment(h1);
    const double m02 = z02_h1.moment(h2) - z02.moment(h2);
    z.z10_h2 = z.z10 + (h2 * (z.z01_h1 - z.z01) - m20 + m02) / h1;

    // c0 + c1 t + ∫_0^t (t − s) f(s) ds with its two derivatives
    auto trace = [](double c0, double c1, const Trace& f) {
        return Field1D::analytic([=](double t) { return c0 + c1 * t + f.moment(t); },
                                 [=](double t) { return c1 + f.integral(t); }, [=](double t) { return f(t); });
    };
    s.classical.phi1 = trace(z.z00, z.z01, z02);
    s.classical.phi2 = trace(z.z00_h1, z.z01_h1, z02_h1);
    s.classical.psi1 = trace(z.z00, z.z10, z20);
    s.classical.psi2 = trace(z.z00_h2, z.z10_h2, z20_h2);
    return s;
}

NonclassicalData random_admissible_data(const Domain& domain, std::mt19937_64& rng, double scale) {
    return random_admissible_sample(domain, rng, scale).z;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string random_smooth_expr(std::mt19937_64& rng, double scale) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> freq(0.5, 2.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    const double c = scale * unit(rng), d = scale * unit(rng);
    const double wx = freq(rng), wy = freq(rng), ph = phase(rng);
    return "(" + fmt(c) + ") + (" + fmt(d) + ")*sin((" + fmt(wx) + ")*x + (" + fmt(wy) + ")*y + (" + fmt(ph) + "))";
}

}  // namespace

Coefficients random_smooth_coefficients(std::mt19937_64& rng, double scale) {
    Coefficients a;
    for (auto& [name, f] : a.named()) *f = coeff(random_smooth_expr(rng, scale), name);
    return a;
}

Field2D random_rhs(std::mt19937_64& rng, double scale) {
    return expr::make_field2d(random_smooth_expr(rng, scale), Smoothness::Lp);
}

// ---------------------------------------------------------------- studies

double ConvergenceTable::min_order() const {
    double m = std::numeric_limits<double>::quiet_NaN();
    for (const auto& r : rows) {
        if (r.order && !(*r.order >= m)) m = *r.order;
    }
    return m;
}

double ConvergenceTable::last_order() const {
    if (rows.empty() || !rows.back().order) return std::numeric_limits<double>::quiet_NaN();
    return *rows.back().order;
}

NodalSolver ie_solver(SolveOptions options) {
    return [options](const PdeProblem& p, const Grid2D& g) { return solve_problem(p, g, options).bundle.u; };
}

NodalSolver fd_solver() {
    return [](const PdeProblem& p, const Grid2D& g) { return fd_oracle(p, g); };
}

ConvergenceTable convergence_study(const MmsCase& c, const std::vector<std::size_t>& sizes, const NodalSolver& solve) {
    if (sizes.size() < 3) throw InvalidInput("convergence_study: need at least three grid sizes");
    constexpr double kExact = 1e-12;
    ConvergenceTable t;
    t.case_name = c.name;
    t.exact = true;
    for (std::size_t n : sizes) {
        const Grid2D g = mms_grid(c, n);
        ConvergenceRow row;
        row.n = n;
        row.h = std::max(g.x().max_spacing(), g.y().max_spacing());
        row.error = sup_error(solve(c.problem, g), c.u_star);
        if (!t.rows.empty()) {
            const ConvergenceRow& prev = t.rows.back();
            if (prev.error > kExact && row.error > kExact) {
                row.order = std::log(prev.error / row.error) / std::log(prev.h / row.h);
            }
            if (row.error > prev.error && row.error > kExact) t.non_monotone = true;
        }
        t.exact = t.exact && row.error <= kExact;
        t.rows.push_back(row);
    }
    return t;
}

ConvergenceTable convergence_study(const MmsCase& c, const std::vector<std::size_t>& sizes) {
    return convergence_study(c, sizes, ie_solver());
}

}  // namespace mangeron
