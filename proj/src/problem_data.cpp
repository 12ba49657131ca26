#include "mangeron/problem_data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>

#include "mangeron/error.hpp"

namespace mangeron {

Smoothness Coefficients::required_class(std::string_view name) {
    if (name == "a21" || name == "a20") return Smoothness::LinfX_LpY;
    if (name == "a12" || name == "a02") return Smoothness::LpX_LinfY;
    return Smoothness::Lp;
}

std::vector<std::pair<std::string, const Field2D*>> Coefficients::named() const {
    return {{"a21", &a21}, {"a12", &a12}, {"a20", &a20}, {"a02", &a02},
            {"a11", &a11}, {"a10", &a10}, {"a01", &a01}, {"a00", &a00}};
}

std::vector<std::pair<std::string, Field2D*>> Coefficients::named() {
    return {{"a21", &a21}, {"a12", &a12}, {"a20", &a20}, {"a02", &a02},
            {"a11", &a11}, {"a10", &a10}, {"a01", &a01}, {"a00", &a00}};
}

bool Coefficients::all_zero() const {
    for (const auto& [name, f] : named()) {
        if (!f->is_identically_zero()) return false;
    }
    return true;
}

std::vector<double> Coefficients::x_breakpoints() const {
    std::set<double> s;
    for (const auto& [name, f] : named()) s.insert(f->x_breakpoints().begin(), f->x_breakpoints().end());
    return {s.begin(), s.end()};
}

std::vector<double> Coefficients::y_breakpoints() const {
    std::set<double> s;
    for (const auto& [name, f] : named()) s.insert(f->y_breakpoints().begin(), f->y_breakpoints().end());
    return {s.begin(), s.end()};
}

bool ClassicalData::analytic() const {
    for (const Field1D* f : {&phi1, &phi2, &psi1, &psi2}) {
        if (f->kind() == FieldKind::Samples) return false;
    }
    return true;
}

double CheckReport::max_residual() const {
    double m = 0.0;
    for (const auto& [name, r] : residuals) m = std::max(m, r);
    return m;
}

double CheckReport::residual(std::string_view name) const {
    for (const auto& [n, r] : residuals) {
        if (n == name) return r;
    }
    throw InvalidInput("CheckReport: no residual named " + std::string(name));
}

namespace {

CheckReport finish(std::vector<std::pair<std::string, double>> residuals, double tol) {
    CheckReport rep;
    rep.residuals = std::move(residuals);
    rep.tolerance = tol;
    rep.passed = rep.max_residual() <= tol;
    return rep;
}

// ∫_0^L (L − t) f(t) dt over the whole axis.
double full_moment(const Axis& axis, const GridFn1D& f) {
    const double L = axis.length();
    double s = 0.0;
    for (std::size_t k = 0; k < axis.size(); ++k) s += axis.weight(k) * (L - axis.node(k)) * f[k];
    return s;
}

GridFn1D difference(const Field1D& a, const Field1D& b, const Axis& axis) {
    GridFn1D fa = a.sample(axis);
    const GridFn1D fb = b.sample(axis);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] -= fb[i];
    return fa;
}

// Signed data-constraint residuals on the given axes.
std::array<double, 3> constraint_values(const NonclassicalData& z, const Axis& ax, const Axis& ay) {
    const double h1 = ax.length(), h2 = ay.length();
    const double r1 = z.z00 + h1 * z.z10 + full_moment(ax, z.z20.sample(ax)) - z.z00_h1;
    const double r2 = z.z00 + h2 * z.z01 + full_moment(ay, z.z02.sample(ay)) - z.z00_h2;
    const double r3 = h2 * (z.z01_h1 - z.z01) - full_moment(ax, difference(z.z20_h2, z.z20, ax)) -
                      h1 * (z.z10_h2 - z.z10) + full_moment(ay, difference(z.z02_h1, z.z02, ay));
    return {r1, r2, r3};
}

std::array<double, 4> matching_values(const ClassicalData& cd, double h1, double h2) {
    return {cd.phi1(0.0) - cd.psi1(0.0), cd.phi2(h2) - cd.psi2(h1), cd.phi1(h2) - cd.psi2(0.0),
            cd.phi2(0.0) - cd.psi1(h1)};
}

double data_scale(const NonclassicalData& z, const Grid2D& grid) {
    double s = 0.0;
    for (double v : {z.z00, z.z10, z.z01, z.z00_h1, z.z01_h1, z.z00_h2, z.z10_h2}) s = std::max(s, std::abs(v));
    const NormSpec inf = NormSpec::infinity();
    s = std::max(s, lp_norm(z.z20.sample(grid.x()), inf));
    s = std::max(s, lp_norm(z.z20_h2.sample(grid.x()), inf));
    s = std::max(s, lp_norm(z.z02.sample(grid.y()), inf));
    s = std::max(s, lp_norm(z.z02_h1.sample(grid.y()), inf));
    return s;
}

Field1D combine_field(double alpha, const Field1D& a, double beta, const Field1D& b) {
    Field1D::Fn f = [alpha, beta, a, b](double t) { return alpha * a(t) + beta * b(t); };
    if (a.has_derivatives() && b.has_derivatives()) {
        const Field1D a1 = a.derivative(1), a2 = a.derivative(2), b1 = b.derivative(1), b2 = b.derivative(2);
        return Field1D::analytic(std::move(f), [=](double t) { return alpha * a1(t) + beta * b1(t); },
                                 [=](double t) { return alpha * a2(t) + beta * b2(t); });
    }
    return Field1D::analytic(std::move(f));
}

}  // namespace

NonclassicalData classical_to_nonclassical(const ClassicalData& cd, const Domain& /*domain*/, double tol) {
    const double mismatch = std::abs(cd.phi1(0.0) - cd.psi1(0.0));
    if (mismatch > tol) {
        throw CornerMismatchError("classical data: phi1(0) and psi1(0) differ by " + std::to_string(mismatch),
                                  mismatch);
    }
    const Field1D phi1_d1 = cd.phi1.derivative(1);
    const Field1D phi2_d1 = cd.phi2.derivative(1);
    const Field1D psi1_d1 = cd.psi1.derivative(1);
    const Field1D psi2_d1 = cd.psi2.derivative(1);

    NonclassicalData z;
    z.z00 = cd.phi1(0.0);
    z.z10 = psi1_d1(0.0);
    z.z01 = phi1_d1(0.0);
    z.z20 = cd.psi1.derivative(2);
    z.z02 = cd.phi1.derivative(2);
    z.z00_h1 = cd.phi2(0.0);
    z.z01_h1 = phi2_d1(0.0);
    z.z02_h1 = cd.phi2.derivative(2);
    z.z00_h2 = cd.psi2(0.0);
    z.z10_h2 = psi2_d1(0.0);
    z.z20_h2 = cd.psi2.derivative(2);
    return z;
}

ClassicalData nonclassical_to_classical(const NonclassicalData& z, const Grid2D& grid) {
    const Axis& ax = grid.x();
    const Axis& ay = grid.y();
    auto assemble = [](const Axis& axis, double c0, double c1, const Field1D& second) {
        const GridFn1D m = cumulative_moment(second.sample(axis));
        std::vector<double> v(axis.size());
        for (std::size_t i = 0; i < axis.size(); ++i) v[i] = c0 + axis.node(i) * c1 + m[i];
        return Field1D::samples(std::vector<double>(axis.nodes().begin(), axis.nodes().end()), std::move(v));
    };
    ClassicalData cd;
    cd.phi1 = assemble(ay, z.z00, z.z01, z.z02);
    cd.phi2 = assemble(ay, z.z00_h1, z.z01_h1, z.z02_h1);
    cd.psi1 = assemble(ax, z.z00, z.z10, z.z20);
    cd.psi2 = assemble(ax, z.z00_h2, z.z10_h2, z.z20_h2);
    return cd;
}

CheckReport check_matching(const ClassicalData& cd, const Domain& domain, double tol) {
    const auto v = matching_values(cd, domain.h1(), domain.h2());
    return finish({{"phi1(0)=psi1(0)", std::abs(v[0])},
                   {"phi2(h2)=psi2(h1)", std::abs(v[1])},
                   {"phi1(h2)=psi2(0)", std::abs(v[2])},
                   {"phi2(0)=psi1(h1)", std::abs(v[3])}},
                  tol);
}

CheckReport check_data_constraints(const NonclassicalData& z, const Grid2D& grid, double tol) {
    const auto r = constraint_values(z, grid.x(), grid.y());
    return finish({{"u(h1,0)", std::abs(r[0])}, {"u(0,h2)", std::abs(r[1])}, {"far_corner", std::abs(r[2])}},
                  tol);
}

std::vector<double> constraint_quadrature_error(const NonclassicalData& z, const Grid2D& grid) {
    const auto coarse = constraint_values(z, grid.x(), grid.y());
    const auto fine = constraint_values(z, grid.x().refined(), grid.y().refined());
    std::vector<double> est(3);
    for (std::size_t k = 0; k < 3; ++k) est[k] = 4.0 / 3.0 * std::abs(coarse[k] - fine[k]);
    return est;
}

std::vector<double> matching_quadrature_error(const NonclassicalData& z, const Grid2D& grid) {
    const auto& d = grid.domain();
    const auto coarse = matching_values(nonclassical_to_classical(z, grid), d.h1(), d.h2());
    const auto fine = matching_values(nonclassical_to_classical(z, grid.refined()), d.h1(), d.h2());
    std::vector<double> est(4);
    for (std::size_t k = 0; k < 4; ++k) est[k] = 4.0 / 3.0 * std::abs(coarse[k] - fine[k]);
    return est;
}

double calibrated_tolerance(const NonclassicalData& z, const Grid2D& grid) {
    double est = 0.0;
    for (double e : constraint_quadrature_error(z, grid)) est = std::max(est, e);
    for (double e : matching_quadrature_error(z, grid)) est = std::max(est, e);
    const double floor = 1e-12 * (1.0 + data_scale(z, grid));
    return std::max(10.0 * est, floor);
}

double ep22_norm(const NonclassicalData& z, const Grid2D& grid, const NormSpec& spec) {
    double s = 0.0;
    for (double v : {z.z00, z.z10, z.z01, z.z00_h1, z.z01_h1, z.z00_h2, z.z10_h2}) s += std::abs(v);
    s += lp_norm(z.z20.sample(grid.x()), spec);
    s += lp_norm(z.z02.sample(grid.y()), spec);
    s += lp_norm(z.z02_h1.sample(grid.y()), spec);
    s += lp_norm(z.z20_h2.sample(grid.x()), spec);
    return s;
}

NonclassicalData combine(double alpha, const NonclassicalData& a, double beta, const NonclassicalData& b) {
    NonclassicalData z;
    z.z00 = alpha * a.z00 + beta * b.z00;
    z.z10 = alpha * a.z10 + beta * b.z10;
    z.z01 = alpha * a.z01 + beta * b.z01;
    z.z20 = combine_field(alpha, a.z20, beta, b.z20);
    z.z02 = combine_field(alpha, a.z02, beta, b.z02);
    z.z00_h1 = alpha * a.z00_h1 + beta * b.z00_h1;
    z.z01_h1 = alpha * a.z01_h1 + beta * b.z01_h1;
    z.z02_h1 = combine_field(alpha, a.z02_h1, beta, b.z02_h1);
    z.z00_h2 = alpha * a.z00_h2 + beta * b.z00_h2;
    z.z10_h2 = alpha * a.z10_h2 + beta * b.z10_h2;
    z.z20_h2 = combine_field(alpha, a.z20_h2, beta, b.z20_h2);
    return z;
}

}  // namespace mangeron
