#pragma once

// Manufactured solutions, random admissible data, an independent
// finite-difference solver and grid-convergence tables.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mangeron/core_fields.hpp"
#include "mangeron/problem_data.hpp"
#include "mangeron/solver.hpp"

namespace mangeron {

/// A closed-form u* with all derivatives D_x^i D_y^j u*, i, j <= 2.
struct ExactSolution {
    using Fn = std::function<double(double, double)>;

    std::string name;
    std::array<Fn, 9> d;  // d[3*i + j] = D_x^i D_y^j u*

    double operator()(double x, double y) const { return d[0](x, y); }
    double derivative(int i, int j, double x, double y) const { return d[static_cast<std::size_t>(3 * i + j)](x, y); }

    /// u*(x,y) = f(x) g(y) from value, first and second derivative of each factor.
    static ExactSolution separable(std::string name, std::array<std::function<double(double)>, 3> f,
                                   std::array<std::function<double(double)>, 3> g);
    static ExactSolution zero();
    ExactSolution operator+(const ExactSolution& other) const;

    /// Nodal values of u* or of one derivative.
    GridFn2D sample(const Grid2D& grid, int i = 0, int j = 0) const;
};

struct MmsCase {
    std::string name;
    ExactSolution u_star;
    Coefficients coeffs;
    PdeProblem problem;
};

/// z22 := V22 u*, boundary data := traces of u*.
MmsCase make_mms(const ExactSolution& u_star, const Coefficients& coeffs, const Domain& domain);

/// Fixed named cases on [0,1]²:
///   bilinear             u = xy, zero coefficients
///   biquadratic          u = x²y², a00 = 1
///   biquadratic-zero     u = x²y², zero coefficients
///   mixed                u = xy + x²y², a11 = 1
///   sinsin               u = sin x sin y, zero coefficients
///   sinsin-a00           u = sin x sin y, a00 = 1
///   smooth-variable      u = sin x sin y + x²y, smooth variable coefficients
///   piecewise-a00        u = sin x sin y, a00 = 1 for x <= 0.5 and 2 beyond
MmsCase mms_case(const std::string& name);
std::vector<std::string> mms_case_names();

/// Grid for an MMS case, aligned with its coefficient breakpoints.
Grid2D mms_grid(const MmsCase& c, std::size_t n);

/// Sup-norm error of nodal values against u*.
double sup_error(const GridFn2D& u, const ExactSolution& u_star);

// ---------------------------------------------------------------- random data

/// c0 + c1 t + c2 t² + a sin(ω t + φ), with closed-form derivatives and
/// first moment ∫_0^h (h − t) f(t) dt.
struct Trace {
    double c0 = 0.0, c1 = 0.0, c2 = 0.0, a = 0.0, omega = 1.0, phi = 0.0;

    double operator()(double t) const;
    double d1(double t) const;
    double d2(double t) const;
    double integral(double h) const;  // ∫_0^h f
    double moment(double h) const;    // ∫_0^h (h − t) f(t) dt
    Field1D field() const;

    static Trace random(std::mt19937_64& rng, double scale = 1.0);
};

/// Random nonclassical data satisfying the three compatibility relations in
/// closed form (so only quadrature error remains on a grid), together with
/// the classical traces they generate, also in closed form.
struct AdmissibleSample {
    NonclassicalData z;
    ClassicalData classical;
};

AdmissibleSample random_admissible_sample(const Domain& domain, std::mt19937_64& rng, double scale = 1.0);
NonclassicalData random_admissible_data(const Domain& domain, std::mt19937_64& rng, double scale = 1.0);

/// Random smooth coefficients of size O(scale): constants plus low-frequency
/// trigonometric terms.
Coefficients random_smooth_coefficients(std::mt19937_64& rng, double scale);

/// Random smooth right-hand side.
Field2D random_rhs(std::mt19937_64& rng, double scale = 1.0);

// ---------------------------------------------------------------- oracle

/// Second-order finite differences for the full operator with Dirichlet rows
/// from the classical traces of problem.data. Throws SingularSystemError.
GridFn2D fd_oracle(const PdeProblem& problem, const Grid2D& grid);

// ---------------------------------------------------------------- studies

struct ConvergenceRow {
    std::size_t n = 0;
    double h = 0.0;
    double error = 0.0;
    std::optional<double> order;  // empty on the first row
};

struct ConvergenceTable {
    std::string case_name;
    std::vector<ConvergenceRow> rows;
    bool exact = false;          // every error ≤ 1e-12
    bool non_monotone = false;   // some error failed to decrease

    /// Smallest observed order (NaN when there is none).
    double min_order() const;
    /// Order over the last two rows (NaN when there is none).
    double last_order() const;
};

using NodalSolver = std::function<GridFn2D(const PdeProblem&, const Grid2D&)>;

/// The integral-equation pipeline as a NodalSolver.
NodalSolver ie_solver(SolveOptions options = {});
/// The finite-difference oracle as a NodalSolver.
NodalSolver fd_solver();

/// Errors against u* on grids with n x n nodes and consecutive orders
/// log(e_k/e_{k+1}) / log(h_k/h_{k+1}). Needs at least three sizes.
ConvergenceTable convergence_study(const MmsCase& c, const std::vector<std::size_t>& sizes,
                                   const NodalSolver& solve);
ConvergenceTable convergence_study(const MmsCase& c, const std::vector<std::size_t>& sizes);

}  // namespace mangeron
