#pragma once

// Solvers for the reduced equations, reconstruction of u and its
// derivatives, residual checks and the empirical stability ratio.

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mangeron/core_fields.hpp"
#include "mangeron/problem_data.hpp"
#include "mangeron/reduction.hpp"

namespace mangeron {

/// The quadruple (b11, b21(x), b12(y), b22(x,y)).
struct ReducedUnknowns {
    double b11 = 0.0;
    GridFn1D b21;
    GridFn1D b12;
    GridFn2D b22;
    /// b11 through u_x(0,h2) instead of u_y(h1,0), and |difference|.
    double b11_alt = 0.0;
    double b11_alt_discrepancy = 0.0;
};

enum class Method { Auto, Neumann, Dense, Coupled };

std::string to_string(Method m);
/// Parses "auto", "neumann", "dense" or "coupled"; throws InvalidInput.
Method parse_method(std::string_view text);

struct SolveReport {
    std::string method;  // "neumann", "dense" or "coupled-dense"
    std::size_t iterations = 0;
    double final_update_norm = 0.0;
    std::vector<double> update_norms;
    bool diverged = false;
    std::optional<double> condition_estimate;
    int threads = 1;

    double residual_pde = 0.0;
    /// u(0,0), u_x(0,0), u_y(0,0), u_xx(x,0), u_yy(0,y), u(h1,0), u_y(h1,0),
    /// u_yy(h1,y), u(0,h2), u_x(0,h2), u_xx(x,h2) against the data; the
    /// function-valued ones as node maxima.
    std::vector<std::pair<std::string, double>> residual_bc;
    /// Largest violation of the discrete Taylor relations
    /// u_i − u_{i−1} = Δ u_x,{i−1} + Δ²/2 u_xx,{i−1} along both axes. They hold
    /// exactly for any bundle built from the integral representation, so this
    /// catches corrupted entries of u independently of the coefficients.
    double residual_bundle = 0.0;
    /// Gate for the boundary residuals (quadrature-calibrated).
    double residual_threshold = 0.0;
    /// Gate for residual_pde and residual_bundle, which hold exactly in the
    /// discrete setting up to round-off and the iteration tolerance.
    double discrete_threshold = 0.0;
    bool residual_passed = false;

    double b11 = 0.0;
    double b11_alt = 0.0;
    double b11_alt_discrepancy = 0.0;
    double m1_estimate = 0.0;

    std::vector<std::string> warnings;
};

/// Successive approximations b ← g − K b from b = g. Never throws on
/// divergence; the report carries the flag and the last iterate is returned.
std::pair<GridFn2D, SolveReport> solve_neumann(const DiscreteOperator& op, double tol = 1e-10,
                                               std::size_t max_iter = 200);

/// LU solve of (I + K) b = g with a condition estimate. Forms the dense
/// matrix if needed. Throws SingularSystemError.
std::pair<GridFn2D, SolveReport> solve_dense(const DiscreteOperator& op);

/// LU solve of the coupled system. Throws SingularSystemError.
std::pair<ReducedUnknowns, SolveReport> solve_coupled(const CoupledSystem& sys);

ReducedUnknowns reconstruct_lower(const NonclassicalData& z, const GridFn2D& b22);

/// u and its eight derivatives from the integral representation.
SolutionBundle assemble_solution(const NonclassicalData& z, const ReducedUnknowns& h, const Grid2D& grid);

/// Fills residual_pde, residual_bc and residual_bundle of `report`.
void residual_report(const PdeProblem& problem, const SolutionBundle& bundle, const NormSpec& spec,
                     SolveReport& report);

/// Threshold for the boundary residuals on this grid.
double residual_threshold(const PdeProblem& problem, const Grid2D& grid);

/// Threshold for the PDE and bundle residuals given the iteration tolerance.
double discrete_threshold(const PdeProblem& problem, const Grid2D& grid, double tol);

/// ‖u‖_W / (‖Z‖_E + ‖z22‖_Lp).
double m1_ratio(const PdeProblem& problem, const SolutionBundle& bundle, const NormSpec& spec);

struct SolveOptions {
    Method method = Method::Auto;
    double tol = 1e-10;
    std::size_t max_iter = 200;
    NormSpec norm{2.0};
    bool force = false;
    Exec exec = Exec::Parallel;
};

struct SolveResult {
    ReducedUnknowns unknowns;
    SolutionBundle bundle;
    SolveReport report;
    CheckReport constraints;
    /// The Neumann report when it diverged and a dense solve took over.
    std::optional<SolveReport> neumann_attempt;
};

/// Full pipeline: data-constraint gate, reduced solve (with dense fallback
/// after Neumann divergence), reconstruction, residuals and m1.
/// Throws DataConstraintError unless forced, SingularSystemError, SolverFailure.
SolveResult solve_problem(const PdeProblem& problem, const Grid2D& grid, const SolveOptions& options = {});

/// Max of m1_ratio over sampled problems. Problems whose solve fails are
/// skipped and counted in `excluded`.
struct M1Estimate {
    double value = 0.0;
    std::size_t trials = 0;
    std::size_t excluded = 0;
    std::vector<double> ratios;
};

M1Estimate estimate_M1(const std::function<PdeProblem(std::size_t)>& sampler, std::size_t trials,
                       const Grid2D& grid, const SolveOptions& options = {});

}  // namespace mangeron
