#pragma once

// The boundary-value problem: coefficients, right-hand side and boundary data
// in classical (edge traces) and nonclassical (corner values plus
// second-derivative traces) form, with the conversions between them.

#include <string>
#include <utility>
#include <vector>

#include "mangeron/core_fields.hpp"

namespace mangeron {

/// The eight lower-order coefficient fields a_ij, (i,j) ∈ {0,1,2}² \ {(2,2)}.
struct Coefficients {
    Field2D a21 = Field2D::zero(Smoothness::LinfX_LpY);
    Field2D a12 = Field2D::zero(Smoothness::LpX_LinfY);
    Field2D a20 = Field2D::zero(Smoothness::LinfX_LpY);
    Field2D a02 = Field2D::zero(Smoothness::LpX_LinfY);
    Field2D a11 = Field2D::zero(Smoothness::Lp);
    Field2D a10 = Field2D::zero(Smoothness::Lp);
    Field2D a01 = Field2D::zero(Smoothness::Lp);
    Field2D a00 = Field2D::zero(Smoothness::Lp);

    static Coefficients zero() { return {}; }

    /// Smoothness class each coefficient must carry.
    static Smoothness required_class(std::string_view name);

    /// (name, field) pairs in a fixed order.
    std::vector<std::pair<std::string, const Field2D*>> named() const;
    std::vector<std::pair<std::string, Field2D*>> named();

    bool all_zero() const;
    /// Union of the coefficients' piecewise cut positions.
    std::vector<double> x_breakpoints() const;
    std::vector<double> y_breakpoints() const;
};

/// The eleven-component boundary element Z: corner values, corner first
/// derivatives and second-derivative traces along the edges through (0,0),
/// (h1,0) and (0,h2).
struct NonclassicalData {
    double z00 = 0.0;        // u(0,0)
    double z10 = 0.0;        // u_x(0,0)
    double z01 = 0.0;        // u_y(0,0)
    Field1D z20;             // u_xx(x,0), function of x
    Field1D z02;             // u_yy(0,y), function of y
    double z00_h1 = 0.0;     // u(h1,0)
    double z01_h1 = 0.0;     // u_y(h1,0)
    Field1D z02_h1;          // u_yy(h1,y), function of y
    double z00_h2 = 0.0;     // u(0,h2)
    double z10_h2 = 0.0;     // u_x(0,h2)
    Field1D z20_h2;          // u_xx(x,h2), function of x

    static NonclassicalData zero() { return {}; }
};

/// Dirichlet traces: φ1(y) = u(0,y), φ2(y) = u(h1,y), ψ1(x) = u(x,0),
/// ψ2(x) = u(x,h2).
struct ClassicalData {
    Field1D phi1;
    Field1D phi2;
    Field1D psi1;
    Field1D psi2;

    /// True when every trace is analytic (no grid samples).
    bool analytic() const;
};

struct PdeProblem {
    Domain domain{1.0, 1.0};
    Coefficients coeffs;
    Field2D z22;
    NonclassicalData data;
};

/// Named residuals checked against one tolerance.
struct CheckReport {
    std::vector<std::pair<std::string, double>> residuals;
    double tolerance = 0.0;
    bool passed = true;

    double max_residual() const;
    double residual(std::string_view name) const;
};

/// Default corner tolerances: tight for closed-form traces, loose for sampled.
inline constexpr double kCornerTolAnalytic = 1e-10;
inline constexpr double kCornerTolSampled = 1e-6;

/// Z from classical traces and their derivatives. Throws CornerMismatchError
/// when |φ1(0) − ψ1(0)| > tol.
NonclassicalData classical_to_nonclassical(const ClassicalData& cd, const Domain& domain,
                                           double tol = kCornerTolAnalytic);

/// Classical traces assembled from Z by the first-moment integrals, sampled on
/// the grid axes (ψ on x, φ on y).
ClassicalData nonclassical_to_classical(const NonclassicalData& z, const Grid2D& grid);

/// The four corner matching relations of classical data.
CheckReport check_matching(const ClassicalData& cd, const Domain& domain, double tol);

/// Unknown-free relations Z must satisfy for the reduced system to be
/// consistent: u(h1,0) and u(0,h2) as implied by the data through the origin,
/// and agreement of the two expressions for u_xy(0,0) (the far corner).
CheckReport check_data_constraints(const NonclassicalData& z, const Grid2D& grid, double tol);

/// Richardson estimate of the trapezoid error in each data-constraint
/// residual (grid versus bisected grid); same order as check_data_constraints.
std::vector<double> constraint_quadrature_error(const NonclassicalData& z, const Grid2D& grid);

/// Richardson estimate of the trapezoid error in each matching residual of
/// nonclassical_to_classical(z, grid).
std::vector<double> matching_quadrature_error(const NonclassicalData& z, const Grid2D& grid);

/// Tolerance for data-derived residuals on this grid: ten times the
/// estimated quadrature error, floored at round-off scale.
double calibrated_tolerance(const NonclassicalData& z, const Grid2D& grid);

/// Σ of the seven scalar magnitudes and the four L_p norms of the traces.
double ep22_norm(const NonclassicalData& z, const Grid2D& grid, const NormSpec& spec);

/// Linear combination α·a + β·b of two data sets (fields combined pointwise).
NonclassicalData combine(double alpha, const NonclassicalData& a, double beta, const NonclassicalData& b);

}  // namespace mangeron
