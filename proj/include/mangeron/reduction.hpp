#pragma once

// Reduction of the boundary-value problem to integral equations: the base
// function B0 carrying the boundary data, the differential operator, the
// reduced right-hand side, and the discrete operators for the coupled system
// and for the single equation in b22.

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "mangeron/core_fields.hpp"
#include "mangeron/kernels.hpp"
#include "mangeron/problem_data.hpp"

namespace mangeron {

/// B0 and its nonvanishing derivatives on a grid. Mixed derivatives of B0
/// are identically zero and not stored.
struct B0Bundle {
    GridFn2D b0, b0_x, b0_y, b0_xx, b0_yy;
};

B0Bundle assemble_B0(const NonclassicalData& z, const Grid2D& grid);

/// Continuous evaluators of the grouped kernels.
class KernelSet {
public:
    explicit KernelSet(Coefficients coeffs) : c_(std::move(coeffs)) {}

    double ka(double x, double y, double a) const;
    double kb(double x, double y, double a) const;
    double kc(double x, double y, double b) const;
    double kd(double x, double y, double b) const;
    double ke(double x, double y, double a, double b) const;
    double p(double x, double y) const;
    double q(double x, double y) const;
    double s(double x, double y) const;

private:
    Coefficients c_;
};

/// Grid and coefficient samples in the flat layout used by the kernels.
KernelTables make_tables(const Coefficients& coeffs, const Grid2D& grid);

/// V22 u at every node from the nine derivative grids.
GridFn2D apply_V22(const Coefficients& coeffs, const SolutionBundle& bundle);

/// R̃ = z22 − V22 B0.
GridFn2D compute_Rtilde(const PdeProblem& problem, const B0Bundle& b0);

/// The parts of b11, b21, b12 fixed by the data alone (b22 = 0).
struct LowerData {
    double b11 = 0.0;
    GridFn1D b21, b12;
};

LowerData lower_data(const NonclassicalData& z, const Grid2D& grid);

/// Square system in the unknowns of CoupledLayout. The bottom-edge row for
/// b11 through u_x(0,h2) is left out (it is implied when the data
/// constraints hold) and evaluated afterwards as a diagnostic.
struct CoupledSystem {
    Grid2D grid;
    CoupledLayout layout;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd rhs;
};

CoupledSystem assemble_coupled(const PdeProblem& problem, const Grid2D& grid, Exec exec = Exec::Parallel);

/// Largest node count for which the dense kernel matrix is formed by default.
inline constexpr std::size_t kDenseLimit = 4900;

enum class DenseMode { Auto, Always, Never };

/// (I + K) b22 = g with b21, b12, b11 eliminated. K is always available
/// matrix-free; the dense matrix is formed on request or when small enough.
class DiscreteOperator {
public:
    DiscreteOperator(Grid2D grid, KernelTables tables, GridFn2D rhs, Exec exec);

    const Grid2D& grid() const noexcept { return grid_; }
    const KernelTables& tables() const noexcept { return tables_; }
    const GridFn2D& rhs() const noexcept { return rhs_; }
    std::size_t size() const noexcept { return grid_.size(); }
    Exec exec() const noexcept { return exec_; }

    /// out = K b (matrix-free).
    void apply_kernel(std::span<const double> b, std::span<double> out) const;
    /// (I + K) b.
    std::vector<double> apply(std::span<const double> b) const;

    bool has_dense() const noexcept { return dense_.has_value(); }
    /// Dense K; throws InvalidInput when it was not formed.
    const Eigen::MatrixXd& dense_kernel() const;
    void form_dense();

    /// Same operator with another right-hand side.
    DiscreteOperator with_rhs(GridFn2D rhs) const;

private:
    Grid2D grid_;
    KernelTables tables_;
    GridFn2D rhs_;
    Exec exec_;
    std::optional<Eigen::MatrixXd> dense_;
};

DiscreteOperator assemble_eliminated(const PdeProblem& problem, const Grid2D& grid,
                                     DenseMode dense = DenseMode::Auto, Exec exec = Exec::Parallel);

}  // namespace mangeron
