#pragma once

// Compute kernels of the Nystrom discretization. Each kernel exists twice:
// `serial::` is the plain reference loop nest, `omp::` distributes rows over
// OpenMP threads. Every output entry is produced by exactly one thread with
// the same operation order as the serial loop, so both paths are
// bitwise-identical for any thread count.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "mangeron/core_fields.hpp"

namespace mangeron {

enum class Exec { Serial, Parallel };

/// Number of threads the parallel path will use.
int parallel_threads();

/// Grid geometry and coefficient samples at the nodes, flattened for the
/// kernels. Coefficient arrays use the grid's y-outer ordering.
struct KernelTables {
    std::vector<double> x, y;    // nodes
    std::vector<double> wx, wy;  // full trapezoid weights
    double h1 = 1.0, h2 = 1.0;
    std::size_t nx = 0, ny = 0;
    std::vector<double> a21, a12, a20, a02, a11, a10, a01, a00;

    std::size_t size() const noexcept { return nx * ny; }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * nx + i; }

    // Sub-interval trapezoid weights on [0, x_i] and [0, y_j].
    double pwx(std::size_t i, std::size_t k) const noexcept { return partial(x, wx, i, k); }
    double pwy(std::size_t j, std::size_t l) const noexcept { return partial(y, wy, j, l); }

    // Grouped kernels of the reduced equation at collocation node (i, j).
    double ka(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        const std::size_t n = index(i, j);
        return (x[i] - x[k]) * (y[j] * a00[n] + a01[n]) + y[j] * a10[n] + a11[n];
    }
    double kb(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        const std::size_t n = index(i, j);
        return (x[i] - x[k]) * a02[n] + a12[n];
    }
    double kc(std::size_t i, std::size_t j, std::size_t l) const noexcept {
        const std::size_t n = index(i, j);
        return (y[j] - y[l]) * (x[i] * a00[n] + a10[n]) + x[i] * a01[n] + a11[n];
    }
    double kd(std::size_t i, std::size_t j, std::size_t l) const noexcept {
        const std::size_t n = index(i, j);
        return (y[j] - y[l]) * a20[n] + a21[n];
    }
    double ke(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const noexcept {
        const std::size_t n = index(i, j);
        const double dx = x[i] - x[k], dy = y[j] - y[l];
        return dx * dy * a00[n] + dy * a10[n] + dx * a01[n] + a11[n];
    }
    double p(std::size_t i, std::size_t j) const noexcept {
        const std::size_t n = index(i, j);
        return x[i] * y[j] * a00[n] + y[j] * a10[n] + x[i] * a01[n] + a11[n];
    }
    double q(std::size_t i, std::size_t j) const noexcept {
        const std::size_t n = index(i, j);
        return y[j] * a20[n] + a21[n];
    }
    double s(std::size_t i, std::size_t j) const noexcept {
        const std::size_t n = index(i, j);
        return x[i] * a02[n] + a12[n];
    }

private:
    static double partial(const std::vector<double>& t, const std::vector<double>& w, std::size_t i,
                          std::size_t k) noexcept {
        if (i == 0 || k > i) return 0.0;
        if (k == 0) return 0.5 * (t[1] - t[0]);
        if (k == i) return 0.5 * (t[i] - t[i - 1]);
        return w[k];
    }
};

/// Layout of the coupled unknown vector [b11 | b21(x) | b12(y) | b22(x,y)].
struct CoupledLayout {
    std::size_t nx = 0, ny = 0;
    std::size_t b11() const noexcept { return 0; }
    std::size_t b21(std::size_t i) const noexcept { return 1 + i; }
    std::size_t b12(std::size_t j) const noexcept { return 1 + nx + j; }
    std::size_t b22(std::size_t i, std::size_t j) const noexcept { return 1 + nx + ny + j * nx + i; }
    std::size_t size() const noexcept { return 1 + nx + ny + nx * ny; }
};

namespace serial {

/// Dense matrix K of the eliminated equation (I + K) b22 = g, entry by entry.
void assemble_kernel_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> k);

/// out = K b22 without forming K (cumulative trapezoid sums).
void apply_kernel(const KernelTables& t, std::span<const double> b22, std::span<double> out);

/// Rows of the coupled system for the unknowns of CoupledLayout: the
/// right-edge row for b11, the edge rows for b12 and b21, then the
/// collocation rows of the grouped equation. Only the matrix is written.
void assemble_coupled_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> a);

}  // namespace serial

namespace omp {

void assemble_kernel_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> k);
void apply_kernel(const KernelTables& t, std::span<const double> b22, std::span<double> out);
void assemble_coupled_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> a);

}  // namespace omp

inline void assemble_kernel_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> k, Exec exec) {
    exec == Exec::Serial ? serial::assemble_kernel_matrix(t, k) : omp::assemble_kernel_matrix(t, k);
}

inline void apply_kernel(const KernelTables& t, std::span<const double> b22, std::span<double> out, Exec exec) {
    exec == Exec::Serial ? serial::apply_kernel(t, b22, out) : omp::apply_kernel(t, b22, out);
}

inline void assemble_coupled_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> a, Exec exec) {
    exec == Exec::Serial ? serial::assemble_coupled_matrix(t, a) : omp::assemble_coupled_matrix(t, a);
}

namespace detail {

// Per-row bodies shared by both drivers.
void kernel_matrix_row(const KernelTables& t, std::size_t i, std::size_t j, Eigen::Ref<Eigen::MatrixXd> k);
void coupled_matrix_row(const KernelTables& t, std::size_t row, Eigen::Ref<Eigen::MatrixXd> a);

/// Running integrals used by the matrix-free apply. For a grid function f,
/// C = ∫_0 f and M = ∫_0 (t − s) f(s) ds along one axis.
struct ApplyWork {
    explicit ApplyWork(const KernelTables& t);

    // b22-dependent parts of the eliminated lower unknowns
    std::vector<double> b21h, b12h;
    double b11h = 0.0;
    // along y (per column): Cy, My of b22
    std::vector<double> cy, my;
    // along x of b22 and of the y-integrals: Cx, Mx, Cx∘Cy, Mx∘Cy, Cx∘My, Mx∘My
    std::vector<double> cx, mx, cc, mc, cm, mm;
    // along x of b21h and along y of b12h
    std::vector<double> c21, m21, c12, m12;
};

void apply_column_stage(const KernelTables& t, std::span<const double> b22, ApplyWork& w, std::size_t i);
void apply_row_stage(const KernelTables& t, std::span<const double> b22, ApplyWork& w, std::size_t j);
void apply_lower_stage(const KernelTables& t, ApplyWork& w);
void apply_combine_row(const KernelTables& t, const ApplyWork& w, std::size_t j, std::span<double> out);

/// Running trapezoid integral and first moment of a strided sequence.
void running_integrals(const double* nodes, std::size_t n, const double* f, std::size_t f_stride, double* c,
                       double* m, std::size_t out_stride);

}  // namespace detail

}  // namespace mangeron
