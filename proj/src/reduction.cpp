#include "mangeron/reduction.hpp"

#include "mangeron/error.hpp"

namespace mangeron {

B0Bundle assemble_B0(const NonclassicalData& z, const Grid2D& grid) {
    const GridFn1D z20 = z.z20.sample(grid.x());
    const GridFn1D z02 = z.z02.sample(grid.y());
    const GridFn1D cx = cumulative_integral(z20), mx = cumulative_moment(z20);
    const GridFn1D cy = cumulative_integral(z02), my = cumulative_moment(z02);

    B0Bundle b{GridFn2D(grid), GridFn2D(grid), GridFn2D(grid), GridFn2D(grid), GridFn2D(grid)};
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        const double y = grid.y().node(j);
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            const double x = grid.x().node(i);
            b.b0.at(i, j) = z.z00 + x * z.z10 + y * z.z01 + mx[i] + my[j];
            b.b0_x.at(i, j) = z.z10 + cx[i];
            b.b0_y.at(i, j) = z.z01 + cy[j];
            b.b0_xx.at(i, j) = z20[i];
            b.b0_yy.at(i, j) = z02[j];
        }
    }
    return b;
}

double KernelSet::ka(double x, double y, double a) const {
    return (x - a) * (y * c_.a00(x, y) + c_.a01(x, y)) + y * c_.a10(x, y) + c_.a11(x, y);
}

double KernelSet::kb(double x, double y, double a) const { return (x - a) * c_.a02(x, y) + c_.a12(x, y); }

double KernelSet::kc(double x, double y, double b) const {
    return (y - b) * (x * c_.a00(x, y) + c_.a10(x, y)) + x * c_.a01(x, y) + c_.a11(x, y);
}

double KernelSet::kd(double x, double y, double b) const { return (y - b) * c_.a20(x, y) + c_.a21(x, y); }

double KernelSet::ke(double x, double y, double a, double b) const {
    return (x - a) * (y - b) * c_.a00(x, y) + (y - b) * c_.a10(x, y) + (x - a) * c_.a01(x, y) + c_.a11(x, y);
}

double KernelSet::p(double x, double y) const {
    return x * y * c_.a00(x, y) + y * c_.a10(x, y) + x * c_.a01(x, y) + c_.a11(x, y);
}

double KernelSet::q(double x, double y) const { return y * c_.a20(x, y) + c_.a21(x, y); }

double KernelSet::s(double x, double y) const { return x * c_.a02(x, y) + c_.a12(x, y); }

KernelTables make_tables(const Coefficients& coeffs, const Grid2D& grid) {
    KernelTables t;
    t.x.assign(grid.x().nodes().begin(), grid.x().nodes().end());
    t.y.assign(grid.y().nodes().begin(), grid.y().nodes().end());
    t.wx.assign(grid.x().weights().begin(), grid.x().weights().end());
    t.wy.assign(grid.y().weights().begin(), grid.y().weights().end());
    t.h1 = grid.domain().h1();
    t.h2 = grid.domain().h2();
    t.nx = grid.nx();
    t.ny = grid.ny();
    t.a21 = coeffs.a21.sample(grid).values;
    t.a12 = coeffs.a12.sample(grid).values;
    t.a20 = coeffs.a20.sample(grid).values;
    t.a02 = coeffs.a02.sample(grid).values;
    t.a11 = coeffs.a11.sample(grid).values;
    t.a10 = coeffs.a10.sample(grid).values;
    t.a01 = coeffs.a01.sample(grid).values;
    t.a00 = coeffs.a00.sample(grid).values;
    return t;
}

GridFn2D apply_V22(const Coefficients& coeffs, const SolutionBundle& bundle) {
    bundle.require_complete();
    const Grid2D& grid = bundle.u.grid;
    const KernelTables t = make_tables(coeffs, grid);
    GridFn2D out(grid);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        out.values[n] = bundle.uxxyy.values[n] + t.a21[n] * bundle.uxxy.values[n] +
                        t.a12[n] * bundle.uxyy.values[n] + t.a20[n] * bundle.uxx.values[n] +
                        t.a02[n] * bundle.uyy.values[n] + t.a11[n] * bundle.uxy.values[n] +
                        t.a10[n] * bundle.ux.values[n] + t.a01[n] * bundle.uy.values[n] +
                        t.a00[n] * bundle.u.values[n];
    }
    return out;
}

GridFn2D compute_Rtilde(const PdeProblem& problem, const B0Bundle& b0) {
    const Grid2D& grid = b0.b0.grid;
    const KernelTables t = make_tables(problem.coeffs, grid);
    GridFn2D r = problem.z22.sample(grid);
    for (std::size_t n = 0; n < grid.size(); ++n) {
        r.values[n] -= t.a20[n] * b0.b0_xx.values[n] + t.a02[n] * b0.b0_yy.values[n] +
                       t.a10[n] * b0.b0_x.values[n] + t.a01[n] * b0.b0_y.values[n] +
                       t.a00[n] * b0.b0.values[n];
    }
    return r;
}

LowerData lower_data(const NonclassicalData& z, const Grid2D& grid) {
    const double h1 = grid.domain().h1(), h2 = grid.domain().h2();
    const Axis& ax = grid.x();
    const Axis& ay = grid.y();
    LowerData d{0.0, GridFn1D(ax), GridFn1D(ay)};
    for (std::size_t i = 0; i < ax.size(); ++i) {
        const double x = ax.node(i);
        d.b21[i] = (z.z20_h2(x) - z.z20(x)) / h2;
    }
    for (std::size_t j = 0; j < ay.size(); ++j) {
        const double y = ay.node(j);
        d.b12[j] = (z.z02_h1(y) - z.z02(y)) / h1;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < ax.size(); ++k) s += ax.weight(k) * (h1 - ax.node(k)) * d.b21[k];
    d.b11 = (z.z01_h1 - z.z01) / h1 - s / h1;
    return d;
}

CoupledSystem assemble_coupled(const PdeProblem& problem, const Grid2D& grid, Exec exec) {
    if (!(grid.domain() == problem.domain)) throw InvalidInput("assemble_coupled: grid and problem domains differ");
    const KernelTables t = make_tables(problem.coeffs, grid);
    CoupledSystem sys{grid, CoupledLayout{grid.nx(), grid.ny()}, {}, {}};
    const std::size_t n = sys.layout.size();
    sys.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    assemble_coupled_matrix(t, sys.matrix, exec);

    const NonclassicalData& z = problem.data;
    sys.rhs.resize(static_cast<Eigen::Index>(n));
    sys.rhs(0) = z.z01_h1 - z.z01;
    for (std::size_t i = 0; i < grid.nx(); ++i) {
        const double x = grid.x().node(i);
        sys.rhs(static_cast<Eigen::Index>(sys.layout.b21(i))) = z.z20_h2(x) - z.z20(x);
    }
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        const double y = grid.y().node(j);
        sys.rhs(static_cast<Eigen::Index>(sys.layout.b12(j))) = z.z02_h1(y) - z.z02(y);
    }
    const GridFn2D r = compute_Rtilde(problem, assemble_B0(z, grid));
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            sys.rhs(static_cast<Eigen::Index>(sys.layout.b22(i, j))) = r.at(i, j);
        }
    }
    return sys;
}

DiscreteOperator::DiscreteOperator(Grid2D grid, KernelTables tables, GridFn2D rhs, Exec exec)
    : grid_(std::move(grid)), tables_(std::move(tables)), rhs_(std::move(rhs)), exec_(exec) {
    if (rhs_.size() != grid_.size()) throw StructuralError("DiscreteOperator: rhs does not match grid");
}

void DiscreteOperator::apply_kernel(std::span<const double> b, std::span<double> out) const {
    if (b.size() != size() || out.size() != size()) throw StructuralError("DiscreteOperator: vector size mismatch");
    mangeron::apply_kernel(tables_, b, out, exec_);
}

std::vector<double> DiscreteOperator::apply(std::span<const double> b) const {
    std::vector<double> out(size());
    apply_kernel(b, out);
    for (std::size_t n = 0; n < size(); ++n) out[n] += b[n];
    return out;
}

const Eigen::MatrixXd& DiscreteOperator::dense_kernel() const {
    if (!dense_) throw InvalidInput("DiscreteOperator: dense kernel matrix was not formed");
    return *dense_;
}

void DiscreteOperator::form_dense() {
    if (dense_) return;
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXd k(n, n);
    assemble_kernel_matrix(tables_, k, exec_);
    dense_ = std::move(k);
}

DiscreteOperator DiscreteOperator::with_rhs(GridFn2D rhs) const {
    DiscreteOperator op = *this;
    if (!(rhs.grid == grid_) || rhs.size() != grid_.size()) {
        throw StructuralError("DiscreteOperator::with_rhs: grid mismatch");
    }
    op.rhs_ = std::move(rhs);
    return op;
}

DiscreteOperator assemble_eliminated(const PdeProblem& problem, const Grid2D& grid, DenseMode dense, Exec exec) {
    if (!(grid.domain() == problem.domain)) {
        throw InvalidInput("assemble_eliminated: grid and problem domains differ");
    }
    KernelTables t = make_tables(problem.coeffs, grid);
    GridFn2D g = compute_Rtilde(problem, assemble_B0(problem.data, grid));

    // Subtract the data-only parts of the lower unknowns' terms.
    const LowerData d = lower_data(problem.data, grid);
    detail::ApplyWork w(t);
    w.b21h = d.b21.values;
    w.b12h = d.b12.values;
    w.b11h = d.b11;
    detail::running_integrals(t.x.data(), t.nx, w.b21h.data(), 1, w.c21.data(), w.m21.data(), 1);
    detail::running_integrals(t.y.data(), t.ny, w.b12h.data(), 1, w.c12.data(), w.m12.data(), 1);
    std::vector<double> known(t.size());
    for (std::size_t j = 0; j < t.ny; ++j) detail::apply_combine_row(t, w, j, known);
    for (std::size_t n = 0; n < t.size(); ++n) g.values[n] -= known[n];

    DiscreteOperator op(grid, std::move(t), std::move(g), exec);
    if (dense == DenseMode::Always || (dense == DenseMode::Auto && grid.size() <= kDenseLimit)) op.form_dense();
    return op;
}

}  // namespace mangeron
