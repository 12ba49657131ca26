#include <array>
#include <cmath>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "mangeron/error.hpp"
#include "mangeron/mms.hpp"
#include "mangeron/reduction.hpp"

namespace mangeron {

namespace {

// Weights of the 3-point stencil {t[i-1], t[i], t[i+1]} for orders 0..2.
std::array<std::array<double, 3>, 3> stencil(std::span<const double> t, std::size_t i) {
    const std::array<double, 3> pts{t[i - 1], t[i], t[i + 1]};
    std::array<std::array<double, 3>, 3> w{};
    for (int order = 0; order <= 2; ++order) {
        const auto v = fd_weights(t[i], pts, order);
        for (std::size_t k = 0; k < 3; ++k) w[static_cast<std::size_t>(order)][k] = v[k];
    }
    return w;
}

}  // namespace

GridFn2D fd_oracle(const PdeProblem& problem, const Grid2D& grid) {
    const ClassicalData cd = nonclassical_to_classical(problem.data, grid);
    const KernelTables t = make_tables(problem.coeffs, grid);
    const GridFn2D f = problem.z22.sample(grid);
    const std::size_t nx = grid.nx(), ny = grid.ny(), n = grid.size();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(9 * n);
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < ny; ++j) {
        const double y = grid.y().node(j);
        for (std::size_t i = 0; i < nx; ++i) {
            const double x = grid.x().node(i);
            const auto row = static_cast<int>(grid.index(i, j));
            if (i == 0 || i == nx - 1 || j == 0 || j == ny - 1) {
                trip.emplace_back(row, row, 1.0);
                if (i == 0) {
                    rhs(row) = cd.phi1(y);
                } else if (i == nx - 1) {
                    rhs(row) = cd.phi2(y);
                } else if (j == 0) {
                    rhs(row) = cd.psi1(x);
                } else {
                    rhs(row) = cd.psi2(x);
                }
                continue;
            }
            const auto wx = stencil(grid.x().nodes(), i);
            const auto wy = stencil(grid.y().nodes(), j);
            const std::size_t m = grid.index(i, j);
            // a[p][q] multiplies D_x^p D_y^q u
            const double a[3][3] = {{t.a00[m], t.a01[m], t.a02[m]},
                                    {t.a10[m], t.a11[m], t.a12[m]},
                                    {t.a20[m], t.a21[m], 1.0}};
            for (std::size_t l = 0; l < 3; ++l) {
                for (std::size_t k = 0; k < 3; ++k) {
                    double c = 0.0;
                    for (std::size_t p = 0; p < 3; ++p) {
                        for (std::size_t q = 0; q < 3; ++q) c += a[p][q] * wx[p][k] * wy[q][l];
                    }
                    if (c != 0.0) trip.emplace_back(row, static_cast<int>(grid.index(i + k - 1, j + l - 1)), c);
                }
            }
            rhs(row) = f.at(i, j);
        }
    }

    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        throw SingularSystemError("fd_oracle: sparse factorization failed: " + lu.lastErrorMessage(),
                                  std::numeric_limits<double>::infinity());
    }
    const Eigen::VectorXd u = lu.solve(rhs);
    if (lu.info() != Eigen::Success || !u.allFinite()) {
        throw SingularSystemError("fd_oracle: sparse solve failed", std::numeric_limits<double>::infinity());
    }
    return GridFn2D(grid, std::vector<double>(u.data(), u.data() + u.size()));
}

}  // namespace mangeron
