#include <omp.h>

#include "mangeron/kernels.hpp"

namespace mangeron {

int parallel_threads() { return omp_get_max_threads(); }

namespace omp {

void assemble_kernel_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> k) {
    const long n = static_cast<long>(t.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long r = 0; r < n; ++r) {
        const auto row = static_cast<std::size_t>(r);
        detail::kernel_matrix_row(t, row % t.nx, row / t.nx, k);
    }
}

void apply_kernel(const KernelTables& t, std::span<const double> b22, std::span<double> out) {
    detail::ApplyWork w(t);
    const long nx = static_cast<long>(t.nx), ny = static_cast<long>(t.ny);
#pragma omp parallel
    {
#pragma omp for schedule(static)
        for (long i = 0; i < nx; ++i) detail::apply_column_stage(t, b22, w, static_cast<std::size_t>(i));
#pragma omp for schedule(static)
        for (long j = 0; j < ny; ++j) detail::apply_row_stage(t, b22, w, static_cast<std::size_t>(j));
#pragma omp single
        detail::apply_lower_stage(t, w);
#pragma omp for schedule(static)
        for (long j = 0; j < ny; ++j) detail::apply_combine_row(t, w, static_cast<std::size_t>(j), out);
    }
}

void assemble_coupled_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> a) {
    const long n = static_cast<long>(CoupledLayout{t.nx, t.ny}.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (long r = 0; r < n; ++r) detail::coupled_matrix_row(t, static_cast<std::size_t>(r), a);
}

}  // namespace omp

}  // namespace mangeron
