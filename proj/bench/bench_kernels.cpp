// Serial reference versus OpenMP kernels: dense kernel matrix, matrix-free
// apply and coupled-system assembly.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "mangeron/kernels.hpp"
#include "mangeron/mms.hpp"
#include "mangeron/reduction.hpp"

using namespace mangeron;

namespace {

KernelTables tables(std::size_t n) {
    std::mt19937_64 rng(1);
    return make_tables(random_smooth_coefficients(rng, 0.5), build_grid(Domain(1.0, 1.0), n, n));
}

template <Exec E>
void BM_KernelMatrix(benchmark::State& state) {
    const KernelTables t = tables(static_cast<std::size_t>(state.range(0)));
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd k(n, n);
    for (auto _ : state) {
        assemble_kernel_matrix(t, k, E);
        benchmark::DoNotOptimize(k.data());
    }
    state.counters["threads"] = E == Exec::Parallel ? parallel_threads() : 1;
}

template <Exec E>
void BM_Apply(benchmark::State& state) {
    const KernelTables t = tables(static_cast<std::size_t>(state.range(0)));
    std::vector<double> b(t.size(), 1.0), out(t.size());
    for (auto _ : state) {
        apply_kernel(t, b, out, E);
        benchmark::DoNotOptimize(out.data());
    }
    state.counters["threads"] = E == Exec::Parallel ? parallel_threads() : 1;
}

template <Exec E>
void BM_CoupledMatrix(benchmark::State& state) {
    const KernelTables t = tables(static_cast<std::size_t>(state.range(0)));
    const auto m = static_cast<Eigen::Index>(CoupledLayout{t.nx, t.ny}.size());
    Eigen::MatrixXd a(m, m);
    for (auto _ : state) {
        assemble_coupled_matrix(t, a, E);
        benchmark::DoNotOptimize(a.data());
    }
}

}  // namespace

BENCHMARK(BM_KernelMatrix<Exec::Serial>)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_KernelMatrix<Exec::Parallel>)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Apply<Exec::Serial>)->Arg(33)->Arg(129)->Arg(257)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Apply<Exec::Parallel>)->Arg(33)->Arg(129)->Arg(257)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CoupledMatrix<Exec::Serial>)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CoupledMatrix<Exec::Parallel>)->Arg(17)->Arg(33)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
