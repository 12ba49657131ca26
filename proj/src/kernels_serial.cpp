#include "mangeron/kernels.hpp"

namespace mangeron {

namespace detail {

void running_integrals(const double* nodes, std::size_t n, const double* f, std::size_t f_stride, double* c,
                       double* m, std::size_t out_stride) {
    double cs = 0.0, ms = 0.0;
    c[0] = 0.0;
    m[0] = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double d = nodes[k] - nodes[k - 1];
        const double f0 = f[(k - 1) * f_stride], f1 = f[k * f_stride];
        ms = ms + d * cs + 0.5 * d * d * f0;
        cs = cs + 0.5 * d * (f0 + f1);
        c[k * out_stride] = cs;
        m[k * out_stride] = ms;
    }
}

ApplyWork::ApplyWork(const KernelTables& t)
    : b21h(t.nx), b12h(t.ny), cy(t.size()), my(t.size()), cx(t.size()), mx(t.size()), cc(t.size()),
      mc(t.size()), cm(t.size()), mm(t.size()), c21(t.nx), m21(t.nx), c12(t.ny), m12(t.ny) {}

void apply_column_stage(const KernelTables& t, std::span<const double> b22, ApplyWork& w, std::size_t i) {
    double s = 0.0;
    for (std::size_t l = 0; l < t.ny; ++l) s += t.wy[l] * (t.h2 - t.y[l]) * b22[t.index(i, l)];
    w.b21h[i] = -s / t.h2;
    running_integrals(t.y.data(), t.ny, b22.data() + i, t.nx, w.cy.data() + i, w.my.data() + i, t.nx);
}

void apply_row_stage(const KernelTables& t, std::span<const double> b22, ApplyWork& w, std::size_t j) {
    const std::size_t r = t.index(0, j);
    double s = 0.0;
    for (std::size_t k = 0; k < t.nx; ++k) s += t.wx[k] * (t.h1 - t.x[k]) * b22[r + k];
    w.b12h[j] = -s / t.h1;
    const double* x = t.x.data();
    running_integrals(x, t.nx, b22.data() + r, 1, w.cx.data() + r, w.mx.data() + r, 1);
    running_integrals(x, t.nx, w.cy.data() + r, 1, w.cc.data() + r, w.mc.data() + r, 1);
    running_integrals(x, t.nx, w.my.data() + r, 1, w.cm.data() + r, w.mm.data() + r, 1);
}

void apply_lower_stage(const KernelTables& t, ApplyWork& w) {
    double s = 0.0;
    for (std::size_t k = 0; k < t.nx; ++k) s += t.wx[k] * (t.h1 - t.x[k]) * w.b21h[k];
    w.b11h = -s / t.h1;
    running_integrals(t.x.data(), t.nx, w.b21h.data(), 1, w.c21.data(), w.m21.data(), 1);
    running_integrals(t.y.data(), t.ny, w.b12h.data(), 1, w.c12.data(), w.m12.data(), 1);
}

void apply_combine_row(const KernelTables& t, const ApplyWork& w, std::size_t j, std::span<double> out) {
    const double y = t.y[j];
    for (std::size_t i = 0; i < t.nx; ++i) {
        const std::size_t n = t.index(i, j);
        const double x = t.x[i];
        double v = t.p(i, j) * w.b11h + t.q(i, j) * w.b21h[i] + t.s(i, j) * w.b12h[j];
        // ∫ KA b21 and ∫ KC b12
        v += (y * t.a00[n] + t.a01[n]) * w.m21[i] + (y * t.a10[n] + t.a11[n]) * w.c21[i];
        v += (x * t.a00[n] + t.a10[n]) * w.m12[j] + (x * t.a01[n] + t.a11[n]) * w.c12[j];
        // ∫ KB b22(α,y) and ∫ KD b22(x,β)
        v += t.a02[n] * w.mx[n] + t.a12[n] * w.cx[n];
        v += t.a20[n] * w.my[n] + t.a21[n] * w.cy[n];
        // ∬ KE b22
        v += t.a00[n] * w.mm[n] + t.a10[n] * w.cm[n] + t.a01[n] * w.mc[n] + t.a11[n] * w.cc[n];
        out[n] = v;
    }
}

void kernel_matrix_row(const KernelTables& t, std::size_t i, std::size_t j, Eigen::Ref<Eigen::MatrixXd> k) {
    const std::size_t row = t.index(i, j);
    for (std::size_t c = 0; c < t.size(); ++c) k(row, c) = 0.0;

    // Coefficient of b21h(kk) and b12h(l) in this row.
    std::vector<double> c21(t.nx), c12(t.ny);
    const double p = t.p(i, j);
    for (std::size_t kk = 0; kk < t.nx; ++kk) {
        double c = -p * t.wx[kk] * (t.h1 - t.x[kk]) / t.h1;
        if (kk <= i) c += t.ka(i, j, kk) * t.pwx(i, kk);
        if (kk == i) c += t.q(i, j);
        c21[kk] = c;
    }
    for (std::size_t l = 0; l < t.ny; ++l) {
        double c = 0.0;
        if (l <= j) c += t.kc(i, j, l) * t.pwy(j, l);
        if (l == j) c += t.s(i, j);
        c12[l] = c;
    }
    for (std::size_t l = 0; l < t.ny; ++l) {
        const double ey = -t.wy[l] * (t.h2 - t.y[l]) / t.h2;
        for (std::size_t kk = 0; kk < t.nx; ++kk) {
            const double ex = -t.wx[kk] * (t.h1 - t.x[kk]) / t.h1;
            k(row, t.index(kk, l)) += c21[kk] * ey + c12[l] * ex;
        }
    }
    for (std::size_t kk = 0; kk <= i; ++kk) k(row, t.index(kk, j)) += t.kb(i, j, kk) * t.pwx(i, kk);
    for (std::size_t l = 0; l <= j; ++l) k(row, t.index(i, l)) += t.kd(i, j, l) * t.pwy(j, l);
    for (std::size_t l = 0; l <= j; ++l) {
        const double wl = t.pwy(j, l);
        for (std::size_t kk = 0; kk <= i; ++kk) k(row, t.index(kk, l)) += t.ke(i, j, kk, l) * t.pwx(i, kk) * wl;
    }
}

void coupled_matrix_row(const KernelTables& t, std::size_t row, Eigen::Ref<Eigen::MatrixXd> a) {
    const CoupledLayout lay{t.nx, t.ny};
    for (std::size_t c = 0; c < lay.size(); ++c) a(row, c) = 0.0;

    if (row == lay.b11()) {
        // u_y(h1, 0): h1 b11 + ∫ (h1 − α) b21
        a(row, lay.b11()) = t.h1;
        for (std::size_t k = 0; k < t.nx; ++k) a(row, lay.b21(k)) = t.wx[k] * (t.h1 - t.x[k]);
        return;
    }
    if (row < lay.b12(0)) {
        // u_xx(x_i, h2): h2 b21(x) + ∫ (h2 − β) b22(x, β)
        const std::size_t i = row - lay.b21(0);
        a(row, lay.b21(i)) = t.h2;
        for (std::size_t l = 0; l < t.ny; ++l) a(row, lay.b22(i, l)) = t.wy[l] * (t.h2 - t.y[l]);
        return;
    }
    if (row < lay.b22(0, 0)) {
        // u_yy(h1, y_j): h1 b12(y) + ∫ (h1 − α) b22(α, y)
        const std::size_t j = row - lay.b12(0);
        a(row, lay.b12(j)) = t.h1;
        for (std::size_t k = 0; k < t.nx; ++k) a(row, lay.b22(k, j)) = t.wx[k] * (t.h1 - t.x[k]);
        return;
    }
    const std::size_t n = row - lay.b22(0, 0);
    const std::size_t i = n % t.nx, j = n / t.nx;
    a(row, lay.b22(i, j)) = 1.0;
    a(row, lay.b11()) = t.p(i, j);
    a(row, lay.b21(i)) += t.q(i, j);
    for (std::size_t k = 0; k <= i; ++k) a(row, lay.b21(k)) += t.ka(i, j, k) * t.pwx(i, k);
    a(row, lay.b12(j)) += t.s(i, j);
    for (std::size_t l = 0; l <= j; ++l) a(row, lay.b12(l)) += t.kc(i, j, l) * t.pwy(j, l);
    for (std::size_t k = 0; k <= i; ++k) a(row, lay.b22(k, j)) += t.kb(i, j, k) * t.pwx(i, k);
    for (std::size_t l = 0; l <= j; ++l) a(row, lay.b22(i, l)) += t.kd(i, j, l) * t.pwy(j, l);
    for (std::size_t l = 0; l <= j; ++l) {
        const double wl = t.pwy(j, l);
        for (std::size_t k = 0; k <= i; ++k) a(row, lay.b22(k, l)) += t.ke(i, j, k, l) * t.pwx(i, k) * wl;
    }
}

}  // namespace detail

namespace serial {

void assemble_kernel_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> k) {
    for (std::size_t j = 0; j < t.ny; ++j) {
        for (std::size_t i = 0; i < t.nx; ++i) detail::kernel_matrix_row(t, i, j, k);
    }
}

void apply_kernel(const KernelTables& t, std::span<const double> b22, std::span<double> out) {
    detail::ApplyWork w(t);
    for (std::size_t i = 0; i < t.nx; ++i) detail::apply_column_stage(t, b22, w, i);
    for (std::size_t j = 0; j < t.ny; ++j) detail::apply_row_stage(t, b22, w, j);
    detail::apply_lower_stage(t, w);
    for (std::size_t j = 0; j < t.ny; ++j) detail::apply_combine_row(t, w, j, out);
}

void assemble_coupled_matrix(const KernelTables& t, Eigen::Ref<Eigen::MatrixXd> a) {
    const CoupledLayout lay{t.nx, t.ny};
    for (std::size_t r = 0; r < lay.size(); ++r) detail::coupled_matrix_row(t, r, a);
}

}  // namespace serial

}  // namespace mangeron
