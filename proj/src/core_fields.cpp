#include "mangeron/core_fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mangeron/error.hpp"

namespace mangeron {

Domain::Domain(double h1, double h2) : h1_(h1), h2_(h2) {
    if (!(h1 > 0.0) || !(h2 > 0.0) || !std::isfinite(h1) || !std::isfinite(h2)) {
        throw InvalidInput("Domain: side lengths must be positive and finite");
    }
}

// ---------------------------------------------------------------- Axis

Axis::Axis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
    if (nodes_.size() < 2) throw InvalidInput("Axis: need at least two nodes");
    if (nodes_.front() != 0.0) throw InvalidInput("Axis: first node must be 0");
    for (std::size_t i = 1; i < nodes_.size(); ++i) {
        if (!(nodes_[i] > nodes_[i - 1])) throw InvalidInput("Axis: nodes must be strictly increasing");
    }
    const std::size_t n = nodes_.size();
    weights_.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        const double half = 0.5 * (nodes_[i] - nodes_[i - 1]);
        weights_[i - 1] += half;
        weights_[i] += half;
    }
}

double Axis::partial_weight(std::size_t i, std::size_t k) const noexcept {
    if (i == 0 || k > i) return 0.0;
    if (k == 0) return 0.5 * (nodes_[1] - nodes_[0]);
    if (k == i) return 0.5 * (nodes_[i] - nodes_[i - 1]);
    return weights_[k];
}

std::size_t Axis::find_node(double t) const noexcept {
    const double tol = 1e-12 * std::max(1.0, length());
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), t - tol);
    if (it != nodes_.end() && std::abs(*it - t) <= tol) {
        return static_cast<std::size_t>(it - nodes_.begin());
    }
    return npos;
}

double Axis::max_spacing() const noexcept {
    double h = 0.0;
    for (std::size_t i = 1; i < nodes_.size(); ++i) h = std::max(h, nodes_[i] - nodes_[i - 1]);
    return h;
}

Axis Axis::refined() const {
    std::vector<double> fine;
    fine.reserve(2 * nodes_.size() - 1);
    for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
        fine.push_back(nodes_[i]);
        fine.push_back(0.5 * (nodes_[i] + nodes_[i + 1]));
    }
    fine.push_back(nodes_.back());
    return Axis(std::move(fine));
}

Grid2D::Grid2D(Domain domain, Axis x, Axis y)
    : domain_(domain), x_(std::move(x)), y_(std::move(y)) {
    const double tol = 1e-12;
    if (std::abs(x_.length() - domain_.h1()) > tol * domain_.h1() ||
        std::abs(y_.length() - domain_.h2()) > tol * domain_.h2()) {
        throw InvalidInput("Grid2D: axis lengths do not match the domain");
    }
}

Axis build_axis(double length, std::size_t n, std::span<const double> breakpoints) {
    if (n < 3) throw InvalidInput("build_grid: node count must be at least 3");
    std::vector<double> nodes(n);
    for (std::size_t k = 0; k < n; ++k) {
        nodes[k] = length * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    nodes.back() = length;
    const double tol = 1e-12 * length;
    for (double b : breakpoints) {
        if (!(b > 0.0) || !(b < length)) {
            std::ostringstream os;
            os << "build_grid: breakpoint " << b << " outside the open interval (0, " << length << ")";
            throw InvalidInput(os.str());
        }
        auto it = std::lower_bound(nodes.begin(), nodes.end(), b - tol);
        if (it != nodes.end() && std::abs(*it - b) <= tol) {
            *it = b;  // snap so the cut line is represented exactly
        } else {
            nodes.insert(it, b);
        }
    }
    return Axis(std::move(nodes));
}

Grid2D build_grid(const Domain& domain, std::size_t n1, std::size_t n2,
                  std::span<const double> x_breakpoints, std::span<const double> y_breakpoints) {
    return Grid2D(domain, build_axis(domain.h1(), n1, x_breakpoints),
                  build_axis(domain.h2(), n2, y_breakpoints));
}

std::string to_string(FieldKind kind) {
    switch (kind) {
        case FieldKind::Analytic: return "analytic";
        case FieldKind::Piecewise: return "piecewise";
        case FieldKind::Samples: return "samples";
    }
    return "unknown";
}

std::string to_string(Smoothness tag) {
    switch (tag) {
        case Smoothness::Lp: return "L_p";
        case Smoothness::LinfX_LpY: return "L_inf^x L_p^y";
        case Smoothness::LpX_LinfY: return "L_p^x L_inf^y";
        case Smoothness::Continuous: return "continuous";
    }
    return "unknown";
}

// ---------------------------------------------------------------- grid functions

GridFn1D::GridFn1D(Axis a, std::vector<double> v) : axis(std::move(a)), values(std::move(v)) {
    if (values.size() != axis.size()) throw StructuralError("GridFn1D: value count does not match axis");
}

GridFn2D::GridFn2D(Grid2D g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size()) throw StructuralError("GridFn2D: value count does not match grid");
}

// ---------------------------------------------------------------- Field1D

namespace {

double interpolate_linear(std::span<const double> nodes, std::span<const double> values, double t) {
    if (t <= nodes.front()) return values.front();
    if (t >= nodes.back()) return values.back();
    auto it = std::upper_bound(nodes.begin(), nodes.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - nodes.begin());
    const double t0 = nodes[k - 1], t1 = nodes[k];
    const double s = (t - t0) / (t1 - t0);
    return (1.0 - s) * values[k - 1] + s * values[k];
}

// Richardson-extrapolated central differences for closures without
// derivative evaluators.
double numeric_derivative(const Field1D::Fn& f, double t, int order) {
    const double h = 1e-3 * std::max(1.0, std::abs(t));
    auto central = [&](double s) {
        if (order == 1) return (f(t + s) - f(t - s)) / (2.0 * s);
        return (f(t + s) - 2.0 * f(t) + f(t - s)) / (s * s);
    };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

}  // namespace

Field1D::Field1D() : kind_(FieldKind::Analytic), eval_([](double) { return 0.0; }),
                     d1_([](double) { return 0.0; }), d2_([](double) { return 0.0; }),
                     expression_("0") {}

Field1D Field1D::constant(double c) {
    std::ostringstream os;
    os.precision(17);
    os << c;
    return analytic([c](double) { return c; }, [](double) { return 0.0; },
                    [](double) { return 0.0; }, os.str());
}

Field1D Field1D::analytic(Fn f, Fn d1, Fn d2, std::string expression) {
    Field1D out;
    out.kind_ = FieldKind::Analytic;
    out.eval_ = std::move(f);
    out.d1_ = std::move(d1);
    out.d2_ = std::move(d2);
    out.expression_ = std::move(expression);
    return out;
}

Field1D Field1D::samples(std::vector<double> nodes, std::vector<double> values) {
    if (nodes.size() < 2 || nodes.size() != values.size()) {
        throw InvalidInput("Field1D::samples: need matching node/value arrays of length >= 2");
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (!(nodes[i] > nodes[i - 1])) throw InvalidInput("Field1D::samples: nodes must increase");
    }
    Field1D out;
    out.kind_ = FieldKind::Samples;
    out.nodes_ = std::move(nodes);
    out.values_ = std::move(values);
    out.d1_ = {};
    out.d2_ = {};
    out.expression_.clear();
    // The closure owns copies so the field stays valid after moves.
    out.eval_ = [n = out.nodes_, v = out.values_](double t) { return interpolate_linear(n, v, t); };
    return out;
}

Field1D Field1D::samples(const GridFn1D& f) {
    return samples(std::vector<double>(f.axis.nodes().begin(), f.axis.nodes().end()), f.values);
}

Field1D Field1D::derivative(int order) const {
    if (order == 0) return *this;
    if (order != 1 && order != 2) throw InvalidInput("Field1D::derivative: order must be 0, 1 or 2");
    if (kind_ == FieldKind::Samples) {
        return samples(nodes_, differentiate_samples(nodes_, values_, order));
    }
    if (order == 1 && d1_) return analytic(d1_, d2_, {});
    if (order == 2 && d2_) return analytic(d2_);
    Fn f = eval_;
    return analytic([f, order](double t) { return numeric_derivative(f, t, order); });
}

GridFn1D Field1D::sample(const Axis& axis) const {
    std::vector<double> v(axis.size());
    for (std::size_t i = 0; i < axis.size(); ++i) v[i] = eval_(axis.node(i));
    return GridFn1D(axis, std::move(v));
}

// ---------------------------------------------------------------- Field2D

Field2D::Field2D() : kind_(FieldKind::Analytic), tag_(Smoothness::Continuous),
                     eval_([](double, double) { return 0.0; }), expression_("0"), zero_(true) {}

Field2D Field2D::zero(Smoothness tag) {
    Field2D out;
    out.tag_ = tag;
    return out;
}

Field2D Field2D::constant(double c, Smoothness tag) {
    if (c == 0.0) return zero(tag);
    std::ostringstream os;
    os.precision(17);
    os << c;
    return analytic([c](double, double) { return c; }, tag, os.str());
}

Field2D Field2D::analytic(Fn f, Smoothness tag, std::string expression) {
    Field2D out;
    out.kind_ = FieldKind::Analytic;
    out.tag_ = tag;
    out.eval_ = std::move(f);
    out.expression_ = std::move(expression);
    out.zero_ = false;
    return out;
}

Field2D Field2D::piecewise(std::vector<double> x_breaks, std::vector<double> y_breaks,
                           std::vector<Fn> cells, Smoothness tag, std::string expression) {
    for (const auto* b : {&x_breaks, &y_breaks}) {
        for (std::size_t i = 1; i < b->size(); ++i) {
            if (!((*b)[i] > (*b)[i - 1])) throw InvalidInput("Field2D::piecewise: breakpoints must increase");
        }
    }
    const std::size_t ncx = x_breaks.size() + 1, ncy = y_breaks.size() + 1;
    if (cells.size() != ncx * ncy) {
        throw InvalidInput("Field2D::piecewise: expected " + std::to_string(ncx * ncy) + " cells, got " +
                           std::to_string(cells.size()));
    }
    Field2D out;
    out.kind_ = FieldKind::Piecewise;
    out.tag_ = tag;
    out.expression_ = std::move(expression);
    out.zero_ = false;
    out.x_breaks_ = x_breaks;
    out.y_breaks_ = y_breaks;
    out.eval_ = [xb = std::move(x_breaks), yb = std::move(y_breaks), c = std::move(cells), ncy](double x, double y) {
        // lower_bound picks the first cell whose closure contains the point
        const auto i = static_cast<std::size_t>(std::lower_bound(xb.begin(), xb.end(), x) - xb.begin());
        const auto j = static_cast<std::size_t>(std::lower_bound(yb.begin(), yb.end(), y) - yb.begin());
        return c[i * ncy + j](x, y);
    };
    return out;
}

Field2D Field2D::samples(const GridFn2D& f, Smoothness tag) {
    if (!f.complete()) throw StructuralError("Field2D::samples: incomplete grid function");
    Field2D out;
    out.kind_ = FieldKind::Samples;
    out.tag_ = tag;
    out.expression_.clear();
    out.zero_ = false;
    out.eval_ = [g = f](double x, double y) {
        auto locate = [](std::span<const double> t, double s, std::size_t& k, double& w) {
            if (s <= t.front()) { k = 0; w = 0.0; return; }
            if (s >= t.back()) { k = t.size() - 2; w = 1.0; return; }
            k = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), s) - t.begin()) - 1;
            w = (s - t[k]) / (t[k + 1] - t[k]);
        };
        std::size_t i, j;
        double sx, sy;
        locate(g.grid.x().nodes(), x, i, sx);
        locate(g.grid.y().nodes(), y, j, sy);
        return (1 - sx) * (1 - sy) * g.at(i, j) + sx * (1 - sy) * g.at(i + 1, j) +
               (1 - sx) * sy * g.at(i, j + 1) + sx * sy * g.at(i + 1, j + 1);
    };
    return out;
}

Field2D Field2D::with_smoothness(Smoothness tag) const {
    Field2D out = *this;
    out.tag_ = tag;
    return out;
}

GridFn2D Field2D::sample(const Grid2D& grid) const {
    GridFn2D out(grid);
    if (zero_) return out;
    for (std::size_t j = 0; j < grid.ny(); ++j) {
        for (std::size_t i = 0; i < grid.nx(); ++i) {
            out.at(i, j) = eval_(grid.x().node(i), grid.y().node(j));
        }
    }
    return out;
}

// ---------------------------------------------------------------- norms, quadrature

NormSpec::NormSpec(double p) : p_(p) {
    if (!(p >= 1.0)) throw InvalidInput("NormSpec: p must be >= 1");
}

std::array<const GridFn2D*, 9> SolutionBundle::by_order() const {
    return {&u, &uy, &uyy, &ux, &uxy, &uxyy, &uxx, &uxxy, &uxxyy};
}

std::array<GridFn2D*, 9> SolutionBundle::by_order() {
    return {&u, &uy, &uyy, &ux, &uxy, &uxyy, &uxx, &uxxy, &uxxyy};
}

void SolutionBundle::require_complete() const {
    static constexpr const char* names[9] = {"u", "uy", "uyy", "ux", "uxy", "uxyy", "uxx", "uxxy", "uxxyy"};
    const auto parts = by_order();
    for (std::size_t k = 0; k < 9; ++k) {
        if (!parts[k]->complete() || !(parts[k]->grid == u.grid)) {
            throw StructuralError(std::string("SolutionBundle: derivative grid '") + names[k] +
                                  "' is missing or on a different grid");
        }
    }
}

double quad_1d(const GridFn1D& f) {
    if (f.values.size() != f.axis.size()) throw StructuralError("quad_1d: shape mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.axis.weight(i) * f.values[i];
    return s;
}

double quad_2d(const GridFn2D& f) {
    if (!f.complete()) throw StructuralError("quad_2d: shape mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < f.grid.ny(); ++j) {
        double row = 0.0;
        for (std::size_t i = 0; i < f.grid.nx(); ++i) row += f.grid.x().weight(i) * f.at(i, j);
        s += f.grid.y().weight(j) * row;
    }
    return s;
}

double moment_integral_1d(const GridFn1D& f, std::size_t node) {
    if (f.values.size() != f.axis.size()) throw StructuralError("moment_integral_1d: shape mismatch");
    if (node >= f.axis.size()) throw InvalidInput("moment_integral_1d: node index out of range");
    const double x = f.axis.node(node);
    double s = 0.0;
    for (std::size_t k = 0; k <= node; ++k) s += f.axis.partial_weight(node, k) * (x - f.axis.node(k)) * f.values[k];
    return s;
}

double moment_integral_1d(const GridFn1D& f, double x) {
    const std::size_t node = f.axis.find_node(x);
    if (node == Axis::npos) {
        throw InvalidInput("moment_integral_1d: evaluation point is not a grid node");
    }
    return moment_integral_1d(f, node);
}

std::vector<double> cumulative_integral(std::span<const double> nodes, std::span<const double> f) {
    std::vector<double> c(f.size(), 0.0);
    for (std::size_t i = 1; i < f.size(); ++i) {
        c[i] = c[i - 1] + 0.5 * (nodes[i] - nodes[i - 1]) * (f[i - 1] + f[i]);
    }
    return c;
}

std::vector<double> cumulative_moment(std::span<const double> nodes, std::span<const double> f) {
    std::vector<double> m(f.size(), 0.0);
    double c = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) {
        const double d = nodes[i] - nodes[i - 1];
        m[i] = m[i - 1] + d * c + 0.5 * d * d * f[i - 1];
        c += 0.5 * d * (f[i - 1] + f[i]);
    }
    return m;
}

GridFn1D cumulative_integral(const GridFn1D& f) {
    return GridFn1D(f.axis, cumulative_integral(f.axis.nodes(), f.values));
}

GridFn1D cumulative_moment(const GridFn1D& f) {
    return GridFn1D(f.axis, cumulative_moment(f.axis.nodes(), f.values));
}

double lp_norm(const GridFn1D& f, const NormSpec& spec) {
    if (f.values.size() != f.axis.size()) throw StructuralError("lp_norm: shape mismatch");
    if (spec.is_infinity()) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double p = spec.p();
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f.axis.weight(i) * std::pow(std::abs(f.values[i]), p);
    return std::pow(s, 1.0 / p);
}

double lp_norm(const GridFn2D& f, const NormSpec& spec) {
    if (!f.complete()) throw StructuralError("lp_norm: shape mismatch");
    if (spec.is_infinity()) {
        double m = 0.0;
        for (double v : f.values) m = std::max(m, std::abs(v));
        return m;
    }
    const double p = spec.p();
    double s = 0.0;
    for (std::size_t j = 0; j < f.grid.ny(); ++j) {
        double row = 0.0;
        for (std::size_t i = 0; i < f.grid.nx(); ++i) row += f.grid.x().weight(i) * std::pow(std::abs(f.at(i, j)), p);
        s += f.grid.y().weight(j) * row;
    }
    return std::pow(s, 1.0 / p);
}

double wp22_norm(const SolutionBundle& bundle, const NormSpec& spec) {
    bundle.require_complete();
    double s = 0.0;
    for (const GridFn2D* part : bundle.by_order()) s += lp_norm(*part, spec);
    return s;
}

// ---------------------------------------------------------------- finite differences

std::vector<double> fd_weights(double x0, std::span<const double> x, int order) {
    const std::size_t n = x.size();
    if (order < 0 || n <= static_cast<std::size_t>(order)) {
        throw InvalidInput("fd_weights: stencil too small for the requested order");
    }
    const auto m = static_cast<std::size_t>(order);
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const std::size_t mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (std::size_t j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

std::vector<double> differentiate_samples(std::span<const double> nodes, std::span<const double> values,
                                          int order) {
    const std::size_t n = nodes.size();
    if (n != values.size()) throw StructuralError("differentiate_samples: shape mismatch");
    if (n < 3) throw InvalidInput("differentiate_samples: need at least 3 samples");
    std::vector<double> d(n);
    auto apply = [&](std::size_t at, std::size_t first, std::size_t count) {
        const auto w = fd_weights(nodes[at], nodes.subspan(first, count), order);
        double s = 0.0;
        for (std::size_t k = 0; k < count; ++k) s += w[k] * values[first + k];
        return s;
    };
    const std::size_t edge = (order == 2 && n >= 4) ? 4 : 3;
    d[0] = apply(0, 0, edge);
    d[n - 1] = apply(n - 1, n - edge, edge);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = apply(i, i - 1, 3);
    return d;
}

}  // namespace mangeron
