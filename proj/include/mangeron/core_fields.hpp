#pragma once

// Grids, evaluable fields, composite-trapezoid quadrature and the discrete
// L_p / W_p^(2,2) norms on the rectangle [0,h1] x [0,h2].

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mangeron {

/// The rectangle G = (0,h1) x (0,h2).
class Domain {
public:
    Domain(double h1, double h2);

    double h1() const noexcept { return h1_; }
    double h2() const noexcept { return h2_; }

    bool operator==(const Domain&) const = default;

private:
    double h1_;
    double h2_;
};

/// One axis of a tensor grid: strictly increasing nodes from 0 to `length`
/// with composite-trapezoid weights.
class Axis {
public:
    Axis() = default;
    explicit Axis(std::vector<double> nodes);

    std::size_t size() const noexcept { return nodes_.size(); }
    double length() const noexcept { return nodes_.empty() ? 0.0 : nodes_.back(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }
    double node(std::size_t i) const { return nodes_[i]; }
    double weight(std::size_t i) const { return weights_[i]; }

    /// Trapezoid weight of node k for the sub-interval [0, node(i)]; zero for k > i.
    double partial_weight(std::size_t i, std::size_t k) const noexcept;

    /// Index of the node equal to `t` (within 1e-12 relative), or npos.
    std::size_t find_node(double t) const noexcept;

    /// Largest panel width.
    double max_spacing() const noexcept;

    /// Axis with every panel bisected.
    Axis refined() const;

    bool operator==(const Axis& other) const { return nodes_ == other.nodes_; }

    static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

private:
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Tensor-product node set over the closed rectangle. Grid functions are
/// stored y-outer: index(i, j) = j * nx + i.
class Grid2D {
public:
    Grid2D() : domain_(1.0, 1.0) {}
    Grid2D(Domain domain, Axis x, Axis y);

    const Domain& domain() const noexcept { return domain_; }
    const Axis& x() const noexcept { return x_; }
    const Axis& y() const noexcept { return y_; }
    std::size_t nx() const noexcept { return x_.size(); }
    std::size_t ny() const noexcept { return y_.size(); }
    std::size_t size() const noexcept { return x_.size() * y_.size(); }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return j * x_.size() + i; }

    Grid2D refined() const { return Grid2D(domain_, x_.refined(), y_.refined()); }

    bool operator==(const Grid2D& other) const {
        return domain_ == other.domain_ && x_ == other.x_ && y_ == other.y_;
    }

private:
    Domain domain_;
    Axis x_;
    Axis y_;
};

/// Uniform grid with `n1` x `n2` nodes, augmented by interior breakpoints so
/// that coefficient discontinuity lines are node-aligned.
Grid2D build_grid(const Domain& domain, std::size_t n1, std::size_t n2,
                  std::span<const double> x_breakpoints = {},
                  std::span<const double> y_breakpoints = {});

/// Uniform-plus-breakpoints axis on [0, length].
Axis build_axis(double length, std::size_t n, std::span<const double> breakpoints = {});

enum class FieldKind { Analytic, Piecewise, Samples };

/// Integrability class a coefficient is declared to belong to.
enum class Smoothness { Lp, LinfX_LpY, LpX_LinfY, Continuous };

std::string to_string(FieldKind kind);
std::string to_string(Smoothness tag);

struct GridFn1D {
    Axis axis;
    std::vector<double> values;

    GridFn1D() = default;
    GridFn1D(Axis a, std::vector<double> v);
    explicit GridFn1D(const Axis& a) : axis(a), values(a.size(), 0.0) {}

    std::size_t size() const noexcept { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

struct GridFn2D {
    Grid2D grid;
    std::vector<double> values;

    GridFn2D() = default;
    GridFn2D(Grid2D g, std::vector<double> v);
    explicit GridFn2D(const Grid2D& g) : grid(g), values(g.size(), 0.0) {}

    std::size_t size() const noexcept { return values.size(); }
    double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
    double& at(std::size_t i, std::size_t j) { return values[grid.index(i, j)]; }
    bool complete() const noexcept { return values.size() == grid.size() && !values.empty(); }
};

/// Scalar function on one interval, optionally carrying its first and second
/// derivatives.
class Field1D {
public:
    using Fn = std::function<double(double)>;

    Field1D();

    static Field1D constant(double c);
    static Field1D analytic(Fn f, Fn d1 = {}, Fn d2 = {}, std::string expression = {});
    /// Piecewise-linear interpolant through (nodes, values); nodes strictly increasing.
    static Field1D samples(std::vector<double> nodes, std::vector<double> values);
    static Field1D samples(const GridFn1D& f);

    double operator()(double t) const { return eval_(t); }

    FieldKind kind() const noexcept { return kind_; }
    bool has_derivatives() const noexcept { return static_cast<bool>(d1_) && static_cast<bool>(d2_); }
    /// Generating expression when the field came from the expression language.
    const std::string& expression() const noexcept { return expression_; }
    std::span<const double> sample_nodes() const noexcept { return nodes_; }
    std::span<const double> sample_values() const noexcept { return values_; }

    /// First or second derivative as a field. Analytic derivatives are used
    /// when present; samples are differenced on their own nodes; bare
    /// closures fall back to Richardson-extrapolated central differences.
    Field1D derivative(int order) const;

    /// Values at the nodes of `axis`.
    GridFn1D sample(const Axis& axis) const;

private:
    FieldKind kind_;
    Fn eval_;
    Fn d1_;
    Fn d2_;
    std::string expression_;
    std::vector<double> nodes_;
    std::vector<double> values_;
};

/// Scalar field on the closed rectangle.
class Field2D {
public:
    using Fn = std::function<double(double, double)>;

    Field2D();

    static Field2D zero(Smoothness tag = Smoothness::Continuous);
    static Field2D constant(double c, Smoothness tag = Smoothness::Continuous);
    static Field2D analytic(Fn f, Smoothness tag = Smoothness::Continuous,
                            std::string expression = {});
    /// Piecewise over the subrectangles cut by interior breakpoints. `cells`
    /// has (|xb|+1)(|yb|+1) entries ordered x-cell outer: cells[i*(|yb|+1)+j].
    /// On a cut line the lexicographically lowest containing cell wins.
    static Field2D piecewise(std::vector<double> x_breaks, std::vector<double> y_breaks,
                             std::vector<Fn> cells, Smoothness tag = Smoothness::Lp,
                             std::string expression = {});
    /// Bilinear interpolant of grid samples.
    static Field2D samples(const GridFn2D& f, Smoothness tag = Smoothness::Continuous);

    double operator()(double x, double y) const { return eval_(x, y); }

    FieldKind kind() const noexcept { return kind_; }
    Smoothness smoothness() const noexcept { return tag_; }
    Field2D with_smoothness(Smoothness tag) const;
    const std::string& expression() const noexcept { return expression_; }
    bool is_identically_zero() const noexcept { return zero_; }
    std::span<const double> x_breakpoints() const noexcept { return x_breaks_; }
    std::span<const double> y_breakpoints() const noexcept { return y_breaks_; }

    GridFn2D sample(const Grid2D& grid) const;

private:
    FieldKind kind_;
    Smoothness tag_;
    Fn eval_;
    std::string expression_;
    bool zero_ = false;
    std::vector<double> x_breaks_;
    std::vector<double> y_breaks_;
};

/// Exponent p of an L_p norm; p = infinity selects the node maximum.
class NormSpec {
public:
    explicit NormSpec(double p = 2.0);
    static NormSpec infinity() { return NormSpec(std::numeric_limits<double>::infinity()); }
    double p() const noexcept { return p_; }
    bool is_infinity() const noexcept { return p_ == std::numeric_limits<double>::infinity(); }

private:
    double p_;
};

/// u and its eight derivatives D_x^i D_y^j u (i, j <= 2) on one grid.
struct SolutionBundle {
    GridFn2D u, ux, uy, uxx, uyy, uxy, uxxy, uxyy, uxxyy;

    /// Components ordered by (i, j): entry 3*i + j holds D_x^i D_y^j u.
    std::array<const GridFn2D*, 9> by_order() const;
    std::array<GridFn2D*, 9> by_order();
    /// Throws StructuralError when any component is missing or misshaped.
    void require_complete() const;
};

/// Σ w_i f_i over the axis.
double quad_1d(const GridFn1D& f);

/// Tensor trapezoid Σ_ij wx_i wy_j f_ij.
double quad_2d(const GridFn2D& f);

/// ∫_0^x (x − α) f(α) dα by the trapezoid rule on the nodes ≤ x. `x` must be
/// a node of f's axis.
double moment_integral_1d(const GridFn1D& f, double x);
double moment_integral_1d(const GridFn1D& f, std::size_t node);

/// Running trapezoid integrals ∫_0^{t_i} f for every node.
std::vector<double> cumulative_integral(std::span<const double> nodes, std::span<const double> f);
/// Running first moments ∫_0^{t_i} (t_i − α) f(α) dα for every node.
std::vector<double> cumulative_moment(std::span<const double> nodes, std::span<const double> f);

GridFn1D cumulative_integral(const GridFn1D& f);
GridFn1D cumulative_moment(const GridFn1D& f);

double lp_norm(const GridFn1D& f, const NormSpec& spec);
double lp_norm(const GridFn2D& f, const NormSpec& spec);

/// Σ_{i,j ≤ 2} ‖D_x^i D_y^j u‖_{L_p}.
double wp22_norm(const SolutionBundle& bundle, const NormSpec& spec);

/// Finite-difference weights for the `order`-th derivative at `x0` using the
/// given stencil nodes (Fornberg's recursion).
std::vector<double> fd_weights(double x0, std::span<const double> stencil, int order);

/// Derivative samples of nodal data: 3-point central in the interior,
/// one-sided second-order stencils at the ends.
std::vector<double> differentiate_samples(std::span<const double> nodes,
                                          std::span<const double> values, int order);

}  // namespace mangeron
