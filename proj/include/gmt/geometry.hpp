#pragma once

/// Charts as parameterized submanifold pieces: Jacobians, Gram
/// determinants, volume elements, and the unit-ball constant.

#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gmt/errors.hpp"
#include "gmt/expr.hpp"

namespace gmt {

inline constexpr int kMaxParamDim = 4;
inline constexpr int kMaxAmbientDim = 8;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Axis-aligned open box in parameter space, the domain of a chart.
struct ParamBox {
    std::vector<Interval> bounds;

    int dim() const noexcept { return static_cast<int>(bounds.size()); }

    bool contains(std::span<const double> u) const {
        if (static_cast<int>(u.size()) != dim()) return false;
        for (int k = 0; k < dim(); ++k)
            if (u[k] < bounds[k].lo || u[k] > bounds[k].hi) return false;
        return true;
    }

    void validate() const {
        if (bounds.empty()) throw InvariantError("parameter box must have dimension >= 1");
        if (dim() > kMaxParamDim)
            throw InvariantError("parameter dimension exceeds supported maximum " +
                                 std::to_string(kMaxParamDim));
        for (const auto& b : bounds)
            if (!(b.lo < b.hi))
                throw InvariantError("parameter box bounds must satisfy lo < hi");
    }
};

/// Smooth map from an m-box into R^n, one component expression per
/// ambient coordinate. Components have arity m over coordinates u1..um.
struct Chart {
    int param_dim = 0;
    int ambient_dim = 0;
    ParamBox domain;
    std::vector<Expression> components;

    static Chart make(ParamBox domain, std::vector<Expression> components, int ambient_dim) {
        Chart c;
        c.domain = std::move(domain);
        c.components = std::move(components);
        c.param_dim = c.domain.dim();
        c.ambient_dim = ambient_dim;
        c.validate();
        return c;
    }

    void validate() const {
        domain.validate();
        if (ambient_dim < 1 || ambient_dim > kMaxAmbientDim)
            throw InvariantError("ambient dimension out of supported range");
        if (param_dim > ambient_dim)
            throw InvariantError("chart parameter dimension exceeds ambient dimension");
        if (static_cast<int>(components.size()) != ambient_dim)
            throw InvariantError("chart needs exactly one component per ambient coordinate");
        for (const auto& e : components) {
            if (!e.valid()) throw InvariantError("chart component expression is empty");
            if (e.arity() != param_dim)
                throw InvariantError("chart component arity must equal the parameter dimension");
        }
    }

    /// Image point phi(u).
    void map_into(std::span<const double> u, double* out) const {
        for (int c = 0; c < ambient_dim; ++c)
            out[c] = eval(components[static_cast<std::size_t>(c)], u);
    }

    std::vector<double> map(std::span<const double> u) const {
        std::vector<double> out(static_cast<std::size_t>(ambient_dim));
        map_into(u, out.data());
        return out;
    }
};

/// Dense row-major matrix just large enough for chart Jacobians.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

/// Pullback metric g = J^T J of a chart at a point; symmetric positive
/// semidefinite, positive definite exactly at immersion points.
struct GramMatrix {
    int dim = 0;
    std::array<double, static_cast<std::size_t>(kMaxParamDim* kMaxParamDim)> entries{};

    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * dim + j]; }
};

namespace detail {

struct JacobianScratch {
    // rows: ambient components; columns: parameter partials
    std::array<double, static_cast<std::size_t>(kMaxAmbientDim* kMaxParamDim)> j{};
    std::array<double, static_cast<std::size_t>(kMaxAmbientDim)> values{};
};

inline void jacobian_into(const Chart& c, std::span<const double> u, JacobianScratch& s) {
    if (!c.domain.contains(u))
        throw InvariantError("parameter point lies outside the chart domain");
    for (int row = 0; row < c.ambient_dim; ++row)
        eval_dual_into(c.components[static_cast<std::size_t>(row)], u,
                       s.values[static_cast<std::size_t>(row)],
                       s.j.data() + static_cast<std::size_t>(row) * c.param_dim);
}

inline GramMatrix gram_from_jacobian(const JacobianScratch& s, int n, int m) {
    GramMatrix g;
    g.dim = m;
    for (int i = 0; i < m; ++i)
        for (int j = i; j < m; ++j) {
            double acc = 0.0;
            for (int c = 0; c < n; ++c)
                acc += s.j[static_cast<std::size_t>(c) * m + i] *
                       s.j[static_cast<std::size_t>(c) * m + j];
            g.entries[static_cast<std::size_t>(i) * m + j] = acc;
            g.entries[static_cast<std::size_t>(j) * m + i] = acc;
        }
    return g;
}

} // namespace detail

/// n x m Jacobian of the chart map at u; column k holds the partials
/// with respect to u_k.
inline Matrix jacobian(const Chart& c, std::span<const double> u) {
    detail::JacobianScratch s;
    detail::jacobian_into(c, u, s);
    Matrix out(c.ambient_dim, c.param_dim);
    for (int r = 0; r < c.ambient_dim; ++r)
        for (int k = 0; k < c.param_dim; ++k)
            out(r, k) = s.j[static_cast<std::size_t>(r) * c.param_dim + k];
    return out;
}

inline GramMatrix gram_matrix(const Chart& c, std::span<const double> u) {
    detail::JacobianScratch s;
    detail::jacobian_into(c, u, s);
    return detail::gram_from_jacobian(s, c.ambient_dim, c.param_dim);
}

namespace detail {

// Cholesky of the Gram matrix: computes sqrt(det g) and doubles as the
// immersion check. The rank threshold is relative,
// det(J^T J) >= 1e-12 * (max diagonal of J^T J)^m,
// so rescaling a chart does not change the verdict.
inline double volume_element_from(const JacobianScratch& s, int n, int m) {
    const GramMatrix g = gram_from_jacobian(s, n, m);

    double max_diag = 0.0;
    for (int i = 0; i < m; ++i) max_diag = std::max(max_diag, g.at(i, i));
    double scale = 1.0;
    for (int i = 0; i < m; ++i) scale *= max_diag;
    const double rank_tol = 1e-12 * scale;

    std::array<double, static_cast<std::size_t>(kMaxParamDim* kMaxParamDim)> l{};
    double sqrt_det = 1.0;
    for (int k = 0; k < m; ++k) {
        double pivot = g.at(k, k);
        for (int r = 0; r < k; ++r)
            pivot -= l[static_cast<std::size_t>(k) * m + r] * l[static_cast<std::size_t>(k) * m + r];
        if (!(pivot > 0.0))
            throw RankDeficiencyError("chart is not an immersion at the evaluation point "
                                      "(Gram matrix not positive definite)");
        const double lkk = std::sqrt(pivot);
        l[static_cast<std::size_t>(k) * m + k] = lkk;
        sqrt_det *= lkk;
        for (int i = k + 1; i < m; ++i) {
            double acc = g.at(i, k);
            for (int r = 0; r < k; ++r)
                acc -= l[static_cast<std::size_t>(i) * m + r] * l[static_cast<std::size_t>(k) * m + r];
            l[static_cast<std::size_t>(i) * m + k] = acc / lkk;
        }
    }
    if (sqrt_det * sqrt_det < rank_tol)
        throw RankDeficiencyError("chart is not an immersion at the evaluation point "
                                  "(Gram determinant below rank tolerance)");
    return sqrt_det;
}

/// One dual pass yields the image point and the volume element together.
inline double map_and_volume_element(const Chart& c, std::span<const double> u,
                                     double* image_out) {
    JacobianScratch s;
    jacobian_into(c, u, s);
    for (int row = 0; row < c.ambient_dim; ++row)
        image_out[row] = s.values[static_cast<std::size_t>(row)];
    return volume_element_from(s, c.ambient_dim, c.param_dim);
}

} // namespace detail

/// sqrt(det(J^T J)) at u: the density converting parameter-space
/// integration into surface integration. For m = n this equals |det J|.
/// Throws RankDeficiencyError when the chart fails to be an immersion at u.
inline double gram_volume_element(const Chart& c, std::span<const double> u) {
    detail::JacobianScratch s;
    detail::jacobian_into(c, u, s);
    return detail::volume_element_from(s, c.ambient_dim, c.param_dim);
}

/// m-dimensional volume of the unit ball, 2 pi^(m/2) / (m Gamma(m/2)).
inline double unit_ball_volume(int m) {
    if (m < 1) throw InvariantError("unit ball dimension must be >= 1");
    const double half = 0.5 * static_cast<double>(m);
    return 2.0 * std::pow(M_PI, half) / (static_cast<double>(m) * std::tgamma(half));
}

} // namespace gmt
