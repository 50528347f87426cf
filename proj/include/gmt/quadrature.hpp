#pragma once

/// Gauss-Legendre rules and a tensor-product integrator over parameter
/// boxes with dyadic refinement and successive-difference stopping.

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "gmt/errors.hpp"
#include "gmt/geometry.hpp"

namespace gmt {

/// Nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes are the roots of the Legendre polynomial P_n, found by Newton
/// iteration from the Chebyshev-like initial guess; weights are
/// 2 / ((1 - x^2) P_n'(x)^2).
inline GaussLegendreRule compute_gauss_legendre(int n) {
    if (n < 1) throw InvariantError("Gauss-Legendre order must be >= 1");
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            // Evaluate P_n and P_n' by the three-term recurrence.
            double p_prev = 1.0;
            double p = x;
            for (int k = 2; k <= n; ++k) {
                const double p_next =
                    ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / static_cast<double>(k);
                p_prev = p;
                p = p_next;
            }
            dp = static_cast<double>(n) * (x * p - p_prev) / (x * x - 1.0);
            const double step = p / dp;
            x -= step;
            if (std::fabs(step) < 1e-15) break;
        }
        // One clean-up recurrence pass at the converged node.
        double p_prev = 1.0;
        double p = x;
        for (int k = 2; k <= n; ++k) {
            const double p_next =
                ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / static_cast<double>(k);
            p_prev = p;
            p = p_next;
        }
        dp = static_cast<double>(n) * (x * p - p_prev) / (x * x - 1.0);
        rule.nodes[static_cast<std::size_t>(i)] = x;
        rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

inline const GaussLegendreRule& gauss_legendre(int n) {
    static std::mutex mutex;
    static std::map<int, GaussLegendreRule> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
    return it->second;
}

struct QuadratureOptions {
    double abs_tol = 1e-8;
    int order = 8;       // Gauss-Legendre points per cell per axis
    int max_depth = -1;  // dyadic levels; -1 picks a default by dimension
};

struct QuadratureResult {
    double value = 0.0;
    int depth = 0;           // dyadic level at which the stop fired
    long long evaluations = 0;
    bool converged = false;
    std::vector<double> level_values;
};

namespace detail {

inline int default_max_depth(int dim) {
    switch (dim) {
        case 1: return 16;
        case 2: return 8;
        case 3: return 5;
        default: return 4;
    }
}

// Composite per-axis nodes for 2^level equal cells of [lo, hi].
inline void composite_axis(const Interval& iv, const GaussLegendreRule& rule, int level,
                           std::vector<double>& nodes, std::vector<double>& weights) {
    const long long cells = 1LL << level;
    const double width = (iv.hi - iv.lo) / static_cast<double>(cells);
    const std::size_t per_cell = rule.nodes.size();
    nodes.clear();
    weights.clear();
    nodes.reserve(per_cell * static_cast<std::size_t>(cells));
    weights.reserve(per_cell * static_cast<std::size_t>(cells));
    for (long long cell = 0; cell < cells; ++cell) {
        const double start = iv.lo + width * static_cast<double>(cell);
        for (std::size_t q = 0; q < per_cell; ++q) {
            nodes.push_back(start + 0.5 * width * (rule.nodes[q] + 1.0));
            weights.push_back(0.5 * width * rule.weights[q]);
        }
    }
}

} // namespace detail

/// Integrate f over the box at one dyadic level (2^level cells per
/// axis, tensor-product Gauss-Legendre of the given order per cell).
template <typename F>
double integrate_box_level(const ParamBox& box, F&& f, int order, int level,
                           long long* evaluations = nullptr) {
    const int dim = box.dim();
    const GaussLegendreRule& rule = gauss_legendre(order);
    std::vector<std::vector<double>> nodes(static_cast<std::size_t>(dim));
    std::vector<std::vector<double>> weights(static_cast<std::size_t>(dim));
    for (int k = 0; k < dim; ++k)
        detail::composite_axis(box.bounds[static_cast<std::size_t>(k)], rule, level,
                               nodes[static_cast<std::size_t>(k)],
                               weights[static_cast<std::size_t>(k)]);

    std::vector<std::size_t> idx(static_cast<std::size_t>(dim), 0);
    std::vector<double> u(static_cast<std::size_t>(dim), 0.0);
    double sum = 0.0;
    long long count = 0;
    while (true) {
        double w = 1.0;
        for (int k = 0; k < dim; ++k) {
            u[static_cast<std::size_t>(k)] = nodes[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
            w *= weights[static_cast<std::size_t>(k)][idx[static_cast<std::size_t>(k)]];
        }
        sum += w * f(std::span<const double>(u.data(), u.size()));
        ++count;
        int axis = dim - 1;
        while (axis >= 0) {
            if (++idx[static_cast<std::size_t>(axis)] <
                nodes[static_cast<std::size_t>(axis)].size())
                break;
            idx[static_cast<std::size_t>(axis)] = 0;
            --axis;
        }
        if (axis < 0) break;
    }
    if (evaluations) *evaluations += count;
    return sum;
}

/// Refine dyadically until two successive levels differ by less than
/// abs_tol. result.converged is false when the depth budget ran out.
template <typename F>
QuadratureResult integrate_box_dyadic(const ParamBox& box, F&& f, QuadratureOptions opt = {}) {
    box.validate();
    if (!(opt.abs_tol > 0.0)) throw InvariantError("quadrature abs_tol must be positive");
    const int max_depth =
        opt.max_depth >= 0 ? opt.max_depth : detail::default_max_depth(box.dim());

    QuadratureResult result;
    double prev = integrate_box_level(box, f, opt.order, 0, &result.evaluations);
    result.level_values.push_back(prev);
    for (int level = 1; level <= max_depth; ++level) {
        const double value = integrate_box_level(box, f, opt.order, level, &result.evaluations);
        result.level_values.push_back(value);
        if (std::fabs(value - prev) < opt.abs_tol) {
            result.value = value;
            result.depth = level;
            result.converged = true;
            return result;
        }
        prev = value;
    }
    result.value = prev;
    result.depth = max_depth;
    result.converged = false;
    return result;
}

} // namespace gmt
