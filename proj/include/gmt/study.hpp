#pragma once

/// The motivating curve-limit study: integrate the field over each
/// member of a curve family and compare against the explicit limit.

#include <cmath>
#include <vector>

#include "gmt/errors.hpp"
#include "gmt/measures.hpp"
#include "gmt/scene.hpp"

namespace gmt {

struct LimitStudyRow {
    int k = 0;
    double value = 0.0;  // I_k
    double gap = 0.0;    // |I_k - I_infinity|
};

struct LimitStudyResult {
    double limit_value = 0.0;
    std::vector<LimitStudyRow> rows;
    bool converged = false;
    double final_gap = 0.0;
};

/// I_k for k = 1..k_max plus the integral over the limit chart. The
/// study is flagged converged when the last three gaps decrease
/// monotonically and the final gap is below 10 * abs_tol.
inline LimitStudyResult run_limit_study(const CurveFamily& family, const Expression& field,
                                        int k_max, double abs_tol, HausdorffOptions opt = {}) {
    if (k_max < 2) throw InvariantError("limit study needs k_max >= 2");
    if (field.arity() != family.ambient_dim)
        throw InvariantError("field arity must equal the family's ambient dimension");

    LimitStudyResult result;
    const DisjointManifold limit_manifold =
        DisjointManifold::make(family.ambient_dim, {family.limit_chart()});
    result.limit_value = hausdorff_integrate(field, limit_manifold, abs_tol, opt).value;

    result.rows.reserve(static_cast<std::size_t>(k_max));
    for (int k = 1; k <= k_max; ++k) {
        const DisjointManifold mk =
            DisjointManifold::make(family.ambient_dim, {family.materialize(k)});
        const double value = hausdorff_integrate(field, mk, abs_tol, opt).value;
        result.rows.push_back({k, value, std::fabs(value - result.limit_value)});
    }

    result.final_gap = result.rows.back().gap;
    const std::size_t tail = std::min<std::size_t>(3, result.rows.size());
    bool decreasing = true;
    for (std::size_t i = result.rows.size() - tail + 1; i < result.rows.size(); ++i)
        if (!(result.rows[i].gap < result.rows[i - 1].gap)) decreasing = false;
    result.converged = decreasing && result.final_gap < 10.0 * abs_tol;
    return result;
}

} // namespace gmt
