#pragma once

/// Riemann-sum nets over tagged partitions, refinement-driven limits,
/// and limits of monotone nets.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gmt/errors.hpp"
#include "gmt/expr.hpp"

namespace gmt {

enum class TagRule { Left, Midpoint, Right };

/// Partition points x_0 < ... < x_k of [a,b] plus one tag per cell,
/// t_i in [x_{i-1}, x_i]. The index element of the Riemann-sum net.
struct TaggedPartition {
    std::vector<double> points;
    std::vector<double> tags;

    int cell_count() const noexcept { return static_cast<int>(tags.size()); }
    double a() const { return points.front(); }
    double b() const { return points.back(); }

    double mesh_width() const {
        double w = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i)
            w = std::max(w, points[i] - points[i - 1]);
        return w;
    }

    void validate() const {
        if (points.size() < 2) throw InvariantError("partition needs at least two points");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i - 1] < points[i]))
                throw InvariantError("partition points must be strictly increasing");
        if (tags.size() + 1 != points.size())
            throw InvariantError("partition needs exactly one tag per cell");
        for (std::size_t i = 0; i < tags.size(); ++i)
            if (tags[i] < points[i] || tags[i] > points[i + 1])
                throw InvariantError("tag lies outside its cell");
    }

    /// True when every point of `coarser` appears among our points.
    bool refines(const TaggedPartition& coarser) const {
        std::size_t j = 0;
        for (double x : coarser.points) {
            while (j < points.size() && points[j] < x) ++j;
            if (j == points.size() || points[j] != x) return false;
        }
        return true;
    }
};

inline double tag_for(double lo, double hi, TagRule rule) {
    switch (rule) {
        case TagRule::Left: return lo;
        case TagRule::Right: return hi;
        case TagRule::Midpoint: break;
    }
    return 0.5 * (lo + hi);
}

inline TaggedPartition uniform_partition(double a, double b, int cells,
                                         TagRule rule = TagRule::Midpoint) {
    if (!(a < b)) throw InvariantError("interval must satisfy a < b");
    if (cells < 1) throw InvariantError("partition needs at least one cell");
    TaggedPartition p;
    p.points.resize(static_cast<std::size_t>(cells) + 1);
    p.tags.resize(static_cast<std::size_t>(cells));
    for (int i = 0; i <= cells; ++i)
        p.points[static_cast<std::size_t>(i)] =
            a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
    p.points.front() = a;
    p.points.back() = b;
    for (int i = 0; i < cells; ++i)
        p.tags[static_cast<std::size_t>(i)] =
            tag_for(p.points[static_cast<std::size_t>(i)], p.points[static_cast<std::size_t>(i) + 1], rule);
    return p;
}

/// S_(P,T)(f) = sum_i f(t_i) (x_i - x_{i-1}), exactly as written.
inline double riemann_sum(const Expression& f, const TaggedPartition& p) {
    if (f.arity() != 1) throw InvariantError("riemann_sum needs a univariate expression");
    double sum = 0.0;
    for (std::size_t i = 0; i < p.tags.size(); ++i) {
        const double t = p.tags[i];
        sum += eval(f, std::span<const double>(&t, 1)) * (p.points[i + 1] - p.points[i]);
    }
    return sum;
}

/// Bisect every cell at its midpoint; tags go to the new cell midpoints.
/// The result refines its argument.
inline TaggedPartition refine(const TaggedPartition& p, TagRule rule = TagRule::Midpoint) {
    TaggedPartition q;
    q.points.reserve(p.points.size() * 2 - 1);
    q.tags.reserve(p.tags.size() * 2);
    for (std::size_t i = 0; i + 1 < p.points.size(); ++i) {
        const double lo = p.points[i];
        const double hi = p.points[i + 1];
        const double mid = 0.5 * (lo + hi);
        q.points.push_back(lo);
        q.points.push_back(mid);
        q.tags.push_back(tag_for(lo, mid, rule));
        q.tags.push_back(tag_for(mid, hi, rule));
    }
    q.points.push_back(p.points.back());
    return q;
}

/// Walks a cofinal chain in the directed set of tagged partitions; the
/// full set of all tagged partitions is not materializable, and any
/// partition is refined by a fine enough member of this chain.
struct RefinementNet {
    TaggedPartition initial;
    std::function<TaggedPartition(const TaggedPartition&)> refine_rule =
        [](const TaggedPartition& p) { return refine(p); };
};

struct ConvergenceStep {
    int step = 0;
    int cells = 0;
    double sum = 0.0;
    double delta = std::numeric_limits<double>::quiet_NaN();  // NaN on the first step
    double mesh_width = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceStep> steps;
    bool converged = false;
    double mesh_width = 0.0;

    double value() const {
        if (steps.empty()) throw InvariantError("empty convergence report");
        return steps.back().sum;
    }
};

/// Non-convergence of a refinement walk; carries the full report so the
/// sums seen so far can be inspected.
class NetConvergenceError : public ConvergenceError {
public:
    NetConvergenceError(const std::string& message, ConvergenceReport report)
        : ConvergenceError(message), report_(std::move(report)) {}

    const ConvergenceReport& report() const noexcept { return report_; }

private:
    ConvergenceReport report_;
};

struct NetLimit {
    double value = 0.0;
    ConvergenceReport report;
};

/// Refine until two successive Riemann sums differ by less than
/// abs_tol. Throws NetConvergenceError when max_steps runs out first.
inline NetLimit net_limit(const RefinementNet& net, const Expression& f, double abs_tol,
                          int max_steps) {
    if (!(abs_tol > 0.0)) throw InvariantError("abs_tol must be positive");
    if (max_steps < 1) throw InvariantError("max_steps must be at least 1");
    net.initial.validate();

    ConvergenceReport report;
    TaggedPartition p = net.initial;
    double prev = riemann_sum(f, p);
    report.steps.push_back({0, p.cell_count(), prev, std::numeric_limits<double>::quiet_NaN(),
                            p.mesh_width()});
    report.mesh_width = p.mesh_width();

    for (int step = 1; step < max_steps; ++step) {
        TaggedPartition q = net.refine_rule(p);
        q.validate();
        if (!q.refines(p))
            throw InvariantError("refinement rule produced a partition that does not refine "
                                 "its predecessor");
        const double sum = riemann_sum(f, q);
        const double delta = std::fabs(sum - prev);
        report.steps.push_back({step, q.cell_count(), sum, delta, q.mesh_width()});
        report.mesh_width = q.mesh_width();
        if (delta < abs_tol) {
            report.converged = true;
            return {sum, std::move(report)};
        }
        prev = sum;
        p = std::move(q);
    }
    throw NetConvergenceError("Riemann net did not converge within " +
                                  std::to_string(max_steps) + " refinement steps",
                              std::move(report));
}

/// Limit of a materialized increasing chain of reals: the supremum when
/// bounded, the +infinity marker when the caller declares unboundedness
/// or the values exceed a declared bound.
struct MonotoneLimit {
    bool infinite = false;
    double value = 0.0;

    static MonotoneLimit finite(double v) { return {false, v}; }
    static MonotoneLimit unbounded() { return {true, 0.0}; }

    bool operator==(const MonotoneLimit&) const = default;
};

inline MonotoneLimit monotone_net_limit(std::span<const double> values,
                                        std::optional<double> bound = std::nullopt,
                                        bool declared_unbounded = false) {
    if (values.empty()) throw InvariantError("monotone net limit of an empty chain");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[i - 1])
            throw InvariantError("monotonicity violation in increasing net at position " +
                                 std::to_string(i));
    if (declared_unbounded) return MonotoneLimit::unbounded();
    if (bound && values.back() > *bound) return MonotoneLimit::unbounded();
    return MonotoneLimit::finite(values.back());
}

} // namespace gmt
