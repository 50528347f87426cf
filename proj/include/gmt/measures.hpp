#pragma once

/// Discrete model of increasing nets and inductive systems of measures
/// on finite cell algebras, plus the Hausdorff integrator over finite
/// disjoint unions of charts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gmt/errors.hpp"
#include "gmt/extended_real.hpp"
#include "gmt/geometry.hpp"
#include "gmt/parallel.hpp"
#include "gmt/quadrature.hpp"

namespace gmt {

/// Sets over a cell algebra are unions of cells, encoded as bit masks.
using CellSet = std::uint64_t;

inline constexpr int kMaxCells = 64;

inline bool cell_in(CellSet set, int cell) { return (set >> cell) & 1u; }
inline CellSet with_cell(CellSet set, int cell) { return set | (CellSet{1} << cell); }

/// Finite list of disjoint labeled cells partitioning a ground set.
/// Every representable set is a union of cells, so finite additivity of
/// any table over it is structural.
struct CellAlgebra {
    std::vector<std::string> labels;

    int cell_count() const noexcept { return static_cast<int>(labels.size()); }

    CellSet full_set() const {
        const int n = cell_count();
        return n == kMaxCells ? ~CellSet{0} : (CellSet{1} << n) - 1;
    }

    void validate() const {
        if (labels.empty()) throw InvariantError("cell algebra needs at least one cell");
        if (cell_count() > kMaxCells)
            throw InvariantError("cell algebra exceeds the supported cell count");
        for (std::size_t i = 0; i < labels.size(); ++i)
            for (std::size_t j = i + 1; j < labels.size(); ++j)
                if (labels[i] == labels[j])
                    throw InvariantError("duplicate cell label: " + labels[i]);
    }
};

/// Nonnegative set function on a cell algebra; the measure of a set is
/// the sum of its cells' masses.
struct MeasureTable {
    std::shared_ptr<const CellAlgebra> algebra;
    std::vector<ExtendedReal> mass;

    void validate() const {
        if (!algebra) throw InvariantError("measure table has no algebra");
        algebra->validate();
        if (static_cast<int>(mass.size()) != algebra->cell_count())
            throw InvariantError("measure table needs one mass per cell");
    }

    ExtendedReal measure(CellSet set) const {
        ExtendedReal total(0.0);
        for (int c = 0; c < algebra->cell_count(); ++c)
            if (cell_in(set, c)) total += mass[static_cast<std::size_t>(c)];
        return total;
    }
};

/// Explicit relation table of a finite preordered index set.
struct DirectedIndex {
    int size = 0;
    std::vector<char> leq;  // leq[i * size + j] != 0  <=>  i precedes j

    bool related(int i, int j) const {
        return leq[static_cast<std::size_t>(i) * size + j] != 0;
    }
    void set_related(int i, int j) { leq[static_cast<std::size_t>(i) * size + j] = 1; }

    static DirectedIndex chain(int n) {
        DirectedIndex d;
        d.size = n;
        d.leq.assign(static_cast<std::size_t>(n) * n, 0);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) d.set_related(i, j);
        return d;
    }
};

struct DirectedCheck {
    bool ok = false;
    std::string reason;
    int i = -1;
    int j = -1;
};

/// True iff the relation is reflexive, transitive, and every pair has
/// an upper bound; the failure carries a witness pair.
inline DirectedCheck check_directed(const DirectedIndex& d) {
    const int n = d.size;
    if (n < 1 || static_cast<int>(d.leq.size()) != n * n)
        return {false, "relation table has the wrong shape", -1, -1};
    for (int i = 0; i < n; ++i)
        if (!d.related(i, i)) return {false, "relation is not reflexive", i, i};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (!d.related(i, j)) continue;
            for (int k = 0; k < n; ++k)
                if (d.related(j, k) && !d.related(i, k))
                    return {false, "relation is not transitive", i, k};
        }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            bool dominated = false;
            for (int k = 0; k < n; ++k)
                if (d.related(i, k) && d.related(j, k)) {
                    dominated = true;
                    break;
                }
            if (!dominated)
                return {false, "pair has no upper bound", i, j};
        }
    return {true, "", -1, -1};
}

/// Increasing net of tables indexed by a finite directed set, with a
/// monotone exhaustion i -> Omega_i whose union is the whole ground set.
struct InductiveSystem {
    std::shared_ptr<const CellAlgebra> algebra;
    DirectedIndex index;
    std::vector<CellSet> omegas;
    std::vector<MeasureTable> measures;

    int index_size() const noexcept { return index.size; }

    void validate() const {
        if (!algebra) throw InvariantError("inductive system has no algebra");
        algebra->validate();
        const DirectedCheck dc = check_directed(index);
        if (!dc.ok)
            throw InvariantError("index set is not directed: " + dc.reason + " (witness " +
                                 std::to_string(dc.i) + ", " + std::to_string(dc.j) + ")");
        const int n = index.size;
        if (static_cast<int>(omegas.size()) != n || static_cast<int>(measures.size()) != n)
            throw InvariantError("inductive system needs one omega and one table per index");
        CellSet covered = 0;
        for (int i = 0; i < n; ++i) {
            measures[static_cast<std::size_t>(i)].validate();
            if (measures[static_cast<std::size_t>(i)].algebra.get() != algebra.get())
                throw InvariantError("all tables must share the system's algebra");
            covered |= omegas[static_cast<std::size_t>(i)];
        }
        if (covered != algebra->full_set())
            throw InvariantError("the omegas do not exhaust the ground set");
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (!index.related(i, j)) continue;
                if ((omegas[static_cast<std::size_t>(i)] & ~omegas[static_cast<std::size_t>(j)]) != 0)
                    throw InvariantError("omega assignment is not monotone for indices " +
                                         std::to_string(i) + " <= " + std::to_string(j));
                for (int c = 0; c < algebra->cell_count(); ++c) {
                    const auto& mi = measures[static_cast<std::size_t>(i)].mass[static_cast<std::size_t>(c)];
                    const auto& mj = measures[static_cast<std::size_t>(j)].mass[static_cast<std::size_t>(c)];
                    if (!(mi <= mj))
                        throw InvariantError("measure net is not increasing at cell " +
                                             std::to_string(c) + " for indices " +
                                             std::to_string(i) + " <= " + std::to_string(j));
                }
            }
    }
};

struct CompatibilityCheck {
    bool ok = false;
    int i = -1;
    int j = -1;
    int cell = -1;
};

/// Verifies mu_i(A n Omega_j) = mu_j(A n Omega_j) for every comparable
/// pair j <= i and every cell union A. Per-cell equality on Omega_j
/// decides this exactly for all 2^cells sets at once: equal summands
/// give identical sums, and any per-cell violation is already witnessed
/// by a singleton A.
inline CompatibilityCheck check_compatibility(const InductiveSystem& s) {
    const int n = s.index.size;
    const int cells = s.algebra->cell_count();
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            if (i == j || !s.index.related(j, i)) continue;
            for (int c = 0; c < cells; ++c) {
                if (!cell_in(s.omegas[static_cast<std::size_t>(j)], c)) continue;
                const auto& mi = s.measures[static_cast<std::size_t>(i)].mass[static_cast<std::size_t>(c)];
                const auto& mj = s.measures[static_cast<std::size_t>(j)].mass[static_cast<std::size_t>(c)];
                if (mi != mj) return {false, i, j, c};
            }
        }
    return {true, -1, -1, -1};
}

/// Generalized limit of the increasing net: per-cell supremum, which
/// the finite directed index attains at a common upper bound.
inline MeasureTable generalized_limit(const InductiveSystem& s) {
    MeasureTable out;
    out.algebra = s.algebra;
    const int cells = s.algebra->cell_count();
    out.mass.assign(static_cast<std::size_t>(cells), ExtendedReal(0.0));
    for (int c = 0; c < cells; ++c) {
        ExtendedReal best(0.0);
        for (const auto& table : s.measures)
            best = ExtendedReal::max(best, table.mass[static_cast<std::size_t>(c)]);
        out.mass[static_cast<std::size_t>(c)] = best;
    }
    return out;
}

/// Integral of a nonnegative simple function given by per-cell values:
/// sum over cells of f(c) * mu(c), with 0 * inf = 0.
inline ExtendedReal integrate_table(std::span<const double> f, const MeasureTable& mu) {
    mu.validate();
    if (static_cast<int>(f.size()) != mu.algebra->cell_count())
        throw InvariantError("integrand needs one value per cell");
    ExtendedReal total(0.0);
    for (std::size_t c = 0; c < f.size(); ++c) {
        if (f[c] < 0.0)
            throw InvariantError("integrate_table needs a nonnegative integrand; "
                                 "split signed integrands into positive and negative parts");
        total += mu.mass[c].scaled(f[c]);
    }
    return total;
}

/// Signed integrand split into positive and negative parts. Exactly one
/// infinite part yields the correspondingly signed IEEE infinity; both
/// parts infinite is an undefined integral.
inline double integrate_table_signed(std::span<const double> f, const MeasureTable& mu) {
    std::vector<double> pos(f.size()), neg(f.size());
    for (std::size_t c = 0; c < f.size(); ++c) {
        pos[c] = f[c] > 0.0 ? f[c] : 0.0;
        neg[c] = f[c] < 0.0 ? -f[c] : 0.0;
    }
    const ExtendedReal p = integrate_table(pos, mu);
    const ExtendedReal n = integrate_table(neg, mu);
    if (p.is_infinite() && n.is_infinite())
        throw InvariantError("undefined integral: positive and negative parts both infinite");
    if (p.is_infinite()) return std::numeric_limits<double>::infinity();
    if (n.is_infinite()) return -std::numeric_limits<double>::infinity();
    return p.value() - n.value();
}

/// For f vanishing outside Omega_{i0} of a compatible system, the
/// integral against the inductive limit equals the integral against
/// mu_{i0}; verified to 1e-12 relative.
inline bool restriction_theorem_check(const InductiveSystem& s, std::span<const double> f,
                                      int i0) {
    if (i0 < 0 || i0 >= s.index.size) throw InvariantError("index i0 out of range");
    if (static_cast<int>(f.size()) != s.algebra->cell_count())
        throw InvariantError("integrand needs one value per cell");
    for (int c = 0; c < s.algebra->cell_count(); ++c)
        if (!cell_in(s.omegas[static_cast<std::size_t>(i0)], c) &&
            f[static_cast<std::size_t>(c)] != 0.0)
            throw InvariantError("integrand does not vanish outside Omega_{i0}");
    const ExtendedReal lhs = integrate_table(f, generalized_limit(s));
    const ExtendedReal rhs = integrate_table(f, s.measures[static_cast<std::size_t>(i0)]);
    if (lhs.is_infinite() || rhs.is_infinite())
        return lhs.is_infinite() && rhs.is_infinite();
    const double a = lhs.value();
    const double b = rhs.value();
    return std::fabs(a - b) <= 1e-12 * std::max(std::fabs(a), std::fabs(b));
}

/// Finite list of charts with essentially disjoint images sharing one
/// ambient dimension: an element of the directed set of finite disjoint
/// unions of submanifolds.
struct DisjointManifold {
    int ambient_dim = 0;
    std::vector<Chart> charts;

    static DisjointManifold make(int ambient_dim, std::vector<Chart> charts) {
        DisjointManifold m;
        m.ambient_dim = ambient_dim;
        m.charts = std::move(charts);
        m.validate();
        return m;
    }

    void validate() const {
        if (ambient_dim < 1 || ambient_dim > kMaxAmbientDim)
            throw InvariantError("ambient dimension out of supported range");
        for (const auto& c : charts) {
            c.validate();
            if (c.ambient_dim != ambient_dim)
                throw InvariantError("all charts of a disjoint manifold must share the "
                                     "ambient dimension");
        }
    }
};

struct OverlapWitness {
    int chart_a = -1;
    int chart_b = -1;
    std::vector<double> u_a;
    std::vector<double> u_b;
    double distance = 0.0;
};

inline constexpr double kOverlapDistance = 1e-9;

/// Spot-check of the essential-disjointness declaration: sample random
/// parameter pairs across chart pairs and flag image points closer than
/// kOverlapDistance with distinct parameters. A witness warrants a
/// warning, not an error; shared boundaries are legitimate and have
/// measure zero.
inline std::optional<OverlapWitness> check_essentially_disjoint(const DisjointManifold& m,
                                                                std::uint64_t seed,
                                                                int samples = 10000) {
    const int k = static_cast<int>(m.charts.size());
    if (k == 0) return std::nullopt;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, k - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto sample_point = [&](const Chart& c, std::vector<double>& u) {
        u.resize(static_cast<std::size_t>(c.param_dim));
        for (int d = 0; d < c.param_dim; ++d) {
            const Interval& iv = c.domain.bounds[static_cast<std::size_t>(d)];
            u[static_cast<std::size_t>(d)] = iv.lo + (iv.hi - iv.lo) * unit(rng);
        }
    };

    std::vector<double> ua, ub;
    std::vector<double> pa(static_cast<std::size_t>(m.ambient_dim));
    std::vector<double> pb(static_cast<std::size_t>(m.ambient_dim));
    for (int s = 0; s < samples; ++s) {
        int a = pick(rng);
        int b = pick(rng);
        if (a > b) std::swap(a, b);
        sample_point(m.charts[static_cast<std::size_t>(a)], ua);
        sample_point(m.charts[static_cast<std::size_t>(b)], ub);
        if (a == b && ua == ub) continue;
        m.charts[static_cast<std::size_t>(a)].map_into(ua, pa.data());
        m.charts[static_cast<std::size_t>(b)].map_into(ub, pb.data());
        double dist2 = 0.0;
        for (int d = 0; d < m.ambient_dim; ++d) {
            const double diff = pa[static_cast<std::size_t>(d)] - pb[static_cast<std::size_t>(d)];
            dist2 += diff * diff;
        }
        const double dist = std::sqrt(dist2);
        if (dist < kOverlapDistance) return OverlapWitness{a, b, ua, ub, dist};
    }
    return std::nullopt;
}

struct ChartContribution {
    double value = 0.0;
    int depth = 0;
    long long evaluations = 0;
};

struct HausdorffResult {
    double value = 0.0;
    std::vector<ChartContribution> charts;
};

struct HausdorffOptions {
    int order = 8;
    int max_depth = -1;  // -1: by parameter dimension
    int threads = 1;
};

/// Area-formula integrator: sum over charts of the parameter-space
/// integral of (f o phi) * sqrt(det J^T J), each chart refined until it
/// meets abs_tol / (number of charts). Chart integrals are independent;
/// the final sum is taken in chart order regardless of thread count.
inline HausdorffResult hausdorff_integrate(const Expression& f, const DisjointManifold& m,
                                           double abs_tol, HausdorffOptions opt = {}) {
    m.validate();
    if (!(abs_tol > 0.0)) throw InvariantError("abs_tol must be positive");
    if (f.arity() != m.ambient_dim)
        throw InvariantError("integrand arity must equal the ambient dimension");

    HausdorffResult result;
    result.charts.resize(m.charts.size());
    if (m.charts.empty()) return result;
    const double chart_tol = abs_tol / static_cast<double>(m.charts.size());

    parallel_for(static_cast<int>(m.charts.size()), opt.threads, [&](int ci) {
        const Chart& chart = m.charts[static_cast<std::size_t>(ci)];
        std::array<double, static_cast<std::size_t>(kMaxAmbientDim)> image{};
        const auto integrand = [&](std::span<const double> u) {
            const double element = detail::map_and_volume_element(chart, u, image.data());
            const double fi = eval(f, std::span<const double>(image.data(),
                                                              static_cast<std::size_t>(
                                                                  chart.ambient_dim)));
            return fi * element;
        };
        QuadratureOptions q;
        q.abs_tol = chart_tol;
        q.order = opt.order;
        q.max_depth = opt.max_depth;
        const QuadratureResult qr = integrate_box_dyadic(chart.domain, integrand, q);
        if (!qr.converged)
            throw ConvergenceError("chart " + std::to_string(ci) +
                                   " integral did not converge within the refinement budget");
        result.charts[static_cast<std::size_t>(ci)] = {qr.value, qr.depth, qr.evaluations};
    });

    for (const auto& c : result.charts) result.value += c.value;
    return result;
}

} // namespace gmt
