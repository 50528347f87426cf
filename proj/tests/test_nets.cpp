#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "gmt/nets.hpp"
#include "support/oracles.hpp"

using gmt::riemann_sum;
using gmt::TaggedPartition;
using gmt::TagRule;
using gmt::uniform_partition;

TEST_CASE("refine bisects every cell with midpoint tags", "[nets]") {
    const auto p = uniform_partition(0.0, 1.0, 1);
    const auto q = gmt::refine(p);
    CHECK(q.points == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(q.tags == std::vector<double>{0.25, 0.75});

    const auto p8 = uniform_partition(0.0, 1.0, 8);
    CHECK(gmt::refine(p8).cell_count() == 16);

    // successive refinements nest
    const auto q2 = gmt::refine(q);
    CHECK(q.refines(p));
    CHECK(q2.refines(q));
    CHECK(q2.refines(p));
    CHECK_FALSE(p.refines(q));
}

TEST_CASE("refine halves the mesh width exactly on dyadic intervals", "[nets]") {
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{-1.0, 1.0}, std::pair{0.0, 2.0}}) {
        TaggedPartition p = uniform_partition(a, b, 1);
        for (int step = 0; step < 10; ++step) {
            const TaggedPartition q = gmt::refine(p);
            REQUIRE(q.mesh_width() == 0.5 * p.mesh_width());
            p = q;
        }
    }
}

TEST_CASE("riemann sums of fixed examples", "[nets]") {
    const auto one = gmt::parse("1", 1, "x");
    for (int cells : {1, 3, 7, 16})
        CHECK(riemann_sum(one, uniform_partition(0.0, 1.0, cells)) ==
              Catch::Approx(1.0).epsilon(1e-15));

    const auto id = gmt::parse("x1", 1, "x");
    CHECK(riemann_sum(id, uniform_partition(0.0, 1.0, 4, TagRule::Left)) == 0.375);

    // midpoint tags integrate linear f exactly; dyadic cell counts are
    // even exact in floating point
    for (int k = 0; k <= 6; ++k)
        CHECK(riemann_sum(id, uniform_partition(0.0, 1.0, 1 << k)) == 0.5);
    for (int cells : {3, 5, 7, 11, 63})
        CHECK(riemann_sum(id, uniform_partition(0.0, 1.0, cells)) ==
              Catch::Approx(0.5).margin(1e-14));
}

TEST_CASE("tagged partition validation", "[nets]") {
    TaggedPartition bad;
    bad.points = {0.0, 0.5, 0.5, 1.0};
    bad.tags = {0.1, 0.5, 0.9};
    CHECK_THROWS_AS(bad.validate(), gmt::InvariantError);

    TaggedPartition stray;
    stray.points = {0.0, 0.5, 1.0};
    stray.tags = {0.6, 0.7};  // first tag outside its cell
    CHECK_THROWS_AS(stray.validate(), gmt::InvariantError);
}

TEST_CASE("net limits of standard integrals", "[nets]") {
    const auto id = gmt::parse("x1", 1, "x");
    const auto sq = gmt::parse("x1^2", 1, "x");
    const auto sine = gmt::parse("sin(x1)", 1, "x");

    const auto l1 = gmt::net_limit({uniform_partition(0.0, 1.0, 1)}, id, 1e-10, 40);
    CHECK(l1.value == Catch::Approx(0.5).margin(1e-10));
    CHECK(l1.report.converged);
    CHECK(l1.report.steps.size() <= 40);

    const auto l2 = gmt::net_limit({uniform_partition(0.0, 1.0, 1)}, sq, 1e-8, 40);
    CHECK(l2.value == Catch::Approx(1.0 / 3.0).margin(1e-8));

    const auto l3 = gmt::net_limit({uniform_partition(0.0, M_PI, 1)}, sine, 1e-8, 40);
    CHECK(l3.value == Catch::Approx(2.0).margin(1e-8));
}

TEST_CASE("net limit reports non-convergence with the partial table", "[nets]") {
    const auto sine = gmt::parse("sin(x1)", 1, "x");
    try {
        gmt::net_limit({uniform_partition(0.0, M_PI, 1)}, sine, 1e-12, 3);
        FAIL("expected NetConvergenceError");
    } catch (const gmt::NetConvergenceError& e) {
        CHECK(e.report().steps.size() == 3);
        CHECK_FALSE(e.report().converged);
    }
}

TEST_CASE("polynomial net limits match the antiderivative", "[nets][property]") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    std::uniform_int_distribution<int> degree(0, 5);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> coeffs(static_cast<std::size_t>(degree(rng)) + 1);
        for (auto& c : coeffs) c = coeff(rng);
        const auto f = gmt::parse(oracles::polynomial_source(coeffs), 1, "x");
        const double expected = oracles::polynomial_integral(coeffs, 0.0, 1.0);
        const double tol = 1e-9;
        const auto limit = gmt::net_limit({uniform_partition(0.0, 1.0, 1)}, f, tol, 60);
        REQUIRE(limit.value == Catch::Approx(expected).margin(tol));
    }
}

TEST_CASE("monotone sandwich for nondecreasing integrands", "[nets][property]") {
    // for f >= 0 nondecreasing, left sums rise and right sums fall
    // toward the same limit under uniform dyadic refinement
    const std::pair<const char*, double> cases[] = {{"x1^2", 1.0 / 3.0},
                                                    {"exp(x1)", M_E - 1.0}};
    for (const auto& [src, exact] : cases) {
        const auto f = gmt::parse(src, 1, "x");
        std::vector<double> left, right;
        const int max_level = 14;
        for (int k = 0; k <= max_level; ++k) {
            left.push_back(riemann_sum(f, uniform_partition(0.0, 1.0, 1 << k, TagRule::Left)));
            right.push_back(riemann_sum(f, uniform_partition(0.0, 1.0, 1 << k, TagRule::Right)));
        }
        for (std::size_t i = 1; i < left.size(); ++i) {
            REQUIRE(left[i] >= left[i - 1]);
            REQUIRE(right[i] <= right[i - 1]);
        }
        // for nondecreasing f the sandwich width is (f(b) - f(a)) * h;
        // both chains reach the limit within 2 * abs_tol for that width
        const double point_a = 0.0, point_b = 1.0;
        const double variation =
            gmt::eval(f, std::span<const double>(&point_b, 1)) -
            gmt::eval(f, std::span<const double>(&point_a, 1));
        const double abs_tol = variation * std::pow(0.5, max_level);
        REQUIRE(left.back() <= exact + 1e-12);
        REQUIRE(right.back() >= exact - 1e-12);
        REQUIRE(std::fabs(left.back() - exact) <= 2.0 * abs_tol);
        REQUIRE(std::fabs(right.back() - exact) <= 2.0 * abs_tol);
    }
}

TEST_CASE("monotone net limits", "[nets]") {
    std::vector<double> chain;
    for (int k = 1; k <= 20; ++k) chain.push_back(1.0 - std::pow(2.0, -k));
    const auto sup = gmt::monotone_net_limit(chain);
    CHECK_FALSE(sup.infinite);
    CHECK(sup.value == 1.0 - std::pow(2.0, -20));

    const std::vector<double> constant(7, 3.25);
    CHECK(gmt::monotone_net_limit(constant).value == 3.25);

    std::vector<double> unbounded;
    for (int k = 1; k <= 20; ++k) unbounded.push_back(static_cast<double>(k));
    CHECK(gmt::monotone_net_limit(unbounded, 10.0).infinite);
    CHECK(gmt::monotone_net_limit(chain, std::nullopt, true).infinite);
    CHECK_FALSE(gmt::monotone_net_limit(unbounded, 100.0).infinite);

    const std::vector<double> broken = {1.0, 2.0, 1.5};
    CHECK_THROWS_AS(gmt::monotone_net_limit(broken), gmt::InvariantError);
    CHECK_THROWS_AS(gmt::monotone_net_limit(std::vector<double>{}), gmt::InvariantError);
}

TEST_CASE("custom refinement rules must refine", "[nets]") {
    gmt::RefinementNet net;
    net.initial = uniform_partition(0.0, 1.0, 2);
    net.refine_rule = [](const TaggedPartition&) {
        return uniform_partition(0.0, 1.0, 3);  // 3 cells do not refine 2
    };
    const auto f = gmt::parse("x1", 1, "x");
    CHECK_THROWS_AS(gmt::net_limit(net, f, 1e-6, 10), gmt::InvariantError);
}
