#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "gmt/geometry.hpp"

namespace {

gmt::Chart circle_chart(double radius = 1.0, double speed = 1.0) {
    const double span = 2.0 * M_PI / speed;
    gmt::ParamBox box{{{0.0, span}}};
    const std::string r = gmt::detail::format_double(radius);
    const std::string s = gmt::detail::format_double(speed);
    std::vector<gmt::Expression> comps{
        gmt::parse(r + "*cos(" + s + "*u1)", 1, "u"),
        gmt::parse(r + "*sin(" + s + "*u1)", 1, "u")};
    return gmt::Chart::make(box, std::move(comps), 2);
}

gmt::Chart sphere_chart() {
    gmt::ParamBox box{{{0.0, M_PI}, {0.0, 2.0 * M_PI}}};
    std::vector<gmt::Expression> comps{
        gmt::parse("sin(u1)*cos(u2)", 2, "u"),
        gmt::parse("sin(u1)*sin(u2)", 2, "u"),
        gmt::parse("cos(u1)", 2, "u")};
    return gmt::Chart::make(box, std::move(comps), 3);
}

} // namespace

TEST_CASE("jacobian matches hand derivatives", "[geometry]") {
    const auto circle = circle_chart();
    const auto j0 = gmt::jacobian(circle, std::vector<double>{0.0});
    REQUIRE(j0.rows == 2);
    REQUIRE(j0.cols == 1);
    CHECK(j0(0, 0) == 0.0);   // -sin(0)
    CHECK(j0(1, 0) == 1.0);   // cos(0)

    gmt::ParamBox square{{{-5.0, 5.0}, {-5.0, 5.0}}};
    const auto identity = gmt::Chart::make(
        square, {gmt::parse("u1", 2, "u"), gmt::parse("u2", 2, "u")}, 2);
    const auto ji = gmt::jacobian(identity, std::vector<double>{1.25, -2.5});
    CHECK(ji(0, 0) == 1.0);
    CHECK(ji(0, 1) == 0.0);
    CHECK(ji(1, 0) == 0.0);
    CHECK(ji(1, 1) == 1.0);

    gmt::ParamBox line{{{-10.0, 10.0}}};
    const auto graph =
        gmt::Chart::make(line, {gmt::parse("u1", 1, "u"), gmt::parse("u1^2", 1, "u")}, 2);
    const auto jg = gmt::jacobian(graph, std::vector<double>{3.0});
    CHECK(jg(0, 0) == 1.0);
    CHECK(jg(1, 0) == 6.0);
}

TEST_CASE("jacobian rejects points outside the domain", "[geometry]") {
    const auto circle = circle_chart();
    CHECK_THROWS_AS(gmt::jacobian(circle, std::vector<double>{-0.5}), gmt::InvariantError);
}

TEST_CASE("gram volume element on standard charts", "[geometry]") {
    const auto circle = circle_chart();
    for (double u : {0.1, 1.0, 2.5, 4.0, 6.0})
        CHECK(gmt::gram_volume_element(circle, std::vector<double>{u}) ==
              Catch::Approx(1.0).epsilon(1e-14));

    // sphere element is sin(u1), the standard first fundamental form
    const auto sphere = sphere_chart();
    for (double u1 : {0.3, 1.0, 2.0, 2.9})
        for (double u2 : {0.0, 2.0, 5.0})
            CHECK(gmt::gram_volume_element(sphere, std::vector<double>{u1, u2}) ==
                  Catch::Approx(std::sin(u1)).epsilon(1e-13));

    gmt::ParamBox square{{{-1.0, 1.0}, {-1.0, 1.0}}};
    const auto identity = gmt::Chart::make(
        square, {gmt::parse("u1", 2, "u"), gmt::parse("u2", 2, "u")}, 2);
    CHECK(gmt::gram_volume_element(identity, std::vector<double>{0.25, 0.5}) == 1.0);
}

TEST_CASE("volume element equals |det J| when m = n", "[geometry][property]") {
    std::mt19937_64 rng(90125);
    std::uniform_real_distribution<double> coeff(-2.0, 2.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = coeff(rng), b = coeff(rng), c = coeff(rng), d = coeff(rng);
        const double det = a * d - b * c;
        // the Gram route computes det(J)^2 and squares the condition
        // number with it; 1e-12 relative is only meaningful away from
        // singular Jacobians
        if (std::fabs(det) < 0.3) continue;
        gmt::ParamBox box{{{-1.0, 1.0}, {-1.0, 1.0}}};
        const auto fmt = [](double v) { return "(" + gmt::detail::format_double(v) + ")"; };
        const auto chart = gmt::Chart::make(
            box,
            {gmt::parse(fmt(a) + "*u1 + " + fmt(b) + "*u2", 2, "u"),
             gmt::parse(fmt(c) + "*u1 + " + fmt(d) + "*u2", 2, "u")},
            2);
        const double element = gmt::gram_volume_element(chart, std::vector<double>{0.3, -0.4});
        REQUIRE(element == Catch::Approx(std::fabs(det)).epsilon(1e-12));
    }
}

TEST_CASE("rank deficiency is detected", "[geometry]") {
    // curve with vanishing velocity at u = 0
    gmt::ParamBox line{{{-1.0, 1.0}}};
    const auto cusp =
        gmt::Chart::make(line, {gmt::parse("u1^2", 1, "u"), gmt::parse("u1^2", 1, "u")}, 2);
    CHECK_THROWS_AS(gmt::gram_volume_element(cusp, std::vector<double>{0.0}),
                    gmt::RankDeficiencyError);
    CHECK_NOTHROW(gmt::gram_volume_element(cusp, std::vector<double>{0.5}));

    // degenerate second parameter direction, deficient everywhere
    gmt::ParamBox square{{{-1.0, 1.0}, {-1.0, 1.0}}};
    const auto collapsed = gmt::Chart::make(
        square, {gmt::parse("u1", 2, "u"), gmt::parse("u1 + 0*u2", 2, "u")}, 2);
    CHECK_THROWS_AS(gmt::gram_volume_element(collapsed, std::vector<double>{0.3, 0.3}),
                    gmt::RankDeficiencyError);
}

TEST_CASE("reparameterized circle doubles the element at matched angles", "[geometry]") {
    const auto slow = circle_chart(1.0, 1.0);   // u in [0, 2pi)
    const auto fast = circle_chart(1.0, 2.0);   // u in [0, pi), doubled speed
    for (double angle : {0.2, 0.9, 1.7, 2.8}) {
        const double e_slow = gmt::gram_volume_element(slow, std::vector<double>{angle});
        const double e_fast = gmt::gram_volume_element(fast, std::vector<double>{angle / 2.0});
        CHECK(e_fast == Catch::Approx(2.0 * e_slow).epsilon(1e-13));
    }
}

TEST_CASE("unit ball volumes", "[geometry]") {
    CHECK(gmt::unit_ball_volume(1) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(gmt::unit_ball_volume(2) == Catch::Approx(M_PI).epsilon(1e-12));
    CHECK(gmt::unit_ball_volume(3) == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-12));
    CHECK_THROWS_AS(gmt::unit_ball_volume(0), gmt::InvariantError);

    // recursion Omega_m = Omega_{m-2} * 2 pi / m
    for (int m = 3; m <= 12; ++m)
        CHECK(gmt::unit_ball_volume(m) ==
              Catch::Approx(gmt::unit_ball_volume(m - 2) * 2.0 * M_PI / m).epsilon(1e-10));
}

TEST_CASE("chart construction validates its invariants", "[geometry]") {
    gmt::ParamBox bad{{{1.0, 1.0}}};
    CHECK_THROWS_AS(bad.validate(), gmt::InvariantError);

    gmt::ParamBox line{{{0.0, 1.0}}};
    // component arity must match the parameter dimension
    CHECK_THROWS_AS(gmt::Chart::make(line, {gmt::parse("u1+u2", 2, "u")}, 1),
                    gmt::InvariantError);
    // m <= n
    gmt::ParamBox square{{{0.0, 1.0}, {0.0, 1.0}}};
    CHECK_THROWS_AS(gmt::Chart::make(square, {gmt::parse("u1", 2, "u")}, 1),
                    gmt::InvariantError);
    // one component per ambient coordinate
    CHECK_THROWS_AS(gmt::Chart::make(line, {gmt::parse("u1", 1, "u")}, 2),
                    gmt::InvariantError);
}
