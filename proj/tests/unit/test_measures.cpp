#include <cmath>
#include <random>

#include "doctest.h"
#include "reebfol/measures.hpp"

using namespace reebfol;

namespace {

// Leaf [0,1)^2 with the x-seam (x, y, z) ~ (x + 1, y, 2z).
FoliatedChart quotient_chart(int n) {
    GridSpec g{n, n, 1, 1.0 / n, 1.0 / n, 1.0};
    return FoliatedChart(g, flat_metric(g), {periodic_seam(Side::XMax, 0.5), periodic_seam(Side::YMax)});
}

BrownianPath random_walk(const FoliatedChart& c, Vec2 start, int steps, std::mt19937_64& rng) {
    std::normal_distribution<double> n01(0.0, 0.05);
    WalkerState w;
    w.p = start;
    w.z = 0.3;
    BrownianPath p;
    p.push(0.0, w);
    for (int k = 1; k <= steps; ++k) {
        advance(c, w, {n01(rng), n01(rng)});
        p.push(k, w);
    }
    return p;
}

}  // namespace

TEST_CASE("holonomy of an invariant measure vanishes") {
    GridSpec g{16, 16, 1, 1.0 / 16, 1.0 / 16, 1.0};
    FoliatedChart torus(g, flat_metric(g), {periodic_seam(Side::XMax), periodic_seam(Side::YMax)});
    auto tau = TransverseMeasureField::constant(torus, 3.0);
    std::mt19937_64 rng(1);
    for (int k = 0; k < 10; ++k) {
        auto p = random_walk(torus, {0.4, 0.6}, 200, rng);
        CHECK(holonomy_log_derivative(p, tau, torus) == 0.0);
    }
}

TEST_CASE("example 1 quotient: one seam crossing stretches by 1/2") {
    auto c = quotient_chart(32);
    auto tau = TransverseMeasureField::from_expression(c, Expression("2^(-x)"));
    auto path = straight_path(c, {0.5, 0.5}, 0.8, {1.0, 0.0}, 1.0, 0.5 / 32);
    CHECK(path.positions.back().x == doctest::Approx(0.5));
    CHECK(path.z.back() == doctest::Approx(0.4));
    CHECK(holonomy_log_derivative(path, tau, c) == doctest::Approx(-std::log(2.0)).epsilon(1e-12));
    // three crossings
    auto longer = straight_path(c, {0.25, 0.5}, 0.8, {1.0, 0.0}, 3.0, 0.5 / 32);
    CHECK(holonomy_log_derivative(longer, tau, c) == doctest::Approx(-3 * std::log(2.0)).epsilon(1e-12));
    // paths along the seam-free y direction see nothing
    auto vertical = straight_path(c, {0.3, 0.1}, 0.8, {0.0, 1.0}, 2.5, 0.01);
    CHECK(std::fabs(holonomy_log_derivative(vertical, tau, c)) < 1e-12);
}

TEST_CASE("holonomy is additive and odd under reversal") {
    auto c = quotient_chart(16);
    auto tau = TransverseMeasureField::from_expression(c, Expression("2^(-x) * (1.5 + 0.3*sin(2*pi*y))"));
    std::mt19937_64 rng(9);
    for (int k = 0; k < 20; ++k) {
        auto a = random_walk(c, {0.2, 0.7}, 150, rng);
        WalkerState w;
        w.p = a.positions.back();
        w.z = a.z.back();
        BrownianPath b;
        b.push(0.0, w);
        std::normal_distribution<double> n01(0.0, 0.05);
        for (int s = 1; s <= 150; ++s) {
            advance(c, w, {n01(rng), n01(rng)});
            b.push(s, w);
        }
        const double ha = holonomy_log_derivative(a, tau, c);
        const double hb = holonomy_log_derivative(b, tau, c);
        const double hab = holonomy_log_derivative(concatenate(a, b), tau, c);
        CHECK(hab == doctest::Approx(ha + hb).epsilon(1e-12));
        CHECK(holonomy_log_derivative(reverse(a), tau, c) == doctest::Approx(-ha).epsilon(1e-12));
    }
    // a loop that stays inside the chart interior
    auto loop = straight_path(c, {0.3, 0.3}, 0.5, {1, 0}, 0.2, 0.01);
    loop = concatenate(loop, straight_path(c, loop.positions.back(), 0.5, {0, 1}, 0.2, 0.01));
    loop = concatenate(loop, straight_path(c, loop.positions.back(), 0.5, {-1, 0}, 0.2, 0.01));
    loop = concatenate(loop, straight_path(c, loop.positions.back(), 0.5, {0, -1}, 0.2, 0.01));
    CHECK(std::fabs(holonomy_log_derivative(loop, tau, c)) < 1e-12);
}

TEST_CASE("path leaving through an undeclared side is an error") {
    GridSpec g{5, 5, 1, 0.25, 0.25, 1.0};
    FoliatedChart c(g, flat_metric(g), {wall(Side::XMin), wall(Side::YMin), wall(Side::YMax)});
    CHECK_THROWS_AS(straight_path(c, {0.5, 0.5}, 0.0, {1, 0}, 1.0, 0.1), GeometryError);
}

TEST_CASE("measure invariants") {
    auto c = quotient_chart(8);
    CHECK_THROWS_AS(TransverseMeasureField::from_expression(c, Expression("x - 0.5")), MeasureError);
    auto tau = TransverseMeasureField::from_expression(c, Expression("2^(-x)"), 3);
    auto n = tau.normalized(c, 5.0);
    CHECK(n.f(3) == doctest::Approx(5.0));
    // seam consistency: value just below x = 1 extrapolates to f(0) * z_scale
    CHECK(tau.log_f_at(c, {1.0, 0.0}, 0) == doctest::Approx(-std::log(2.0)));
    CHECK(tau.log_f_at(c, {0.9375, 0.25}, 0) == doctest::Approx(-0.9375 * std::log(2.0)));
}

TEST_CASE("distortion") {
    IntervalMapSample affine;
    for (int k = 0; k <= 20; ++k) {
        affine.x.push_back(k * 0.1);
        affine.g.push_back(3.0 * k * 0.1 - 1.0);
    }
    CHECK(distortion(affine) == doctest::Approx(1.0).epsilon(1e-12));
    auto ab = distortion_bound_check(affine);
    CHECK(ab.holds);
    CHECK(ab.bound == doctest::Approx(1.0).epsilon(1e-9));

    IntervalMapSample sq;
    const int n = 4000;
    for (int k = 0; k <= n; ++k) {
        const double x = 1.0 + static_cast<double>(k) / n;
        sq.x.push_back(x);
        sq.g.push_back(x * x);
    }
    // oracle: sup g' / inf g' = 4 / 2
    CHECK(distortion(sq) == doctest::Approx(2.0).epsilon(1e-3));
    auto sb = distortion_bound_check(sq);
    CHECK(sb.holds);
    CHECK(sb.bound == doctest::Approx(2.0).epsilon(1e-3));

    IntervalMapSample bad{{0, 1, 2}, {0, 2, 1}};
    CHECK_THROWS_AS(distortion(bad), MeasureError);
    IntervalMapSample too_short{{0, 1}, {0, 1}};
    CHECK_THROWS_AS(distortion(too_short), MeasureError);
}

TEST_CASE("distortion bound holds on random smooth monotone polynomials") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        // g' = a0 + sum a_k x^k with positive coefficients on [0, L]
        double a[4];
        for (double& v : a) v = 0.05 + u(rng);
        const double L = 0.5 + u(rng);
        IntervalMapSample m;
        for (int k = 0; k <= 200; ++k) {
            const double x = L * k / 200.0;
            m.x.push_back(x);
            m.g.push_back(a[0] * x + a[1] * x * x / 2 + a[2] * x * x * x / 3 + a[3] * x * x * x * x / 4);
        }
        const auto r = distortion_bound_check(m);
        CHECK(r.distortion >= 1.0);
        CHECK(r.holds);
    }
}

TEST_CASE("distortion is submultiplicative under composition") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double p = u(rng), q = u(rng), r = u(rng), s = u(rng);
        auto h = [&](double x) { return x + p * x * x + q * std::sin(x) * 0.1; };
        auto g = [&](double y) { return y * (r + s * y); };
        IntervalMapSample mh, mg, mgh;
        for (int k = 0; k <= 100; ++k) {
            const double x = 0.05 + k * 0.01;
            mh.x.push_back(x);
            mh.g.push_back(h(x));
            mg.x.push_back(h(x));
            mg.g.push_back(g(h(x)));
            mgh.x.push_back(x);
            mgh.g.push_back(g(h(x)));
        }
        CHECK(distortion(mgh) <= distortion(mg) * distortion(mh) * (1 + 1e-12));
    }
}
