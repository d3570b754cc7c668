#include <cmath>

#include "doctest.h"
#include "pants_exit.hpp"
#include "reebfol/brownian.hpp"
#include "reebfol/contact.hpp"
#include "reebfol/instances.hpp"
#include "reebfol/obstruction.hpp"

using namespace reebfol;

TEST_CASE("instance registry") {
    CHECK(instance_names().size() == 4);
    for (const auto& n : instance_names()) {
        const auto d = make_instance(n);
        CHECK(d.name == n);
        CHECK(d.tau.log_values().size() == d.chart.node_count());
    }
    CHECK_THROWS_AS(make_instance("example4"), InstanceError);
    CHECK_THROWS_AS(make_instance("example3-pants", 6), InstanceError);
    CHECK(make_instance("product-torus").expected.invariant_measure);
    CHECK(make_instance("example2-halfplane").expected.transversality == Verdict::Pass);
}

TEST_CASE("product torus: obstruction and zero contraction") {
    const auto d = make_instance("product-torus");
    const auto c = grid_complex(d.chart);
    const auto o = solve_beta_lp(c);
    CHECK(o.kind == LPOutcome::Kind::Obstruction);
    CHECK(verify_certificate(o, c));
    HolonomyParams hp{{0.5, 1e-3, 100, 2, StartSpec::uniform()}, 5, 0.2};
    CHECK(estimate_contraction_rate(d.chart, d.tau, hp).estimate == *d.expected.kappa);
}

TEST_CASE("example 1: beta_y matches the reference") {
    const auto d = make_instance("example1-quotient");
    const auto beta = build_beta(d.chart, d.tau);
    const std::size_t n = d.chart.node_index(5, 5, 0);
    CHECK(beta.y[n] == doctest::Approx(d.expected.value("beta_y")).epsilon(1e-3));
}

TEST_CASE("example 3: density levels and plateau collars") {
    const auto d = make_instance("example3-pants");
    const auto& c = d.chart;
    const double ln2 = std::log(2.0);
    CHECK(c.sheets() == 2);
    CHECK(c.x_max() == 1.5);
    for (int j = 0; j < c.ny(); ++j) {
        CHECK(d.tau.log_f(c.leaf_index(0, j)) == 0.0);
        CHECK(d.tau.log_f(c.leaf_index(c.nx() - 1, j)) == 0.0);
    }
    const int m = d.resolution;
    for (int i = m / 4; i <= 5 * m / 4; ++i) CHECK(d.tau.log_f(c.leaf_index(i, m)) == doctest::Approx(ln2));
    // the harmonic measure of a is its first-exit probability
    const auto r = oracle::pants_first_exit(0.75, 0.0, 20000, 1e-4, 3);
    const double n = double(r.a + r.b + r.c), pa = r.a / n;
    CHECK(std::fabs(pa - pants_harmonic_measure(0.75, 0.0)) < 3 * std::sqrt(pa * (1 - pa) / n) + 0.01);
}

TEST_CASE("example 3: exit probabilities match the frozen values") {
    const auto& e = make_instance("example3-pants").expected;
    const auto r = oracle::pants_first_exit(0.75, 0.0, 20000, 1e-4, 11);
    const double n = double(r.a + r.b + r.c);
    for (auto [key, count] : {std::pair{"p_a", r.a}, std::pair{"p_b", r.b}, std::pair{"p_c", r.c}}) {
        const double p = count / n;
        CHECK(std::fabs(p - e.value(key)) < 3 * std::sqrt(p * (1 - p) / n) + 0.01);
    }
    CHECK(e.value("p_b") + e.value("p_c") > e.value("p_a"));
}

TEST_CASE("example 3: holonomy is continuous across the cuffs") {
    // log-scale jumps by ln 2 at a crossing; H = log f(p) - log f(start) + log-scale must not
    const auto d = make_instance("example3-pants");
    const LeafDiffusion s(d.chart, 1e-5);
    int crossings = 0;
    double worst = 0.0;
    for (auto [x, y] : {std::pair{0.0, 0.5}, std::pair{1.5, 0.3}, std::pair{0.75, 1.0}, std::pair{0.0, 0.95}}) {
        for (std::uint64_t q = 0; q < 50; ++q) {
            for (double z : {0.2, 0.7}) {
                WalkerState w = s.initial(StartSpec::point({x, y}, z), 5, q);
                const double lf0 = d.tau.log_f_at(d.chart, w.p, 0);
                double h_prev = 0.0, scale_prev = 0.0;
                s.run(w, 50, PathNoise(5, streams::kPaths, q), [&](std::int64_t, const WalkerState& v) {
                    const double h = d.tau.log_f_at(d.chart, v.p, 0) - lf0 + v.log_scale;
                    if (v.log_scale != scale_prev) ++crossings;
                    worst = std::max(worst, std::fabs(h - h_prev));
                    h_prev = h;
                    scale_prev = v.log_scale;
                });
            }
        }
    }
    CHECK(crossings > 100);
    CHECK(worst < 0.1);
}

TEST_CASE("pants complex: cuffs marked, no obstruction") {
    for (int m : {4, 8}) {
        const auto c = pants_complex(m);
        CHECK(c.faces() == std::size_t(2 * 3 * m * m / 2));
        CHECK(c.marked() == std::size_t(6 * m));
        const auto o = solve_beta_lp(c);
        CHECK(o.kind == LPOutcome::Kind::FeasibleBeta);
        CHECK(verify_certificate(o, c));
    }
    CHECK_THROWS_AS(pants_complex(3), InstanceError);
}
