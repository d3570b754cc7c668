#include <cmath>
#include <random>
#include <set>

#include "doctest.h"
#include "random_complex.hpp"
#include "reebfol/obstruction.hpp"

using namespace reebfol;

namespace {

FoliatedChart box(double lo, double hi, int n) {
    const double h = (hi - lo) / (n - 1);
    GridSpec g{n, n, 1, h, h, 1.0, lo, lo, 0.0};
    return FoliatedChart(g, flat_metric(g), {wall(Side::XMin), wall(Side::XMax), wall(Side::YMin), wall(Side::YMax)});
}

FoliatedChart half_plane(int nx, int ny) {
    GridSpec g{nx, ny, 1, 2.0 / nx, 2.0 / (ny - 1), 1.0, 0.0, 0.5, 0.0};
    return FoliatedChart(g, flat_metric(g), {periodic_seam(Side::XMax), wall(Side::YMin), wall(Side::YMax)});
}

// signed area enclosed by the marked edges of one level (edges as oriented chains)
double marked_signed_area(const LeafComplex& c, const std::vector<std::size_t>& es) {
    double a = 0.0;
    for (std::size_t e : es) {
        const Vec2 p = c.vertices[c.edge_vertices[e].first], q = c.vertices[c.edge_vertices[e].second];
        a += 0.5 * (p.x * q.y - q.x * p.y);
    }
    return a;
}

}  // namespace

TEST_CASE("closed torus without marks: Stokes obstruction with unit weights") {
    GridSpec g{6, 5, 1, 0.2, 0.2, 1.0};
    FoliatedChart t(g, flat_metric(g), {periodic_seam(Side::XMax), periodic_seam(Side::YMax)});
    auto cx = grid_complex(t);
    CHECK(cx.faces() == 6 * 5 * 4);
    CHECK(cx.marked() == 0);
    auto o = solve_beta_lp(cx);
    REQUIRE(o.kind == LPOutcome::Kind::Obstruction);
    for (const auto& w : o.weights) CHECK(w == 1);
    CHECK(verify_certificate(o, cx));
}

TEST_CASE("levels of y on a rectangle") {
    auto c = box(0.0, 1.0, 9);
    auto tau = TransverseMeasureField::from_expression(c, Expression("exp(y)"));
    auto cx = extract_complex(c, tau, 0, 3);
    REQUIRE(cx.levels.size() == 3);
    std::set<long> heights;
    for (std::size_t e = 0; e < cx.edges(); ++e) {
        if (cx.mark[e] == 0) continue;
        CHECK(cx.mark[e] == 1);
        const Vec2 p = cx.vertices[cx.edge_vertices[e].first], q = cx.vertices[cx.edge_vertices[e].second];
        CHECK(p.y == doctest::Approx(q.y));
        CHECK(q.x > p.x);  // superlevel (above) on the left
        heights.insert(std::lround(p.y * 1e6));
    }
    CHECK(heights.size() == 3);
    auto o = solve_beta_lp(cx);
    CHECK(o.kind == LPOutcome::Kind::FeasibleBeta);
    CHECK(verify_certificate(o, cx));
    CHECK_THROWS_AS(extract_complex(c, TransverseMeasureField::constant(c, 2.0), 0, 3), ComplexError);
}

TEST_CASE("radial minimum: closed loops signed outward, disk obstruction") {
    auto c = box(-1.0, 1.0, 21);
    auto tau = TransverseMeasureField::from_expression(c, Expression("exp(x^2 + y^2)"));
    auto cx = extract_complex(c, tau, 0, 2);
    // the lowest level is a closed loop around the origin; the superlevel is outside,
    // so the loop runs clockwise
    const double r2 = std::log(cx.levels[0]);
    std::vector<std::size_t> inner;
    for (std::size_t e = 0; e < cx.edges(); ++e) {
        if (cx.mark[e] == 0) continue;
        const Vec2 p = cx.vertices[cx.edge_vertices[e].first];
        if (std::fabs(p.x * p.x + p.y * p.y - r2) < 0.05) inner.push_back(e);
    }
    REQUIRE(!inner.empty());
    std::map<std::size_t, int> degree;
    for (std::size_t e : inner) {
        degree[cx.edge_vertices[e].first] -= 1;
        degree[cx.edge_vertices[e].second] += 1;
    }
    for (const auto& [v, d] : degree) CHECK(d == 0);
    CHECK(marked_signed_area(cx, inner) < 0.0);
    CHECK(-marked_signed_area(cx, inner) == doctest::Approx(M_PI * r2).epsilon(0.05));

    auto o = solve_beta_lp(cx);
    REQUIRE(o.kind == LPOutcome::Kind::Obstruction);
    CHECK(verify_certificate(o, cx));
    // supported on the sublevel disk
    // (faces inside the first level; all have r^2 < level on their vertices)
    mpq_class support = 0;
    for (std::size_t f = 0; f < cx.faces(); ++f)
        if (sgn(o.weights[f]) > 0) support += cx.area[f];
    CHECK(support.get_d() == doctest::Approx(M_PI * r2).epsilon(0.05));

    auto peak = TransverseMeasureField::from_expression(c, Expression("exp(-(x^2 + y^2))"));
    auto cp = extract_complex(c, peak, 0, 2);
    auto op = solve_beta_lp(cp);
    CHECK(op.kind == LPOutcome::Kind::FeasibleBeta);
    CHECK(verify_certificate(op, cp));
}

TEST_CASE("mutations break certificates") {
    auto c = box(0.0, 1.0, 6);
    auto cx = extract_complex(c, TransverseMeasureField::from_expression(c, Expression("exp(y + 0.3 * x)")), 0, 2);
    auto o = solve_beta_lp(cx);
    REQUIRE(o.kind == LPOutcome::Kind::FeasibleBeta);
    REQUIRE(verify_certificate(o, cx));
    for (std::size_t e = 0; e < cx.edges(); e += 7) {
        auto bad = o;
        bad.beta[e] += 1000;
        auto bad2 = o;
        bad2.beta[e] -= 1000;
        CHECK_FALSE((verify_certificate(bad, cx) && verify_certificate(bad2, cx)));
    }
    auto bad = o;
    bad.beta.pop_back();
    CHECK_THROWS_AS(verify_certificate(bad, cx), ComplexError);

    GridSpec g{4, 4, 1, 0.25, 0.25, 1.0};
    FoliatedChart t(g, flat_metric(g), {periodic_seam(Side::XMax), periodic_seam(Side::YMax)});
    auto tc = grid_complex(t);
    auto ob = solve_beta_lp(tc);
    REQUIRE(ob.kind == LPOutcome::Kind::Obstruction);
    for (std::size_t f = 0; f < tc.faces(); f += 5) {
        auto neg = ob;
        neg.weights[f] = -neg.weights[f];
        CHECK_FALSE(verify_certificate(neg, tc));
    }
}

TEST_CASE("random complexes: exactly one alternative, always verified") {
    std::mt19937_64 rng(2024);
    int feasible = 0, obstructed = 0;
    for (int k = 0; k < 60; ++k) {
        auto cx = oracle::random_complex(rng);
        auto o = solve_beta_lp(cx);
        CHECK(verify_certificate(o, cx));
        (o.kind == LPOutcome::Kind::FeasibleBeta ? feasible : obstructed)++;
        // scale invariance
        auto scaled = cx;
        for (auto& a : scaled.area) a *= mpq_class(7, 3);
        auto os = solve_beta_lp(scaled);
        CHECK(os.kind == o.kind);
        CHECK(verify_certificate(os, scaled));
        if (o.kind == LPOutcome::Kind::Obstruction)
            for (std::size_t f = 0; f < cx.faces(); ++f) CHECK(sgn(o.weights[f]) == sgn(os.weights[f]));
    }
    CHECK(feasible > 0);
    CHECK(obstructed > 0);
    for (int k = 0; k < 10; ++k) {
        auto t = oracle::stokes_torus(rng);
        auto o = solve_beta_lp(t);
        CHECK(o.kind == LPOutcome::Kind::Obstruction);
        CHECK(verify_certificate(o, t));
    }
}

TEST_CASE("half-plane f = y complexes are feasible at three resolutions") {
    std::vector<FoliatedChart> charts{half_plane(8, 9), half_plane(16, 17), half_plane(32, 33)};
    std::vector<TransverseMeasureField> taus;
    for (auto& c : charts) taus.push_back(TransverseMeasureField::from_expression(c, Expression("y")));
    std::vector<SweepCase> cases;
    for (std::size_t i = 0; i < charts.size(); ++i) cases.push_back({"half-plane", &charts[i], &taus[i], 0, 4});
    auto r = superharmonic_feasibility_sweep(cases);
    CHECK(r.obstructions == 0);
    for (const auto& e : r.entries) {
        CHECK(e.verified);
        CHECK(e.marked > 0);
    }
}
