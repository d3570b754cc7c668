#include <cmath>
#include <cstring>

#include "doctest.h"
#include "heat_oracle.hpp"
#include "reebfol/logdiffusion.hpp"

using namespace reebfol;

namespace {

// x periodic on [0, 2), reflecting walls at y = 0.5 and 2.5
FoliatedChart half_plane(int nx = 4, int ny = 21) {
    GridSpec g{nx, ny, 1, 2.0 / nx, 2.0 / (ny - 1), 1.0, 0.0, 0.5, 0.0};
    return FoliatedChart(g, flat_metric(g), {periodic_seam(Side::XMax), wall(Side::YMin), wall(Side::YMax)});
}

FoliatedChart quotient_chart(int n = 8) {
    GridSpec g{n, n, 1, 1.0 / n, 1.0 / n, 1.0};
    return FoliatedChart(g, flat_metric(g), {periodic_seam(Side::XMax, 0.5), periodic_seam(Side::YMax)});
}

}  // namespace

TEST_CASE("cutoff profile") {
    const CutoffSpec c(1.0, 4.0);
    CHECK(c(0.0) == 1.0);
    CHECK(c(1.0) == 1.0);
    CHECK(c(8.0) == 0.0);
    CHECK(c(4.0) == 0.0);
    double worst = 0.0, prev = 1.0;
    bool monotone = true;
    const double h = 1e-4;
    for (double d = 0.0; d < 5.0; d += h) {
        const double v = c(d + h);
        monotone = monotone && v <= prev;
        prev = v;
        const double num = (c(d + h) - c(d)) / h;
        worst = std::max(worst, std::fabs(num));
        CHECK(c.derivative(d + h / 2) == doctest::Approx(num).epsilon(1e-5).scale(1.0));
    }
    CHECK(monotone);
    CHECK(worst <= 2.5);
    CHECK(worst == doctest::Approx(c.max_slope()).epsilon(1e-3));
    CHECK_THROWS_AS(CutoffSpec(0.1, 4.0), std::invalid_argument);
    CHECK_THROWS_AS(CutoffSpec(1.0, 1.5), std::invalid_argument);
    CHECK(CutoffSpec()(1e300) == 1.0);
}

TEST_CASE("log_diffuse fixes invariant measures and T = 0") {
    auto c = quotient_chart();
    GridSpec g{8, 8, 1, 0.125, 0.125, 1.0};
    FoliatedChart torus(g, flat_metric(g), {periodic_seam(Side::XMax), periodic_seam(Side::YMax)});
    auto tau = TransverseMeasureField::constant(torus, 3.0);
    DiffusionParams p{0.5, 1e-2, 50, CutoffSpec(1.0, 2.0), 4};
    auto r = log_diffuse(torus, tau, p);
    for (std::size_t q = 0; q < torus.node_count(); ++q) CHECK(r.field.log_f(q) == tau.log_f(q));
    CHECK(r.max_exponent_se == 0.0);

    auto ex1 = TransverseMeasureField::from_expression(c, Expression("2^(-x)"));
    p.T = 0.0;
    auto r0 = log_diffuse(c, ex1, p);
    for (std::size_t q = 0; q < c.node_count(); ++q) CHECK(r0.field.log_f(q) == ex1.log_f(q));
}

TEST_CASE("log_diffuse: scaling, determinism, certification") {
    auto c = quotient_chart();
    auto tau = TransverseMeasureField::from_expression(c, Expression("2^(-x) * (1.5 + sin(6.283185307179586 * y))"));
    DiffusionParams p{0.2, 1e-2, 200, CutoffSpec(), 11};
    auto a = log_diffuse(c, tau, p);
    auto b = log_diffuse(c, tau, p);
    auto s = log_diffuse(c, tau.scaled(5.0), p);
    for (std::size_t q = 0; q < c.node_count(); ++q) {
        CHECK(std::memcmp(&a.field.log_values()[q], &b.field.log_values()[q], sizeof(double)) == 0);
        CHECK(s.field.log_f(q) - a.field.log_f(q) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
    }
    CHECK(a.certified);
    p.se_tolerance = 1e-6;
    auto strict = log_diffuse(c, tau, p);
    CHECK_FALSE(strict.certified);
    CHECK(strict.field.channels().has_value());
}

TEST_CASE("half-plane: log-diffusion follows the heat equation for log y") {
    auto c = half_plane();
    auto tau = TransverseMeasureField::from_expression(c, Expression("y"));
    const double T = 0.1;
    DiffusionParams p{T, 1e-3, 2000, CutoffSpec(), 3};
    auto r = log_diffuse(c, tau, p);
    const int m = 400;
    auto u = oracle::heat_neumann_1d([](double y) { return std::log(y); }, 0.5, 2.5, m, T, 400);
    const auto& ch = *r.field.channels();
    for (int j : {3, 5, 10, 15}) {
        const double y = c.y_at(j);
        const std::size_t node = c.leaf_index(1, j);
        const double oracle_shift = u[(j * m) / 20] - std::log(y);
        const double shift = r.field.log_f(node) - tau.log_f(node);
        CHECK(std::fabs(shift - oracle_shift) < 3 * ch.exponent_se[node] + 10 * p.dt);
        // away from the walls the small-T drift is T / 2 * (-1 / y^2)
        if (j >= 5) CHECK(shift == doctest::Approx(-T / (2 * y * y)).epsilon(0.25));
        // Laplacian channel against the oracle's second difference
        const int o = (j * m) / 20;
        const double hh = 2.0 / m;
        const double lap_oracle = (u[o + 1] - 2 * u[o] + u[o - 1]) / (hh * hh);
        CHECK(std::fabs(ch.laplacian[node] - lap_oracle) < 3 * ch.laplacian_se[node] + 0.05);
        CHECK(std::fabs(ch.grad_x[node]) < 1e-12);
        const double grad_oracle = (u[o + 1] - u[o - 1]) / (2 * hh);
        // gradient channel comes from the least-squares fit of values and Laplacians
        CHECK(std::fabs(ch.grad_y[node] - grad_oracle) < 0.1);
    }
}

TEST_CASE("superharmonic verdicts") {
    auto c = half_plane();
    auto y = TransverseMeasureField::from_expression(c, Expression("y"));
    const double kappa0 = 1.0 / (2 * 2.5 * 2.5);
    auto pass = check_superharmonic(c, y, kappa0);
    CHECK(pass.verdict == Verdict::Pass);
    CHECK(pass.passed == pass.checked);
    CHECK(pass.checked == c.leaf_nodes() - 2 * c.nx());  // wall rows are leaf boundary
    auto flat = check_superharmonic(c, TransverseMeasureField::constant(c, 2.0), 1e-9);
    CHECK(flat.verdict == Verdict::Fail);
    // a Laplacian channel whose error bar straddles the threshold
    auto noisy = y;
    std::vector<double> lap(c.node_count(), -0.5), se(c.node_count(), 0.0);
    se[7] = 0.2;
    noisy.set_channels({std::vector<double>(c.node_count()), {}, {}, lap, se});
    CHECK(check_superharmonic(c, noisy, 0.4).verdict == Verdict::Inconclusive);
    CHECK(check_superharmonic(c, noisy, 0.4).worst_node == 7);
    CHECK(check_superharmonic(c, noisy, 0.6).verdict == Verdict::Fail);
    CHECK(exit_code(Verdict::Inconclusive) == 2);
}

TEST_CASE("tail decay") {
    auto c = half_plane();
    DiffusionParams p{1.0, 1e-2, 400, CutoffSpec(), 5};
    auto inv = tail_decay_check(c, TransverseMeasureField::constant(c), p, {0.5, 1, 2, 4}, {{1.0, 1.5}});
    for (double d : inv.discrepancy) CHECK(d == 0.0);
    auto y = TransverseMeasureField::from_expression(c, Expression("y"));
    auto r = tail_decay_check(c, y, p, {0.5, 1, 2, 5, 10, 20}, {{1.0, 1.5}, {0.5, 1.0}});
    CHECK(r.monotone);
    for (std::size_t m = 0; m < r.radii.size(); ++m)
        if (r.radii[m] >= 5) CHECK(r.discrepancy[m] < 0.01 * r.scale);
    CHECK(r.discrepancy.back() == 0.0);
    CHECK_THROWS(tail_decay_check(c, y, p, {2, 1}, {{1.0, 1.5}}));
}
