#include "reebfol/instances.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

#include "reebfol/expr.hpp"

namespace reebfol {

double ExpectedProperties::value(const std::string& key) const {
    for (const auto& [k, v] : reference)
        if (k == key) return v;
    throw InstanceError("no reference value '" + key + "'");
}

const std::vector<std::string>& instance_names() {
    static const std::vector<std::string> names{"product-torus", "example1-quotient", "example2-halfplane",
                                                "example3-pants"};
    return names;
}

namespace {

// pants leaf: [0, L] x [0, 1] doubled, cuff a the top slit [s, s + 1]
constexpr double kPantsLength = 1.5;
constexpr double kSlitStart = 0.25;
constexpr int kRhoCells = 48;  // reference grid for the pants harmonic measure

// rho on the reference grid of [0, L] x [0, 1]: 0 on b and c, 1 on the slit, reflecting elsewhere.
const std::vector<double>& harmonic_table() {
    static const std::vector<double> table = [] {
        const int M = kRhoCells, nx = static_cast<int>(kPantsLength * M) + 1, ny = M + 1;
        const int s0 = static_cast<int>(kSlitStart * M), s1 = s0 + M;
        std::vector<double> u(static_cast<std::size_t>(nx) * ny, 0.0);
        auto at = [&](int i, int j) -> double& { return u[static_cast<std::size_t>(j) * nx + i]; };
        auto slit = [&](int i) { return i >= s0 && i <= s1; };
        for (int i = s0; i <= s1; ++i) at(i, M) = 1.0;
        const double omega = 2.0 / (1.0 + std::sin(M_PI / (nx - 1)));
        for (int it = 0; it < 20000; ++it) {
            double change = 0.0;
            for (int j = 0; j < ny; ++j)
                for (int i = 1; i < nx - 1; ++i) {
                    if (j == M && slit(i)) continue;
                    const double down = j == 0 ? at(i, 1) : at(i, j - 1);
                    const double up = j == M ? at(i, M - 1) : at(i, j + 1);
                    const double gs = 0.25 * (at(i - 1, j) + at(i + 1, j) + down + up);
                    const double d = omega * (gs - at(i, j));
                    at(i, j) += d;
                    change = std::max(change, std::fabs(d));
                }
            if (change < 1e-13) break;
        }
        return u;
    }();
    return table;
}

double smoothstep5(double t) {
    t = std::clamp(t, 0.0, 1.0);
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

BoundarySegment fold_piece(Side s, double lo, double hi) {
    BoundarySegment seg;
    seg.side = s;
    seg.lo = lo;
    seg.hi = hi;
    seg.kind = BoundaryKind::Fold;
    return seg;
}

BoundarySegment glue(Side s, std::vector<GlueBranch> branches, std::string label, double lo = -INFINITY,
                     double hi = INFINITY) {
    BoundarySegment seg;
    seg.side = s;
    seg.lo = lo;
    seg.hi = hi;
    seg.kind = BoundaryKind::Glue;
    seg.branches = std::move(branches);
    seg.label = std::move(label);
    return seg;
}

GlueBranch branch(Side target, double u_scale, double u_shift, double z_scale, double z_shift,
                  double z_lo = -INFINITY, double z_hi = INFINITY) {
    GlueBranch b;
    b.target = target;
    b.u_scale = u_scale;
    b.u_shift = u_shift;
    b.z_scale = z_scale;
    b.z_shift = z_shift;
    b.z_lo = z_lo;
    b.z_hi = z_hi;
    return b;
}

InstanceDescriptor product_torus(int m) {
    GridSpec g{m, m, 1, 1.0 / m, 1.0 / m, 1.0};
    FoliatedChart c(g, flat_metric(g), {periodic_seam(Side::XMax), periodic_seam(Side::YMax)}, 1, 1.0);
    auto tau = TransverseMeasureField::constant(c, 1.0);
    ExpectedProperties e;
    e.invariant_measure = true;
    e.transversality = Verdict::Fail;
    e.lp = LPOutcome::Kind::Obstruction;
    e.kappa = 0.0;
    e.diffusion = {0.5, 1e-3, 200};
    return {"product-torus", "flat T^2 x S^1 with the invariant measure dz", std::move(c), std::move(tau), e, m, 0.0,
            std::nullopt};
}

InstanceDescriptor example1(int m) {
    GridSpec g{m, m, 1, 1.0 / m, 1.0 / m, 1.0};
    FoliatedChart c(g, flat_metric(g), {periodic_seam(Side::XMax, 0.5), periodic_seam(Side::YMax)}, 1, 1.0);
    auto tau = TransverseMeasureField::from_expression(c, Expression("2^(-x)"));
    ExpectedProperties e;
    e.transversality = Verdict::Fail;  // d alpha vanishes on the leaves
    e.lp = LPOutcome::Kind::FeasibleBeta;
    e.kappa = 0.0;  // log f is harmonic
    e.reference = {{"beta_y", std::log(2.0)}};
    e.diffusion = {0.5, 1e-3, 500};
    return {"example1-quotient", "(x, y, z) ~ (x + 1, y, 2z), tau = 2^-x dz", std::move(c), std::move(tau), e, m, 0.0,
            std::nullopt};
}

InstanceDescriptor example2(int m) {
    GridSpec g{2 * m, 2 * m + 1, 1, 1.0 / m, 1.0 / m, 1.0, 0.0, 0.5};
    FoliatedChart c(g, flat_metric(g), {periodic_seam(Side::XMax), wall(Side::YMin), wall(Side::YMax)}, 1, 1.0);
    auto tau = TransverseMeasureField::from_expression(c, Expression("y"));
    ExpectedProperties e;
    e.transversality = Verdict::Pass;
    e.lp = LPOutcome::Kind::FeasibleBeta;
    e.diffusion = {0.1, 1e-3, 1000};
    return {"example2-halfplane", "half-plane strip 0.5 <= y <= 2.5, x periodic, tau = y dz", std::move(c),
            std::move(tau), e, m, 0.0, std::nullopt};
}

InstanceDescriptor example3(int m) {
    constexpr double kCollar = 0.1;
    if (m % 4) throw InstanceError("example3-pants needs a resolution divisible by 4");
    const double h = 1.0 / m, s0 = kSlitStart, s1 = kSlitStart + 1.0;
    GridSpec g{static_cast<int>(kPantsLength * m) + 1, m + 1, 1, h, h, 1.0};
    std::vector<BoundarySegment> sides;
    sides.push_back(fold_piece(Side::YMin, -INFINITY, INFINITY));
    sides.push_back(fold_piece(Side::YMax, -INFINITY, s0));
    sides.push_back(fold_piece(Side::YMax, s1, INFINITY));
    // cuff a doubles onto b for z < 1/2 and onto c above
    sides.push_back(glue(Side::YMax,
                         {branch(Side::XMin, -1.0, s1, 2.0, 0.0, 0.0, 0.5),
                          branch(Side::XMax, 1.0, -s0, 2.0, -1.0, 0.5, 1.0)},
                         "a", s0, s1));
    sides.push_back(glue(Side::XMin, {branch(Side::YMax, -1.0, s1, 0.5, 0.0)}, "b"));
    sides.push_back(glue(Side::XMax, {branch(Side::YMax, 1.0, s0, 0.5, 0.5)}, "c"));
    FoliatedChart c(g, flat_metric(g), std::move(sides), 2, 1.0);

    std::vector<double> logf(c.node_count());
    const double ln2 = std::log(2.0);
    for (int j = 0; j < c.ny(); ++j)
        for (int i = 0; i < c.nx(); ++i) {
            const double rho = pants_harmonic_measure(c.x_at(i), c.y_at(j));
            logf[c.leaf_index(i, j)] = ln2 * smoothstep5((rho - kCollar) / (1.0 - 2.0 * kCollar));
        }
    TransverseMeasureField tau(c, std::move(logf), c.leaf_index(0, 0));

    ExpectedProperties e;
    e.needs_diffusion = true;
    e.diffusion = {1.0, 2e-3, 3000, 3.0, 2.0};
    e.transversality = Verdict::Pass;
    e.lp = LPOutcome::Kind::FeasibleBeta;
    // First-exit probabilities from the saddle (0.75, 0), frozen from a 10^5-path run at dt = 2.5e-5.
    e.reference = {{"p_a", 0.28836}, {"p_b", 0.35707}, {"p_c", 0.35457}, {"mean_exit_time", 0.42640}};
    InstanceDescriptor d{"example3-pants",
                         "pants mapping torus: cuff a glued to b and c by z -> 2z, tau = 1 on b, c and 2 on a",
                         std::move(c),
                         std::move(tau),
                         e,
                         m,
                         kCollar,
                         pants_complex(std::min(m, 4))};
    return d;
}

}  // namespace

double pants_harmonic_measure(double x, double y) {
    const auto& u = harmonic_table();
    const int M = kRhoCells, nx = static_cast<int>(kPantsLength * M) + 1;
    const double gx = std::clamp(x * M, 0.0, double(nx - 1)), gy = std::clamp(y * M, 0.0, double(M));
    const int i = std::min(static_cast<int>(gx), nx - 2), j = std::min(static_cast<int>(gy), M - 1);
    const double s = gx - i, t = gy - j;
    auto at = [&](int a, int b) { return u[static_cast<std::size_t>(b) * nx + a]; };
    double v = 0.0;
    const double w[4] = {(1 - s) * (1 - t), s * (1 - t), (1 - s) * t, s * t};
    const double n[4] = {at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)};
    for (int k = 0; k < 4; ++k)
        if (w[k] != 0.0) v += w[k] * n[k];
    return v;
}

InstanceDescriptor make_instance(const std::string& name, int resolution) {
    if (resolution < 0) throw InstanceError("resolution must be positive");
    if (name == "product-torus") return product_torus(resolution ? resolution : 16);
    if (name == "example1-quotient") return example1(resolution ? resolution : 16);
    if (name == "example2-halfplane") return example2(resolution ? resolution : 8);
    if (name == "example3-pants") return example3(resolution ? resolution : 8);
    std::string known;
    for (const auto& n : instance_names()) known += (known.empty() ? "" : ", ") + n;
    throw InstanceError("unknown instance '" + name + "' (known: " + known + ")");
}

LeafComplex pants_complex(int m) {
    if (m < 4 || m % 4) throw InstanceError("pants complex needs m divisible by 4");
    const int nx = static_cast<int>(kPantsLength * m) + 1, ny = m + 1;
    const int s0 = static_cast<int>(kSlitStart * m), s1 = s0 + m;
    LeafComplex c;
    // vertex ids: sheet 1 shares the fold vertices of sheet 0
    auto on_fold = [&](int i, int j) { return j == 0 || (j == m && (i <= s0 || i >= s1)); };
    std::map<std::tuple<int, int, int>, std::size_t> vid;
    for (int s = 0; s < 2; ++s)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (s == 1 && on_fold(i, j)) {
                    vid[{i, j, 1}] = vid[{i, j, 0}];
                    continue;
                }
                vid[{i, j, s}] = c.vertices.size();
                c.vertices.push_back({double(i) / m, double(j) / m});
            }
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> eid;
    auto cuff = [&](int i0, int j0, int i1, int j1) {
        if (i0 == i1 && (i0 == 0 || i0 == nx - 1)) return 'b';  // b or c
        if (j0 == j1 && j0 == m && std::min(i0, i1) >= s0 && std::max(i0, i1) <= s1) return 'a';
        return '\0';
    };
    // edge between grid points, returned with the incidence of a face traversing p -> q
    auto edge = [&](int s, int i0, int j0, int i1, int j1, char& which) -> std::pair<std::size_t, int> {
        const std::size_t p = vid[{i0, j0, s}], q = vid[{i1, j1, s}];
        const auto key = std::minmax(p, q);
        which = cuff(i0, j0, i1, j1);
        auto it = eid.find(key);
        if (it == eid.end()) {
            it = eid.emplace(key, c.add_edge(0)).first;
            c.edge_vertices.push_back(key);
        }
        return {it->second, p == key.first ? 1 : -1};
    };
    const mpq_class area(1, m * m);
    for (int s = 0; s < 2; ++s)
        for (int j = 0; j < m; ++j)
            for (int i = 0; i + 1 < nx; ++i) {
                std::vector<std::array<int, 2>> loop{{i, j}, {i + 1, j}, {i + 1, j + 1}, {i, j + 1}};
                if (s == 1) std::reverse(loop.begin(), loop.end());  // second sheet carries the opposite orientation
                std::vector<std::pair<std::size_t, int>> bd;
                for (int k = 0; k < 4; ++k) {
                    const auto& a = loop[k];
                    const auto& b = loop[(k + 1) % 4];
                    char which = '\0';
                    const auto inc = edge(s, a[0], a[1], b[0], b[1], which);
                    bd.push_back(inc);
                    // the pants lies in {f > 1} next to b and c and in {f < 2} next to a
                    if (which) c.mark[inc.first] = which == 'a' ? -inc.second : inc.second;
                }
                c.add_face(area, std::move(bd));
            }
    c.levels = {0.0, std::log(2.0)};
    c.validate();
    return c;
}

}  // namespace reebfol
