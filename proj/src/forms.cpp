#include "reebfol/forms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace reebfol {

CellCounts cell_counts(const FoliatedChart& c) {
    const std::size_t nx = c.nx(), ny = c.ny();
    const std::size_t mx = c.periodic_x() ? nx : nx - 1;
    const std::size_t my = c.periodic_y() ? ny : ny - 1;
    return {nx * ny, mx * ny, nx * my, mx * my};
}

std::size_t expected_size(const FoliatedChart& c, int degree, FormLayout layout) {
    const CellCounts cc = cell_counts(c);
    if (layout == FormLayout::Nodal) return degree == 1 ? 2 * cc.nodes : cc.nodes;
    switch (degree) {
        case 0: return cc.nodes;
        case 1: return cc.edges();
        case 2: return cc.faces;
    }
    throw GeometryError("form degree must be 0, 1 or 2");
}

void check_form(const FoliatedChart& c, const DiscreteForm& f) {
    if (f.degree < 0 || f.degree > 2) throw GeometryError("form degree must be 0, 1 or 2");
    if (f.slice < 0 || f.slice >= c.nz()) throw GeometryError("form slice out of range");
    const std::size_t n = expected_size(c, f.degree, f.layout);
    if (f.values.size() != n)
        throw GeometryError("degree-" + std::to_string(f.degree) + " form has " + std::to_string(f.values.size()) +
                            " values, expected " + std::to_string(n));
}

DiscreteForm DiscreteForm::zero_form(const FoliatedChart& c, std::vector<double> v, int slice, bool log_density) {
    DiscreteForm f{0, FormLayout::Nodal, slice, log_density, std::move(v)};
    check_form(c, f);
    return f;
}

DiscreteForm DiscreteForm::nodal_one_form(const FoliatedChart& c, std::vector<double> ab, int slice) {
    DiscreteForm f{1, FormLayout::Nodal, slice, false, std::move(ab)};
    check_form(c, f);
    return f;
}

std::size_t x_edge_index(const FoliatedChart& c, int i, int j) {
    const int mx = c.periodic_x() ? c.nx() : c.nx() - 1;
    return static_cast<std::size_t>(j) * mx + i;
}

std::size_t y_edge_index(const FoliatedChart& c, int i, int j) {
    return cell_counts(c).x_edges + static_cast<std::size_t>(j) * c.nx() + i;
}

std::size_t face_index(const FoliatedChart& c, int i, int j) {
    const int mx = c.periodic_x() ? c.nx() : c.nx() - 1;
    return static_cast<std::size_t>(j) * mx + i;
}

namespace {

// Node value with wrap-around offsets for log densities; i, j may be one past either end
// on periodic axes.
struct NodeView {
    const FoliatedChart& c;
    const std::vector<double>& v;
    bool log_density;

    double operator()(int i, int j) const {
        double off = 0.0;
        const int nx = c.nx(), ny = c.ny();
        if (i < 0) { i += nx; if (log_density) off -= c.log_wrap_scale_x(); }
        if (i >= nx) { i -= nx; if (log_density) off += c.log_wrap_scale_x(); }
        if (j < 0) { j += ny; if (log_density) off -= c.log_wrap_scale_y(); }
        if (j >= ny) { j -= ny; if (log_density) off += c.log_wrap_scale_y(); }
        return v[c.leaf_index(i, j)] + off;
    }
};

// Derivative along one axis at index k of n samples given by get(k); periodic get accepts -1 and n.
template <class Get>
double axis_derivative(Get get, int k, int n, double h, bool periodic) {
    if (periodic || (k > 0 && k < n - 1)) return (get(k + 1) - get(k - 1)) / (2.0 * h);
    if (n == 2) return (get(1) - get(0)) / h;
    // differences first, so constants give exactly 0
    if (k == 0) return (4.0 * (get(1) - get(0)) - (get(2) - get(0))) / (2.0 * h);
    return (4.0 * (get(n - 1) - get(n - 2)) - (get(n - 1) - get(n - 3))) / (2.0 * h);
}

std::vector<double> nodal_gradient(const FoliatedChart& c, const std::vector<double>& v, bool log_density) {
    const NodeView at{c, v, log_density};
    const int nx = c.nx(), ny = c.ny();
    std::vector<double> out(2 * c.leaf_nodes());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t n = c.leaf_index(i, j);
            out[2 * n] = axis_derivative([&](int k) { return at(k, j); }, i, nx, c.grid().hx, c.periodic_x());
            out[2 * n + 1] = axis_derivative([&](int k) { return at(i, k); }, j, ny, c.grid().hy, c.periodic_y());
        }
    return out;
}

// Bilinear interpolation of a leaf node field at a point inside the rectangle.
double bilinear(const FoliatedChart& c, const std::vector<double>& v, Vec2 p) {
    auto axis = [](double t, double t0, double h, int n, int& i0, double& frac) {
        double s = std::clamp((t - t0) / h, 0.0, static_cast<double>(n - 1));
        i0 = std::min(static_cast<int>(s), n - 2);
        frac = s - i0;
    };
    int i0, j0;
    double tx, ty;
    axis(p.x, c.grid().x0, c.grid().hx, c.nx(), i0, tx);
    axis(p.y, c.grid().y0, c.grid().hy, c.ny(), j0, ty);
    const double a = v[c.leaf_index(i0, j0)], b = v[c.leaf_index(i0 + 1, j0)];
    const double d = v[c.leaf_index(i0, j0 + 1)], e = v[c.leaf_index(i0 + 1, j0 + 1)];
    return lerp(lerp(a, b, tx), lerp(d, e, tx), ty);
}

}  // namespace

DiscreteForm exterior_d(const DiscreteForm& f, const FoliatedChart& c) {
    check_form(c, f);
    if (f.degree == 2) throw GeometryError("exterior_d: degree-2 input has no coboundary on a leaf");
    const int nx = c.nx(), ny = c.ny();
    const bool px = c.periodic_x(), py = c.periodic_y();
    const int mx = px ? nx : nx - 1, my = py ? ny : ny - 1;
    if (f.degree == 0) {
        const NodeView at{c, f.values, f.log_density};
        DiscreteForm out{1, FormLayout::Cochain, f.slice, false, std::vector<double>(cell_counts(c).edges())};
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < mx; ++i) out.values[x_edge_index(c, i, j)] = at(i + 1, j) - at(i, j);
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < nx; ++i) out.values[y_edge_index(c, i, j)] = at(i, j + 1) - at(i, j);
        return out;
    }
    if (f.layout == FormLayout::Cochain) {
        DiscreteForm out{2, FormLayout::Cochain, f.slice, false, std::vector<double>(cell_counts(c).faces)};
        const auto& e = f.values;
        for (int j = 0; j < my; ++j)
            for (int i = 0; i < mx; ++i) {
                const int i1 = (i + 1) % nx, j1 = (j + 1) % ny;
                out.values[face_index(c, i, j)] = e[x_edge_index(c, i, j)] + e[y_edge_index(c, i1, j)] -
                                                  e[x_edge_index(c, i, j1)] - e[y_edge_index(c, i, j)];
            }
        return out;
    }
    // nodal 1-form a dx + b dy -> (db/dx - da/dy) dx^dy
    DiscreteForm out{2, FormLayout::Nodal, f.slice, false, std::vector<double>(c.leaf_nodes())};
    auto comp = [&](int i, int j, int which) {
        i = (i + nx) % nx;
        j = (j + ny) % ny;
        return f.values[2 * c.leaf_index(i, j) + which];
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double dbx = axis_derivative([&](int k) { return comp(k, j, 1); }, i, nx, c.grid().hx, px);
            const double day = axis_derivative([&](int k) { return comp(i, k, 0); }, j, ny, c.grid().hy, py);
            out.values[c.leaf_index(i, j)] = dbx - day;
        }
    return out;
}

DiscreteForm gradient(const DiscreteForm& f, const FoliatedChart& c) {
    check_form(c, f);
    if (f.degree != 0) throw GeometryError("gradient needs a 0-form");
    return {1, FormLayout::Nodal, f.slice, false, nodal_gradient(c, f.values, f.log_density)};
}

DiscreteForm laplace_beltrami(const DiscreteForm& f, const FoliatedChart& c, bool interior_only) {
    check_form(c, f);
    if (f.degree != 0) throw GeometryError("laplace_beltrami needs a 0-form");
    const int nx = c.nx(), ny = c.ny();
    const double hx = c.grid().hx, hy = c.grid().hy;
    const NodeView at{c, f.values, f.log_density};
    const bool flat = c.flat();

    // Ghost access for indices in [-1, n]: periodic wrap or mirror across a wall.
    // Returns false where no ghost exists.
    auto resolve = [&](int& i, int& j, bool& flip) {
        flip = false;
        auto axis = [&](int& k, int n, bool periodic, Side lo, Side hi, double u) {
            if (k >= 0 && k < n) return true;
            if (periodic) return true;  // NodeView wraps
            const BoundarySegment* seg = c.segment_at(k < 0 ? lo : hi, u);
            if (!seg || (seg->kind != BoundaryKind::Reflect && seg->kind != BoundaryKind::Fold)) return false;
            k = k < 0 ? 1 : n - 2;
            flip = !flip;
            return true;
        };
        const double uy = c.y_at(std::clamp(j, 0, ny - 1));
        const double ux = c.x_at(std::clamp(i, 0, nx - 1));
        return axis(i, nx, c.periodic_x(), Side::XMin, Side::XMax, uy) &&
               axis(j, ny, c.periodic_y(), Side::YMin, Side::YMax, ux);
    };
    struct Coef {
        double A, B, C, s;  // sqrt(g) g^11, sqrt(g) g^12, sqrt(g) g^22, sqrt(g)
    };
    auto coef = [&](int i, int j, bool flip) {
        const Metric2& g = c.metric(c.node_index((i + nx) % nx, (j + ny) % ny, f.slice));
        const double s = std::sqrt(g.det());
        const Metric2 inv = g.inverse();
        return Coef{s * inv.g11, (flip ? -1.0 : 1.0) * s * inv.g12, s * inv.g22, s};
    };

    // Ghost value one spacing beyond a glued side: carried through the identification and
    // interpolated inside the target side (flat charts only). A log density picks up the
    // log transverse scaling of the crossing.
    const double z_slice = c.z_at(f.slice);
    auto glue_ghost = [&](int i, int j, int di, int dj, double& value) {
        Side s;
        double u, h;
        if (di != 0) {
            s = di < 0 ? Side::XMin : Side::XMax;
            u = c.y_at(j);
            h = hx;
        } else {
            s = dj < 0 ? Side::YMin : Side::YMax;
            u = c.x_at(i);
            h = hy;
        }
        const BoundarySegment* seg = c.segment_at(s, u);
        if (!seg || seg->kind != BoundaryKind::Glue) return false;
        for (const auto& b : seg->branches) {
            if (z_slice < b.z_lo || z_slice >= b.z_hi) continue;
            const double u2 = b.u_scale * u + b.u_shift;
            const Vec2 n = outward_normal(b.target);
            Vec2 q = (b.target == Side::XMin || b.target == Side::XMax) ? Vec2{c.side_coordinate(b.target), u2}
                                                                          : Vec2{u2, c.side_coordinate(b.target)};
            q = q - n * h;
            if (!c.contains(q, 1e-9)) return false;
            value = bilinear(c, f.values, q) + (f.log_density ? std::log(b.z_scale) : 0.0);
            return true;
        }
        return false;
    };

    DiscreteForm out{0, FormLayout::Nodal, f.slice, false, std::vector<double>(c.leaf_nodes())};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double val[3][3];
            Coef cf[3][3];
            bool ok = true;
            for (int dj = -1; dj <= 1 && ok; ++dj)
                for (int di = -1; di <= 1 && ok; ++di) {
                    if (flat && di != 0 && dj != 0) continue;
                    int ii = i + di, jj = j + dj;
                    bool flip = false;
                    if (!resolve(ii, jj, flip)) {
                        double ghost = 0.0;
                        if (flat && glue_ghost(i, j, di, dj, ghost)) {
                            val[di + 1][dj + 1] = ghost;
                            continue;
                        }
                        ok = false;
                        break;
                    }
                    val[di + 1][dj + 1] = at(ii, jj);
                    if (!flat) cf[di + 1][dj + 1] = coef(ii, jj, flip);
                }
            if (!ok) {
                if (!interior_only)
                    throw GeometryError("laplace_beltrami: node (" + std::to_string(i) + ", " + std::to_string(j) +
                                        ") has no stencil across an undeclared, absorbing or glued side");
                out.values[c.leaf_index(i, j)] = nan;
                continue;
            }
            const double f0 = val[1][1];
            if (flat) {
                out.values[c.leaf_index(i, j)] = (val[2][1] - 2.0 * f0 + val[0][1]) / (hx * hx) +
                                                 (val[1][2] - 2.0 * f0 + val[1][0]) / (hy * hy);
                continue;
            }
            const double Ae = 0.5 * (cf[1][1].A + cf[2][1].A), Aw = 0.5 * (cf[1][1].A + cf[0][1].A);
            const double Cn = 0.5 * (cf[1][1].C + cf[1][2].C), Cs = 0.5 * (cf[1][1].C + cf[1][0].C);
            const double xx = (Ae * (val[2][1] - f0) - Aw * (f0 - val[0][1])) / (hx * hx);
            const double yy = (Cn * (val[1][2] - f0) - Cs * (f0 - val[1][0])) / (hy * hy);
            const double xy = (cf[2][1].B * (val[2][2] - val[2][0]) - cf[0][1].B * (val[0][2] - val[0][0])) /
                              (4.0 * hx * hy);
            const double yx = (cf[1][2].B * (val[2][2] - val[0][2]) - cf[1][0].B * (val[2][0] - val[0][0])) /
                              (4.0 * hx * hy);
            out.values[c.leaf_index(i, j)] = (xx + yy + xy + yx) / cf[1][1].s;
        }
    return out;
}

DiscreteForm to_nodal(const DiscreteForm& f, const FoliatedChart& c) {
    check_form(c, f);
    if (f.degree != 1) throw GeometryError("to_nodal expects a 1-form");
    if (f.layout == FormLayout::Nodal) return f;
    const int nx = c.nx(), ny = c.ny();
    const bool px = c.periodic_x(), py = c.periodic_y();
    const double hx = c.grid().hx, hy = c.grid().hy;
    DiscreteForm out{1, FormLayout::Nodal, f.slice, false, std::vector<double>(2 * c.leaf_nodes())};
    auto edge_avg = [](auto get, int k, int n, bool periodic, double h) {
        // edges e_0..e_{m-1} along an axis; node k sits between edges k-1 and k
        const int m = periodic ? n : n - 1;
        if (periodic) return 0.5 * (get((k - 1 + m) % m) + get(k % m)) / h;
        if (m == 1) return get(0) / h;
        if (k == 0) return (3.0 * get(0) - get(1)) / (2.0 * h);
        if (k == n - 1) return (3.0 * get(m - 1) - get(m - 2)) / (2.0 * h);
        return 0.5 * (get(k - 1) + get(k)) / h;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t n = c.leaf_index(i, j);
            out.values[2 * n] = edge_avg([&](int k) { return f.values[x_edge_index(c, k, j)]; }, i, nx, px, hx);
            out.values[2 * n + 1] = edge_avg([&](int k) { return f.values[y_edge_index(c, i, k)]; }, j, ny, py, hy);
        }
    return out;
}

DiscreteForm to_cochain(const DiscreteForm& f, const FoliatedChart& c) {
    check_form(c, f);
    if (f.degree != 1) throw GeometryError("to_cochain expects a 1-form");
    if (f.layout == FormLayout::Cochain) return f;
    const int nx = c.nx(), ny = c.ny();
    const int mx = c.periodic_x() ? nx : nx - 1, my = c.periodic_y() ? ny : ny - 1;
    DiscreteForm out{1, FormLayout::Cochain, f.slice, false, std::vector<double>(cell_counts(c).edges())};
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < mx; ++i)
            out.values[x_edge_index(c, i, j)] = 0.5 * c.grid().hx *
                                                (f.values[2 * c.leaf_index(i, j)] + f.values[2 * c.leaf_index((i + 1) % nx, j)]);
    for (int j = 0; j < my; ++j)
        for (int i = 0; i < nx; ++i)
            out.values[y_edge_index(c, i, j)] = 0.5 * c.grid().hy *
                                                (f.values[2 * c.leaf_index(i, j) + 1] + f.values[2 * c.leaf_index(i, (j + 1) % ny) + 1]);
    return out;
}

DiscreteForm hodge_star2(const DiscreteForm& f, const FoliatedChart& c) {
    check_form(c, f);
    if (f.degree != 1) throw GeometryError("hodge_star2 acts on 1-forms");
    if (f.layout == FormLayout::Cochain) return to_cochain(hodge_star2(to_nodal(f, c), c), c);
    DiscreteForm out{1, FormLayout::Nodal, f.slice, false, std::vector<double>(f.values.size())};
    for (std::size_t n = 0; n < c.leaf_nodes(); ++n) {
        const Metric2& g = c.metric(c.leaf_nodes() * f.slice + n);
        const double det = g.det();
        if (!(det > 0.0)) throw GeometryError("hodge_star2: degenerate metric at node " + std::to_string(n));
        const double s = std::sqrt(det);
        const Metric2 inv = g.inverse();
        const double a = f.values[2 * n], b = f.values[2 * n + 1];
        out.values[2 * n] = -s * (a * inv.g12 + b * inv.g22);
        out.values[2 * n + 1] = s * (a * inv.g11 + b * inv.g12);
    }
    return out;
}

}  // namespace reebfol
