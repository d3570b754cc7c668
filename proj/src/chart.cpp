#include "reebfol/chart.hpp"

#include <algorithm>
#include <cmath>

namespace reebfol {

const char* to_string(Side s) {
    switch (s) {
        case Side::XMin: return "xmin";
        case Side::XMax: return "xmax";
        case Side::YMin: return "ymin";
        case Side::YMax: return "ymax";
    }
    return "?";
}

const char* to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::Reflect: return "reflect";
        case BoundaryKind::Fold: return "fold";
        case BoundaryKind::Absorb: return "absorb";
        case BoundaryKind::Glue: return "glue";
    }
    return "?";
}

Side side_from_string(const std::string& s) {
    if (s == "xmin") return Side::XMin;
    if (s == "xmax") return Side::XMax;
    if (s == "ymin") return Side::YMin;
    if (s == "ymax") return Side::YMax;
    throw GeometryError("unknown side '" + s + "'");
}

BoundaryKind boundary_kind_from_string(const std::string& s) {
    if (s == "reflect") return BoundaryKind::Reflect;
    if (s == "fold") return BoundaryKind::Fold;
    if (s == "absorb") return BoundaryKind::Absorb;
    if (s == "glue") return BoundaryKind::Glue;
    throw GeometryError("unknown boundary kind '" + s + "'");
}

Vec2 outward_normal(Side s) {
    switch (s) {
        case Side::XMin: return {-1.0, 0.0};
        case Side::XMax: return {1.0, 0.0};
        case Side::YMin: return {0.0, -1.0};
        case Side::YMax: return {0.0, 1.0};
    }
    return {};
}

Vec2 side_tangent(Side s) {
    return (s == Side::XMin || s == Side::XMax) ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
}

namespace {

Side opposite(Side s) {
    switch (s) {
        case Side::XMin: return Side::XMax;
        case Side::XMax: return Side::XMin;
        case Side::YMin: return Side::YMax;
        case Side::YMax: return Side::YMin;
    }
    return s;
}

bool is_x_side(Side s) { return s == Side::XMin || s == Side::XMax; }

}  // namespace

FoliatedChart::FoliatedChart(GridSpec grid, std::vector<Metric2> metric, std::vector<BoundarySegment> boundary,
                             int sheets, double z_period)
    : grid_(grid), metric_(std::move(metric)), boundary_(std::move(boundary)), sheets_(sheets), z_period_(z_period) {
    validate();
    detect_periodicity();
    check_identifications();
    flat_ = std::all_of(metric_.begin(), metric_.end(), [](const Metric2& g) { return g.is_identity(); });
}

void FoliatedChart::validate() const {
    if (grid_.nx < 2 || grid_.ny < 2 || grid_.nz < 1) throw GeometryError("grid needs nx, ny >= 2 and nz >= 1");
    if (!(grid_.hx > 0.0) || !(grid_.hy > 0.0) || !(grid_.hz > 0.0)) throw GeometryError("grid spacings must be positive");
    if (sheets_ != 1 && sheets_ != 2) throw GeometryError("sheets must be 1 or 2");
    if (z_period_ < 0.0) throw GeometryError("z_period must be >= 0");
    if (metric_.size() != node_count())
        throw GeometryError("metric has " + std::to_string(metric_.size()) + " entries, expected " +
                            std::to_string(node_count()));
    for (std::size_t n = 0; n < metric_.size(); ++n) {
        const Metric2& g = metric_[n];
        if (!std::isfinite(g.g11) || !std::isfinite(g.g12) || !std::isfinite(g.g22) || !g.is_spd())
            throw GeometryError("metric not symmetric positive-definite at node " + std::to_string(n));
    }
    for (const auto& seg : boundary_) {
        if (!(seg.lo <= seg.hi)) throw GeometryError("boundary segment with empty interval on " + std::string(to_string(seg.side)));
        if (seg.kind == BoundaryKind::Fold && sheets_ != 2) throw GeometryError("fold boundary needs a two-sheet chart");
        if (seg.kind == BoundaryKind::Glue) {
            if (seg.branches.empty()) throw GeometryError("glue segment without branches");
            for (const auto& b : seg.branches) {
                if (std::fabs(b.u_scale) != 1.0) throw GeometryError("glue u_scale must be +1 or -1");
                if (!(b.z_scale > 0.0) || !std::isfinite(b.z_scale)) throw GeometryError("glue z_scale must be positive");
                if (!(b.z_lo < b.z_hi)) throw GeometryError("glue branch with empty z window");
                if (b.swap_sheet && sheets_ != 2) throw GeometryError("sheet swap needs a two-sheet chart");
            }
        } else if (!seg.branches.empty()) {
            throw GeometryError("only glue segments carry branches");
        }
    }
}

void FoliatedChart::detect_periodicity() {
    auto find_periodic = [&](Side hi_side, double u_min, double u_max_np) -> const BoundarySegment* {
        for (const auto& seg : boundary_) {
            if (seg.side != hi_side || seg.kind != BoundaryKind::Glue || seg.branches.size() != 1) continue;
            const GlueBranch& b = seg.branches[0];
            if (b.target != opposite(hi_side) || b.u_scale != 1.0 || b.u_shift != 0.0 || b.swap_sheet) continue;
            if (std::isfinite(b.z_lo) || std::isfinite(b.z_hi)) continue;
            if (seg.lo <= u_min + 1e-12 && seg.hi >= u_max_np - 1e-12) return &seg;
        }
        return nullptr;
    };
    const double ymax_np = grid_.y0 + (grid_.ny - 1) * grid_.hy;
    const double xmax_np = grid_.x0 + (grid_.nx - 1) * grid_.hx;
    const BoundarySegment* px = find_periodic(Side::XMax, grid_.y0, ymax_np);
    const BoundarySegment* py = find_periodic(Side::YMax, grid_.x0, xmax_np);
    periodic_x_ = px != nullptr;
    periodic_y_ = py != nullptr;
    std::vector<BoundarySegment> added;
    auto add_inverse = [&](const BoundarySegment* seg, Side lo_side, double& log_wrap) {
        const GlueBranch& b = seg->branches[0];
        log_wrap = std::log(b.z_scale);
        const bool declared = std::any_of(boundary_.begin(), boundary_.end(), [&](const BoundarySegment& s) {
            return s.side == lo_side && s.kind == BoundaryKind::Glue;
        });
        if (declared) return;
        BoundarySegment inv;
        inv.side = lo_side;
        inv.lo = seg->lo;
        inv.hi = seg->hi;
        inv.kind = BoundaryKind::Glue;
        inv.label = seg->label;
        GlueBranch ib;
        ib.target = seg->side;
        ib.z_scale = 1.0 / b.z_scale;
        ib.z_shift = -b.z_shift / b.z_scale;
        inv.branches.push_back(ib);
        added.push_back(inv);
    };
    if (px) add_inverse(px, Side::XMin, log_wrap_x_);
    if (py) add_inverse(py, Side::YMin, log_wrap_y_);
    for (auto& s : added) boundary_.push_back(std::move(s));
}

// Every glue branch must be undone by a branch of the segment it lands on.
void FoliatedChart::check_identifications() const {
    for (const auto& seg : boundary_) {
        if (seg.kind != BoundaryKind::Glue) continue;
        const double lo = std::isfinite(seg.lo) ? seg.lo : (is_x_side(seg.side) ? y_min() : x_min());
        const double hi = std::isfinite(seg.hi) ? seg.hi : (is_x_side(seg.side) ? y_max() : x_max());
        for (const auto& b : seg.branches) {
            const double zlo = std::isfinite(b.z_lo) ? b.z_lo : (std::isfinite(b.z_hi) ? b.z_hi - 1.0 : 0.0);
            const double zhi = std::isfinite(b.z_hi) ? b.z_hi : zlo + 1.0;
            for (double fu : {0.25, 0.5, 0.75}) {
                const double u = lo + fu * (hi - lo);
                const double z = zlo + 0.5 * (zhi - zlo);
                const double u2 = b.u_scale * u + b.u_shift;
                const double z2 = b.z_scale * z + b.z_shift;
                const BoundarySegment* back = segment_at(b.target, u2);
                if (!back || back->kind != BoundaryKind::Glue)
                    throw GeometryError("identification from " + std::string(to_string(seg.side)) + " lands on " +
                                        to_string(b.target) + " where no glue is declared");
                bool ok = false;
                for (const auto& r : back->branches) {
                    if (z2 < r.z_lo || z2 >= r.z_hi || r.target != seg.side) continue;
                    const double u3 = r.u_scale * u2 + r.u_shift;
                    const double z3 = r.z_scale * z2 + r.z_shift;
                    if (std::fabs(u3 - u) < 1e-9 && std::fabs(z3 - z) < 1e-9 * (1.0 + std::fabs(z)) &&
                        r.swap_sheet == b.swap_sheet && std::fabs(r.z_scale * b.z_scale - 1.0) < 1e-12) {
                        ok = true;
                        break;
                    }
                }
                if (!ok)
                    throw GeometryError("identification " + seg.label + " on " + to_string(seg.side) +
                                        " is not inverted by the glue on " + to_string(b.target));
            }
        }
    }
}

double FoliatedChart::side_coordinate(Side s) const {
    switch (s) {
        case Side::XMin: return x_min();
        case Side::XMax: return x_max();
        case Side::YMin: return y_min();
        case Side::YMax: return y_max();
    }
    return 0.0;
}

const BoundarySegment* FoliatedChart::segment_at(Side s, double u) const {
    const double tol = 1e-12;
    for (const auto& seg : boundary_)
        if (seg.side == s && u >= seg.lo - tol && u <= seg.hi + tol) return &seg;
    return nullptr;
}

Metric2 FoliatedChart::metric_at(double x, double y, int slice) const {
    if (flat_) return {};
    auto locate = [](double c, double c0, double h, int n, bool periodic, int& i0, int& i1, double& t) {
        double s = (c - c0) / h;
        if (periodic) {
            s = std::fmod(s, static_cast<double>(n));
            if (s < 0) s += n;
            i0 = std::min(static_cast<int>(s), n - 1);
            i1 = (i0 + 1) % n;
            t = s - i0;
        } else {
            s = std::clamp(s, 0.0, static_cast<double>(n - 1));
            i0 = std::min(static_cast<int>(s), n - 2);
            i1 = i0 + 1;
            t = s - i0;
        }
    };
    int i0, i1, j0, j1;
    double tx, ty;
    locate(x, grid_.x0, grid_.hx, grid_.nx, periodic_x_, i0, i1, tx);
    locate(y, grid_.y0, grid_.hy, grid_.ny, periodic_y_, j0, j1, ty);
    const Metric2& a = metric_[node_index(i0, j0, slice)];
    const Metric2& b = metric_[node_index(i1, j0, slice)];
    const Metric2& c = metric_[node_index(i0, j1, slice)];
    const Metric2& d = metric_[node_index(i1, j1, slice)];
    auto mix = [&](double pa, double pb, double pc, double pd) {
        return lerp(lerp(pa, pb, tx), lerp(pc, pd, tx), ty);
    };
    return {mix(a.g11, b.g11, c.g11, d.g11), mix(a.g12, b.g12, c.g12, d.g12), mix(a.g22, b.g22, c.g22, d.g22)};
}

bool FoliatedChart::is_interior(int i, int j) const {
    auto wall_ok = [&](Side s, double u) {
        const BoundarySegment* seg = segment_at(s, u);
        return seg && (seg->kind == BoundaryKind::Reflect || seg->kind == BoundaryKind::Fold);
    };
    if (!periodic_x_) {
        if (i == 0 && !wall_ok(Side::XMin, y_at(j))) return false;
        if (i == grid_.nx - 1 && !wall_ok(Side::XMax, y_at(j))) return false;
    }
    if (!periodic_y_) {
        if (j == 0 && !wall_ok(Side::YMin, x_at(i))) return false;
        if (j == grid_.ny - 1 && !wall_ok(Side::YMax, x_at(i))) return false;
    }
    return true;
}

bool FoliatedChart::is_leaf_interior(int i, int j) const {
    auto inner = [&](Side s, double u) {
        const BoundarySegment* seg = segment_at(s, u);
        return seg && (seg->kind == BoundaryKind::Fold || seg->kind == BoundaryKind::Glue);
    };
    if (!periodic_x_) {
        if (i == 0 && !inner(Side::XMin, y_at(j))) return false;
        if (i == grid_.nx - 1 && !inner(Side::XMax, y_at(j))) return false;
    }
    if (!periodic_y_) {
        if (j == 0 && !inner(Side::YMin, x_at(i))) return false;
        if (j == grid_.ny - 1 && !inner(Side::YMax, x_at(i))) return false;
    }
    return true;
}

bool FoliatedChart::contains(Vec2 p, double tol) const {
    return p.x >= x_min() - tol && p.x <= x_max() + tol && p.y >= y_min() - tol && p.y <= y_max() + tol;
}

int FoliatedChart::slice_of(double z) const {
    double s = (z - grid_.z0) / grid_.hz;
    if (z_period_ > 0.0) {
        const double n = z_period_ / grid_.hz;
        s = std::fmod(s, n);
        if (s < 0) s += n;
    }
    const int k = static_cast<int>(std::lround(s));
    if (z_period_ > 0.0) return ((k % grid_.nz) + grid_.nz) % grid_.nz;
    return std::clamp(k, 0, grid_.nz - 1);
}

std::vector<Metric2> sample_metric(const GridSpec& grid, const std::function<Metric2(double, double, double)>& g) {
    std::vector<Metric2> out;
    out.reserve(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz);
    for (int k = 0; k < grid.nz; ++k)
        for (int j = 0; j < grid.ny; ++j)
            for (int i = 0; i < grid.nx; ++i)
                out.push_back(g(grid.x0 + i * grid.hx, grid.y0 + j * grid.hy, grid.z0 + k * grid.hz));
    return out;
}

std::vector<Metric2> flat_metric(const GridSpec& grid) {
    return std::vector<Metric2>(static_cast<std::size_t>(grid.nx) * grid.ny * grid.nz);
}

BoundarySegment wall(Side s, BoundaryKind kind) {
    BoundarySegment seg;
    seg.side = s;
    seg.kind = kind;
    return seg;
}

BoundarySegment periodic_seam(Side hi_side, double z_scale) {
    if (hi_side != Side::XMax && hi_side != Side::YMax) throw GeometryError("periodic seam is declared on xmax or ymax");
    BoundarySegment seg;
    seg.side = hi_side;
    seg.kind = BoundaryKind::Glue;
    GlueBranch b;
    b.target = opposite(hi_side);
    b.z_scale = z_scale;
    seg.branches.push_back(b);
    seg.label = hi_side == Side::XMax ? "seam-x" : "seam-y";
    return seg;
}

}  // namespace reebfol
