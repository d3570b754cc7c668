#include "reebfol/walker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace reebfol {

namespace {

constexpr int kMaxTransits = 64;

Vec2 point_on_side(const FoliatedChart& c, Side s, double u) {
    switch (s) {
        case Side::XMin: return {c.x_min(), std::clamp(u, c.y_min(), c.y_max())};
        case Side::XMax: return {c.x_max(), std::clamp(u, c.y_min(), c.y_max())};
        case Side::YMin: return {std::clamp(u, c.x_min(), c.x_max()), c.y_min()};
        case Side::YMax: return {std::clamp(u, c.x_min(), c.x_max()), c.y_max()};
    }
    return {};
}

// Chart-linear map sending the outward normal of `from` to the inward normal of `to`
// and the tangent of `from` to u_scale times the tangent of `to`.
Mat2 glue_rotation(Side from, Side to, double u_scale) {
    const Vec2 n0 = outward_normal(from), t0 = side_tangent(from);
    const Vec2 n1 = outward_normal(to) * -1.0, t1 = side_tangent(to) * u_scale;
    // M = [n1 t1] [n0 t0]^T, the second factor orthogonal
    const Mat2 a{n1.x, t1.x, n1.y, t1.y};
    const Mat2 b{n0.x, n0.y, t0.x, t0.y};
    return a * b;
}

Mat2 reflection(Side s) {
    return (s == Side::XMin || s == Side::XMax) ? Mat2{-1, 0, 0, 1} : Mat2{1, 0, 0, -1};
}

double wrap_z(const FoliatedChart& c, double z) {
    const double period = c.z_period();
    if (period <= 0.0) return z;
    const double z0 = c.grid().z0;
    double r = std::fmod(z - z0, period);
    if (r < 0) r += period;
    if (r >= period) r = 0.0;
    return z0 + r;
}

}  // namespace

void advance(const FoliatedChart& c, WalkerState& w, Vec2 step) {
    if (w.truncated) return;
    w.cover += step;
    Vec2 d = w.frame * step;
    for (int transit = 0; transit < kMaxTransits; ++transit) {
        const Vec2 q = w.p + d;
        // earliest side crossed by the segment p -> q
        double t_hit = 2.0;
        Side hit = Side::XMin;
        auto consider = [&](double coord_q, double coord_p, double bound, bool above, Side s) {
            if (above ? coord_q > bound : coord_q < bound) {
                const double denom = coord_q - coord_p;
                const double t = denom != 0.0 ? (bound - coord_p) / denom : 0.0;
                if (t < t_hit) {
                    t_hit = t;
                    hit = s;
                }
            }
        };
        consider(q.x, w.p.x, c.x_max(), true, Side::XMax);
        consider(q.x, w.p.x, c.x_min(), false, Side::XMin);
        consider(q.y, w.p.y, c.y_max(), true, Side::YMax);
        consider(q.y, w.p.y, c.y_min(), false, Side::YMin);
        if (t_hit > 1.0) {
            w.p = q;
            return;
        }
        t_hit = std::clamp(t_hit, 0.0, 1.0);
        const bool x_side = hit == Side::XMin || hit == Side::XMax;
        Vec2 h = w.p + d * t_hit;
        if (x_side) h.x = c.side_coordinate(hit);
        else h.y = c.side_coordinate(hit);
        Vec2 rest = d * (1.0 - t_hit);
        const double u = x_side ? h.y : h.x;
        const BoundarySegment* seg = c.segment_at(hit, u);
        if (!seg)
            throw GeometryError("path leaves the chart through " + std::string(to_string(hit)) + " at u = " +
                                std::to_string(u) + " where no boundary behaviour is declared");
        switch (seg->kind) {
            case BoundaryKind::Absorb:
                w.p = h;
                w.truncated = true;
                return;
            case BoundaryKind::Reflect:
            case BoundaryKind::Fold: {
                const Mat2 r = reflection(hit);
                w.p = h;
                d = r * rest;
                w.frame = r * w.frame;
                if (seg->kind == BoundaryKind::Fold) w.sheet ^= 1;
                break;
            }
            case BoundaryKind::Glue: {
                const GlueBranch* br = nullptr;
                for (const auto& b : seg->branches)
                    if (w.z >= b.z_lo && w.z < b.z_hi) {
                        br = &b;
                        break;
                    }
                if (!br)
                    throw GeometryError("no identification branch of '" + seg->label + "' covers z = " +
                                        std::to_string(w.z));
                const Mat2 m = glue_rotation(hit, br->target, br->u_scale);
                w.p = point_on_side(c, br->target, br->u_scale * u + br->u_shift);
                w.z = wrap_z(c, br->z_scale * w.z + br->z_shift);
                w.log_scale += std::log(br->z_scale);
                if (br->swap_sheet) w.sheet ^= 1;
                d = m * rest;
                w.frame = m * w.frame;
                ++w.crossings;
                break;
            }
        }
    }
    throw GeometryError("path step crossed more than 64 boundaries; step too long for the chart");
}

void BrownianPath::push(double t, const WalkerState& w) {
    times.push_back(t);
    positions.push_back(w.p);
    z.push_back(w.z);
    sheets.push_back(w.sheet);
    log_scale.push_back(w.log_scale);
    const double dist = w.cover.norm();
    distance.push_back(dist);
    max_distance = std::max(max_distance, dist);
    truncated = truncated || w.truncated;
}

BrownianPath straight_path(const FoliatedChart& c, Vec2 start, double z, Vec2 direction, double length,
                           double max_step) {
    const double norm = direction.norm();
    if (!(norm > 0.0) || !(max_step > 0.0) || length < 0.0) throw GeometryError("straight_path: bad arguments");
    const int n = std::max(1, static_cast<int>(std::ceil(length / max_step)));
    const Vec2 step = direction * (length / (n * norm));
    WalkerState w;
    w.p = start;
    w.z = z;
    BrownianPath path;
    path.push(0.0, w);
    for (int k = 1; k <= n; ++k) {
        advance(c, w, step);
        path.push(k * length / n, w);
        if (w.truncated) break;
    }
    return path;
}

BrownianPath concatenate(const BrownianPath& a, const BrownianPath& b) {
    if (a.size() == 0) return b;
    if (b.size() == 0) return a;
    const Vec2 gap = a.positions.back() - b.positions.front();
    if (gap.norm() > 1e-9 || a.sheets.back() != b.sheets.front())
        throw GeometryError("concatenate: second path does not start where the first ends");
    BrownianPath out = a;
    const double t0 = a.times.back() - b.times.front();
    const double s0 = a.log_scale.back() - b.log_scale.front();
    for (std::size_t k = 1; k < b.size(); ++k) {
        out.times.push_back(b.times[k] + t0);
        out.positions.push_back(b.positions[k]);
        out.z.push_back(b.z[k]);
        out.sheets.push_back(b.sheets[k]);
        out.log_scale.push_back(b.log_scale[k] + s0);
        out.distance.push_back(b.distance[k]);
    }
    out.max_distance = std::max(a.max_distance, b.max_distance);
    out.truncated = a.truncated || b.truncated;
    return out;
}

BrownianPath reverse(const BrownianPath& a) {
    BrownianPath out;
    const std::size_t n = a.size();
    if (n == 0) return out;
    const double T = a.times.back();
    const double last = a.log_scale.back();
    for (std::size_t k = n; k-- > 0;) {
        out.times.push_back(T - a.times[k]);
        out.positions.push_back(a.positions[k]);
        out.z.push_back(a.z[k]);
        out.sheets.push_back(a.sheets[k]);
        out.log_scale.push_back(a.log_scale[k] - last);
        out.distance.push_back(std::fabs(a.distance[n - 1] - a.distance[k]));
    }
    out.max_distance = *std::max_element(out.distance.begin(), out.distance.end());
    out.truncated = a.truncated;
    out.seed = a.seed;
    return out;
}

}  // namespace reebfol
