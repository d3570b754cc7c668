#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <sstream>

#include "reebfol/obstruction.hpp"

namespace reebfol {

namespace {

struct Point {
    std::size_t id;
    Vec2 at;     // cell-local (unwrapped) position
    double value;
};

class Builder {
public:
    Builder(const FoliatedChart& c, const TransverseMeasureField& tau, int slice, int n_levels)
        : c_(c), tau_(tau), slice_(slice) {
        const bool px = c.periodic_x(), py = c.periodic_y();
        if ((px && c.nx() < 3) || (py && c.ny() < 3)) throw ComplexError("periodic axes need at least 3 nodes");
        glue_x_ = px && c.log_wrap_scale_x() == 0.0;
        glue_y_ = py && c.log_wrap_scale_y() == 0.0;
        cells_x_ = px ? c.nx() : c.nx() - 1;
        cells_y_ = py ? c.ny() : c.ny() - 1;
        choose_levels(n_levels);
    }

    LeafComplex build() {
        for (int j = 0; j < cells_y_; ++j)
            for (int i = 0; i < cells_x_; ++i) cell(i, j);
        out_.validate();
        return std::move(out_);
    }

private:
    double corner_value(int i, int j) const {
        const int nx = c_.nx(), ny = c_.ny();
        double v = tau_.log_f(c_.node_index(i % nx, j % ny, slice_));
        if (i >= nx) v += c_.log_wrap_scale_x();
        if (j >= ny) v += c_.log_wrap_scale_y();
        return v;
    }
    Vec2 corner_at(int i, int j) const { return {c_.x_at(0) + i * c_.grid().hx, c_.y_at(0) + j * c_.grid().hy}; }
    double center_value(int i, int j) const {
        return 0.25 * (corner_value(i, j) + corner_value(i + 1, j) + corner_value(i, j + 1) + corner_value(i + 1, j + 1));
    }

    void choose_levels(int n) {
        if (n <= 0) return;
        std::vector<double> vals;
        for (int j = 0; j <= cells_y_; ++j)
            for (int i = 0; i <= cells_x_; ++i) vals.push_back(corner_value(i, j));
        for (int j = 0; j < cells_y_; ++j)
            for (int i = 0; i < cells_x_; ++i) vals.push_back(center_value(i, j));
        const auto [lo_it, hi_it] = std::minmax_element(vals.begin(), vals.end());
        const double lo = *lo_it, hi = *hi_it, range = hi - lo;
        if (!(range > 1e-12 * std::max(1.0, std::fabs(hi)))) {
            std::ostringstream msg;
            msg << "degenerate level: f is constant (" << std::exp(lo) << ") on the slice";
            throw ComplexError(msg.str());
        }
        const double step = range / (n + 1);
        for (int k = 0; k < n; ++k) {
            const double base = lo + (k + 1) * step;
            bool placed = false;
            for (int shift = 0; shift < 7 && !placed; ++shift) {
                const double lev = base + shift * step / 7.0;
                const bool clear = std::none_of(vals.begin(), vals.end(),
                                                [&](double v) { return std::fabs(v - lev) <= 1e-9 * range; });
                if (clear) {
                    levels_.push_back(lev);
                    placed = true;
                }
            }
            if (!placed) {
                std::ostringstream msg;
                msg << "degenerate level " << std::exp(base) << ": grid values sit on every nearby level";
                throw ComplexError(msg.str());
            }
        }
        for (double l : levels_) out_.levels.push_back(std::exp(l));
    }

    std::size_t vertex_of(std::map<std::pair<std::size_t, std::size_t>, std::size_t>& table,
                          std::pair<std::size_t, std::size_t> key, Vec2 chart_at) {
        const auto [it, fresh] = table.emplace(key, out_.vertices.size());
        if (fresh) out_.vertices.push_back(chart_at);
        return it->second;
    }

    // chart-wrapped position of a cell-local point
    Vec2 wrap(Vec2 p) const {
        if (glue_x_ && p.x >= c_.x_max()) p.x -= c_.x_max() - c_.x_min();
        if (glue_y_ && p.y >= c_.y_max()) p.y -= c_.y_max() - c_.y_min();
        return p;
    }

    Point grid_point(int i, int j) {
        const int wi = glue_x_ ? i % c_.nx() : i, wj = glue_y_ ? j % c_.ny() : j;
        const std::size_t key = static_cast<std::size_t>(wj) * (cells_x_ + 1) + wi;
        const std::size_t id = vertex_of(grid_ids_, {key, 0}, wrap(corner_at(i, j)));
        return {id, corner_at(i, j), corner_value(i, j)};
    }

    // the crossing of level k on segment pq (shared by the cells on both sides)
    Point crossing(const Point& p, const Point& q, int k) {
        const double t = (levels_[k] - p.value) / (q.value - p.value);
        const Vec2 at{p.at.x + t * (q.at.x - p.at.x), p.at.y + t * (q.at.y - p.at.y)};
        const auto seg = std::minmax(p.id, q.id);
        const std::size_t id = vertex_of(cross_ids_[k], seg, wrap(at));
        return {id, at, levels_[k]};
    }

    int band(double v) const {
        return static_cast<int>(std::upper_bound(levels_.begin(), levels_.end(), v) - levels_.begin());
    }

    std::pair<std::size_t, int> edge(std::size_t u, std::size_t v, int mark) {
        const auto key = std::minmax(u, v);
        auto it = edges_.find(key);
        if (it == edges_.end()) {
            const std::size_t e = out_.add_edge(mark);
            out_.edge_vertices.emplace_back(u, v);
            it = edges_.emplace(key, e).first;
        }
        const std::size_t e = it->second;
        return {e, out_.edge_vertices[e].first == u ? 1 : -1};
    }

    void cell(int i, int j) {
        const Point a = grid_point(i, j), b = grid_point(i + 1, j), cc = grid_point(i + 1, j + 1), d = grid_point(i, j + 1);
        const Vec2 mid{0.5 * (a.at.x + cc.at.x), 0.5 * (a.at.y + cc.at.y)};
        const std::size_t mid_id = out_.vertices.size();
        out_.vertices.push_back(wrap(mid));
        const Point m{mid_id, mid, center_value(i, j)};
        const double sqrt_g = std::sqrt(c_.metric_at(wrap(mid).x, wrap(mid).y, slice_).det());
        triangle({a, b, m}, sqrt_g);
        triangle({b, cc, m}, sqrt_g);
        triangle({cc, d, m}, sqrt_g);
        triangle({d, a, m}, sqrt_g);
    }

    // ccw triangle cut into bands between consecutive levels
    void triangle(const std::array<Point, 3>& t, double sqrt_g) {
        struct Piece {
            Point from, to;
            int band;
        };
        std::vector<Piece> ring;
        for (int s = 0; s < 3; ++s) {
            const Point& p = t[s];
            const Point& q = t[(s + 1) % 3];
            const int bp = band(p.value), bq = band(q.value);
            Point cur = p;
            if (bq > bp) {
                for (int k = bp; k < bq; ++k) {
                    const Point x = crossing(p, q, k);
                    ring.push_back({cur, x, k});
                    cur = x;
                }
            } else {
                for (int k = bp - 1; k >= bq; --k) {
                    const Point x = crossing(p, q, k);
                    ring.push_back({cur, x, k + 1});
                    cur = x;
                }
            }
            ring.push_back({cur, q, bq});
        }
        const int lo = std::min({band(t[0].value), band(t[1].value), band(t[2].value)});
        const int hi = std::max({band(t[0].value), band(t[1].value), band(t[2].value)});
        const std::size_t R = ring.size();
        for (int k = lo; k <= hi; ++k) {
            // start just after a piece of another band (or anywhere when all pieces share k)
            std::size_t start = 0;
            for (std::size_t q = 0; q < R; ++q)
                if (ring[q].band != k && ring[(q + 1) % R].band == k) start = (q + 1) % R;
            std::vector<Point> poly;
            std::vector<std::pair<std::size_t, int>> bnd;
            for (std::size_t s = 0; s < R; ++s) {
                const Piece& pc = ring[(start + s) % R];
                if (pc.band != k) continue;
                if (!poly.empty() && poly.back().id != pc.from.id) chord(poly.back(), pc.from, k, bnd);
                if (poly.empty()) poly.push_back(pc.from);
                bnd.push_back(edge(pc.from.id, pc.to.id, 0));
                poly.push_back(pc.to);
            }
            if (poly.back().id != poly.front().id) chord(poly.back(), poly.front(), k, bnd);
            else poly.pop_back();
            double twice = 0.0;
            for (std::size_t q = 0; q < poly.size(); ++q) {
                const Vec2 u = poly[q].at, v = poly[(q + 1) % poly.size()].at;
                twice += u.x * v.y - v.x * u.y;
            }
            out_.add_face(mpq_class(0.5 * twice * sqrt_g), std::move(bnd));
        }
    }

    // level segment from u to v traversed ccw by a face of band k
    void chord(const Point& u, const Point& v, int k, std::vector<std::pair<std::size_t, int>>& bnd) {
        const auto key = std::minmax(u.id, v.id);
        auto it = edges_.find(key);
        if (it == edges_.end()) {
            // stored with the superlevel side on its left; the band lies above the chord
            // when the chord is its lower level
            const bool band_is_above = k > 0 && u.value == levels_[k - 1];
            const std::size_t e = out_.add_edge(1);
            if (band_is_above)
                out_.edge_vertices.emplace_back(u.id, v.id);
            else
                out_.edge_vertices.emplace_back(v.id, u.id);
            it = edges_.emplace(key, e).first;
        }
        const std::size_t e = it->second;
        bnd.push_back({e, out_.edge_vertices[e].first == u.id ? 1 : -1});
    }

    const FoliatedChart& c_;
    const TransverseMeasureField& tau_;
    int slice_;
    bool glue_x_ = false, glue_y_ = false;
    int cells_x_ = 0, cells_y_ = 0;
    std::vector<double> levels_;
    LeafComplex out_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> grid_ids_;
    std::map<int, std::map<std::pair<std::size_t, std::size_t>, std::size_t>> cross_ids_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edges_;
};

}  // namespace

LeafComplex extract_complex(const FoliatedChart& chart, const TransverseMeasureField& tau, int slice, int n_levels) {
    if (n_levels < 1) throw ComplexError("need at least one level");
    return Builder(chart, tau, slice, n_levels).build();
}

LeafComplex grid_complex(const FoliatedChart& chart, int slice) {
    const TransverseMeasureField one = TransverseMeasureField::constant(chart);
    return Builder(chart, one, slice, 0).build();
}

}  // namespace reebfol
