#include "reebfol/measures.hpp"

#include <algorithm>
#include <cmath>

namespace reebfol {

TransverseMeasureField::TransverseMeasureField(const FoliatedChart& chart, std::vector<double> log_f, std::size_t anchor,
                                               std::string regularity)
    : log_f_(std::move(log_f)), anchor_(anchor), regularity_(std::move(regularity)) {
    if (log_f_.size() != chart.node_count())
        throw MeasureError("measure has " + std::to_string(log_f_.size()) + " nodes, chart has " +
                           std::to_string(chart.node_count()));
    if (anchor_ >= chart.leaf_nodes()) throw MeasureError("anchor node outside the leaf grid");
    for (std::size_t n = 0; n < log_f_.size(); ++n)
        if (!std::isfinite(log_f_[n])) throw MeasureError("density not positive and finite at node " + std::to_string(n));
}

TransverseMeasureField TransverseMeasureField::from_expression(const FoliatedChart& chart, const Expression& f,
                                                               std::size_t anchor) {
    std::vector<double> v(chart.node_count());
    for (int k = 0; k < chart.nz(); ++k)
        for (int j = 0; j < chart.ny(); ++j)
            for (int i = 0; i < chart.nx(); ++i) {
                const double val = f(chart.x_at(i), chart.y_at(j), chart.z_at(k));
                if (!(val > 0.0) || !std::isfinite(val))
                    throw MeasureError("density '" + f.source() + "' is not positive at (" +
                                       std::to_string(chart.x_at(i)) + ", " + std::to_string(chart.y_at(j)) + ", " +
                                       std::to_string(chart.z_at(k)) + ")");
                v[chart.node_index(i, j, k)] = std::log(val);
            }
    return TransverseMeasureField(chart, std::move(v), anchor);
}

TransverseMeasureField TransverseMeasureField::constant(const FoliatedChart& chart, double value) {
    if (!(value > 0.0)) throw MeasureError("constant density must be positive");
    return TransverseMeasureField(chart, std::vector<double>(chart.node_count(), std::log(value)));
}

double TransverseMeasureField::f(std::size_t node) const { return std::exp(log_f_[node]); }

TransverseMeasureField TransverseMeasureField::normalized(const FoliatedChart& chart, double value) const {
    TransverseMeasureField out = *this;
    const double target = std::log(value);
    const std::size_t leaf = chart.leaf_nodes();
    for (int k = 0; k < chart.nz(); ++k) {
        const double shift = target - log_f_[k * leaf + anchor_];
        for (std::size_t n = 0; n < leaf; ++n) out.log_f_[k * leaf + n] += shift;
    }
    return out;  // channels hold derivatives, unchanged by a constant shift
}

TransverseMeasureField TransverseMeasureField::scaled(double factor) const {
    if (!(factor > 0.0)) throw MeasureError("scale factor must be positive");
    TransverseMeasureField out = *this;
    const double s = std::log(factor);
    for (double& v : out.log_f_) v += s;
    return out;
}

namespace {

struct Cell {
    int i0, i1, j0, j1;
    double tx, ty;
    double offset_i1, offset_j1;  // seam jumps for the upper corner indices
    double offset;                // whole periods wrapped to reach the cell
};

Cell locate(const FoliatedChart& c, Vec2 p, double wrap_x, double wrap_y) {
    Cell cell{};
    auto axis = [&cell](double v, double v0, double h, int n, bool periodic, double wrap, int& i0, int& i1, double& t,
                        double& off) {
        double s = (v - v0) / h;
        off = 0.0;
        if (periodic) {
            const double turns = std::floor(s / n);
            cell.offset += turns * wrap;
            s -= turns * n;
            if (s >= n) s = 0.0;
            i0 = std::min(static_cast<int>(s), n - 1);
            t = s - i0;
            i1 = i0 + 1;
            if (i1 == n) {
                i1 = 0;
                off = wrap;
            }
        } else {
            s = std::clamp(s, 0.0, static_cast<double>(n - 1));
            i0 = std::min(static_cast<int>(s), n - 2);
            i1 = i0 + 1;
            t = s - i0;
        }
    };
    axis(p.x, c.grid().x0, c.grid().hx, c.nx(), c.periodic_x(), wrap_x, cell.i0, cell.i1, cell.tx, cell.offset_i1);
    axis(p.y, c.grid().y0, c.grid().hy, c.ny(), c.periodic_y(), wrap_y, cell.j0, cell.j1, cell.ty, cell.offset_j1);
    return cell;
}

}  // namespace

double TransverseMeasureField::log_f_at(const FoliatedChart& c, Vec2 p, int slice) const {
    const Cell q = locate(c, p, c.log_wrap_scale_x(), c.log_wrap_scale_y());
    const std::size_t base = static_cast<std::size_t>(slice) * c.leaf_nodes();
    const double a = log_f_[base + c.leaf_index(q.i0, q.j0)];
    const double b = log_f_[base + c.leaf_index(q.i1, q.j0)] + q.offset_i1;
    const double d = log_f_[base + c.leaf_index(q.i0, q.j1)] + q.offset_j1;
    const double e = log_f_[base + c.leaf_index(q.i1, q.j1)] + q.offset_i1 + q.offset_j1;
    return lerp(lerp(a, b, q.tx), lerp(d, e, q.tx), q.ty) + q.offset;
}

double TransverseMeasureField::interpolate(const FoliatedChart& c, const std::vector<double>& field, Vec2 p, int slice) {
    const Cell q = locate(c, p, 0.0, 0.0);
    const std::size_t base = field.size() == c.leaf_nodes() ? 0 : static_cast<std::size_t>(slice) * c.leaf_nodes();
    // zero-weight corners are skipped so a NaN beside a node does not leak into it
    double sum = 0.0;
    auto add = [&](int i, int j, double w) {
        if (w > 0.0) sum += w * field[base + c.leaf_index(i, j)];
    };
    add(q.i0, q.j0, (1 - q.tx) * (1 - q.ty));
    add(q.i1, q.j0, q.tx * (1 - q.ty));
    add(q.i0, q.j1, (1 - q.tx) * q.ty);
    add(q.i1, q.j1, q.tx * q.ty);
    return sum;
}

DiscreteForm TransverseMeasureField::log_form(const FoliatedChart& c, int slice) const {
    const auto first = log_f_.begin() + static_cast<std::ptrdiff_t>(slice * c.leaf_nodes());
    return DiscreteForm::zero_form(c, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(c.leaf_nodes())),
                                   slice, true);
}

std::vector<double> TransverseMeasureField::laplacian_log(const FoliatedChart& c) const {
    std::vector<double> out;
    out.reserve(log_f_.size());
    for (int k = 0; k < c.nz(); ++k) {
        const auto lap = laplace_beltrami(log_form(c, k), c, true);
        out.insert(out.end(), lap.values.begin(), lap.values.end());
    }
    return out;
}

std::vector<double> TransverseMeasureField::gradient_log(const FoliatedChart& c) const {
    std::vector<double> out;
    out.reserve(2 * log_f_.size());
    for (int k = 0; k < c.nz(); ++k) {
        const auto g = gradient(log_form(c, k), c);
        out.insert(out.end(), g.values.begin(), g.values.end());
    }
    return out;
}

void TransverseMeasureField::set_channels(MeasureChannels ch) {
    const std::size_t n = log_f_.size();
    auto ok = [n](const std::vector<double>& v) { return v.empty() || v.size() == n; };
    if (!ok(ch.exponent_se) || !ok(ch.grad_x) || !ok(ch.grad_y) || !ok(ch.laplacian) || !ok(ch.laplacian_se))
        throw MeasureError("measure channel length does not match the node count");
    channels_ = std::move(ch);
}

double holonomy_log_derivative(const BrownianPath& path, const TransverseMeasureField& tau, const FoliatedChart& chart) {
    if (path.size() == 0) throw MeasureError("empty path");
    for (const Vec2& p : {path.positions.front(), path.positions.back()})
        if (!chart.contains(p, 1e-9)) throw GeometryError("path point outside the chart");
    const double start = tau.log_f_at(chart, path.positions.front(), chart.slice_of(path.z.front()));
    const double end = tau.log_f_at(chart, path.positions.back(), chart.slice_of(path.z.back()));
    return end - start + path.log_scale.back();
}

std::vector<double> IntervalMapSample::first_quotients() const {
    std::vector<double> q(x.size() - 1);
    for (std::size_t k = 0; k + 1 < x.size(); ++k) q[k] = (g[k + 1] - g[k]) / (x[k + 1] - x[k]);
    return q;
}

std::vector<double> IntervalMapSample::second_quotients() const {
    const auto q = first_quotients();
    std::vector<double> s(q.size() - 1);
    for (std::size_t k = 0; k + 1 < q.size(); ++k) s[k] = 2.0 * (q[k + 1] - q[k]) / (x[k + 2] - x[k]);
    return s;
}

void IntervalMapSample::validate() const {
    if (x.size() != g.size()) throw MeasureError("interval map: sample and image counts differ");
    if (x.size() < 3) throw MeasureError("interval map: need at least 3 samples");
    for (std::size_t k = 0; k + 1 < x.size(); ++k) {
        if (!(x[k + 1] > x[k])) throw MeasureError("interval map: sample points not strictly increasing");
        if (!(g[k + 1] > g[k])) throw MeasureError("interval map: images not strictly increasing");
    }
}

double distortion(const IntervalMapSample& m) {
    m.validate();
    const auto q = m.first_quotients();
    const auto [lo, hi] = std::minmax_element(q.begin(), q.end());
    return *hi / *lo;
}

DistortionBound distortion_bound_check(const IntervalMapSample& m) {
    const double dist = distortion(m);
    const auto q = m.first_quotients();
    const auto s = m.second_quotients();
    double smax = 0.0;
    for (double v : s) smax = std::max(smax, std::fabs(v));
    const double qmin = *std::min_element(q.begin(), q.end());
    const double bound = 1.0 + (m.x.back() - m.x.front()) * smax / qmin;
    return {dist, bound, dist <= bound * (1.0 + 1e-12)};
}

}  // namespace reebfol
