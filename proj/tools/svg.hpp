#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "reebfol/chart.hpp"

namespace svg {

inline std::string fmt(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%.4g", v);
    return b;
}

// Blue (negative) to white to red (positive), symmetric about 0.
inline std::string diverging(double v, double scale) {
    if (!std::isfinite(v)) return "#bbbbbb";
    const double t = scale > 0 ? std::clamp(v / scale, -1.0, 1.0) : 0.0;
    const int fade = static_cast<int>(std::lround(255 * (1 - std::fabs(t))));
    char b[8];
    if (t >= 0)
        std::snprintf(b, sizeof b, "#ff%02x%02x", fade, fade);
    else
        std::snprintf(b, sizeof b, "#%02x%02xff", fade, fade);
    return b;
}

class Canvas {
public:
    Canvas(const reebfol::FoliatedChart& c, double width = 640.0)
        : x0_(c.x_min()), y0_(c.y_min()), sx_(width / (c.x_max() - c.x_min())) {
        w_ = width;
        h_ = sx_ * (c.y_max() - c.y_min());
    }

    double X(double x) const { return pad + (x - x0_) * sx_; }
    double Y(double y) const { return pad + h_ - (y - y0_) * sx_; }
    double scale() const { return sx_; }

    void add(const std::string& s) { body_ += s; }

    std::string finish(const std::string& title) const {
        std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(w_ + 2 * pad) + "\" height=\"" +
                        fmt(h_ + 2 * pad + 20) + "\">\n";
        s += "<text x=\"" + fmt(pad) + "\" y=\"" + fmt(h_ + 2 * pad + 12) +
             "\" font-family=\"sans-serif\" font-size=\"12\">" + title + "</text>\n";
        s += body_;
        s += "<rect x=\"" + fmt(pad) + "\" y=\"" + fmt(pad) + "\" width=\"" + fmt(w_) + "\" height=\"" + fmt(h_) +
             "\" fill=\"none\" stroke=\"black\"/>\n</svg>\n";
        return s;
    }

    static constexpr double pad = 10.0;

private:
    double x0_, y0_, sx_, w_, h_;
    std::string body_;
};

/// One cell per node of the slice, coloured by value.
inline std::string heat_map(const reebfol::FoliatedChart& c, const std::vector<double>& v, int slice,
                            const std::string& title) {
    Canvas cv(c);
    double scale = 0;
    const std::size_t off = static_cast<std::size_t>(slice) * c.leaf_nodes();
    for (std::size_t n = 0; n < c.leaf_nodes(); ++n)
        if (std::isfinite(v[off + n])) scale = std::max(scale, std::fabs(v[off + n]));
    const double hx = c.grid().hx * cv.scale(), hy = c.grid().hy * cv.scale();
    for (int j = 0; j < c.ny(); ++j)
        for (int i = 0; i < c.nx(); ++i) {
            const double x = cv.X(c.x_at(i)) - hx / 2, y = cv.Y(c.y_at(j)) - hy / 2;
            cv.add("<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(hx) + "\" height=\"" + fmt(hy) +
                   "\" fill=\"" + diverging(v[off + c.leaf_index(i, j)], scale) + "\"/>\n");
        }
    return cv.finish(title + " (|max| " + fmt(scale) + ")");
}

/// Short dotted segments along the line field (dx, dy) at every node of the slice.
inline std::string line_field(const reebfol::FoliatedChart& c, const std::vector<double>& dx,
                              const std::vector<double>& dy, int slice, const std::string& title) {
    Canvas cv(c);
    const std::size_t off = static_cast<std::size_t>(slice) * c.leaf_nodes();
    const double len = 0.4 * std::min(c.grid().hx, c.grid().hy) * cv.scale();
    for (int j = 0; j < c.ny(); ++j)
        for (int i = 0; i < c.nx(); ++i) {
            const std::size_t n = off + c.leaf_index(i, j);
            const double nrm = std::hypot(dx[n], dy[n]);
            const double x = cv.X(c.x_at(i)), y = cv.Y(c.y_at(j));
            if (!(nrm > 0)) {
                cv.add("<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"1.5\" fill=\"black\"/>\n");
                continue;
            }
            const double ux = len * dx[n] / nrm, uy = -len * dy[n] / nrm;
            cv.add("<line x1=\"" + fmt(x - ux) + "\" y1=\"" + fmt(y - uy) + "\" x2=\"" + fmt(x + ux) + "\" y2=\"" +
                   fmt(y + uy) + "\" stroke=\"red\" stroke-width=\"1.2\" stroke-dasharray=\"2,2\"/>\n");
        }
    return cv.finish(title);
}

}  // namespace svg
