#pragma once
// Second-order jets in two variables: exact value, gradient and Hessian of
// closed-form expressions. Test oracle only; shares no code with the library.

#include <cmath>

namespace oracle {

struct Jet {
    double v = 0, x = 0, y = 0, xx = 0, xy = 0, yy = 0;

    static Jet var_x(double a) { return {a, 1, 0, 0, 0, 0}; }
    static Jet var_y(double a) { return {a, 0, 1, 0, 0, 0}; }
    static Jet constant(double a) { return {a, 0, 0, 0, 0, 0}; }
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.x + b.x, a.y + b.y, a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.x - b.x, a.y - b.y, a.xx - b.xx, a.xy - b.xy, a.yy - b.yy}; }
inline Jet operator*(Jet a, Jet b) {
    return {a.v * b.v,
            a.x * b.v + a.v * b.x,
            a.y * b.v + a.v * b.y,
            a.xx * b.v + 2 * a.x * b.x + a.v * b.xx,
            a.xy * b.v + a.x * b.y + a.y * b.x + a.v * b.xy,
            a.yy * b.v + 2 * a.y * b.y + a.v * b.yy};
}
inline Jet operator*(double s, Jet a) { return {s * a.v, s * a.x, s * a.y, s * a.xx, s * a.xy, s * a.yy}; }
inline Jet operator+(double s, Jet a) { return Jet::constant(s) + a; }

// Chain rule for a scalar function with value f0, derivative f1, second derivative f2.
inline Jet apply(Jet a, double f0, double f1, double f2) {
    return {f0,
            f1 * a.x,
            f1 * a.y,
            f2 * a.x * a.x + f1 * a.xx,
            f2 * a.x * a.y + f1 * a.xy,
            f2 * a.y * a.y + f1 * a.yy};
}
inline Jet recip(Jet a) { return apply(a, 1 / a.v, -1 / (a.v * a.v), 2 / (a.v * a.v * a.v)); }
inline Jet operator/(Jet a, Jet b) { return a * recip(b); }
inline Jet exp(Jet a) { const double e = std::exp(a.v); return apply(a, e, e, e); }
inline Jet log(Jet a) { return apply(a, std::log(a.v), 1 / a.v, -1 / (a.v * a.v)); }
inline Jet sqrt(Jet a) { const double s = std::sqrt(a.v); return apply(a, s, 0.5 / s, -0.25 / (s * a.v)); }
inline Jet sin(Jet a) { return apply(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v)); }
inline Jet cos(Jet a) { return apply(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v)); }
inline Jet pow(Jet a, double p) {
    return apply(a, std::pow(a.v, p), p * std::pow(a.v, p - 1), p * (p - 1) * std::pow(a.v, p - 2));
}

struct MetricJet {
    Jet g11, g12, g22;
};

// Laplace-Beltrami of f at (x, y): g^ij d_i d_j f + (1/sqrt g) d_i(sqrt g g^ij) d_j f.
template <class MetricFn, class Fn>
double laplace_beltrami(MetricFn metric, Fn f, double x, double y) {
    const Jet X = Jet::var_x(x), Y = Jet::var_y(y);
    const MetricJet g = metric(X, Y);
    const Jet F = f(X, Y);
    const Jet det = g.g11 * g.g22 - g.g12 * g.g12;
    const Jet s = sqrt(det);
    const Jet i11 = g.g22 / det, i12 = Jet::constant(-1) * g.g12 / det, i22 = g.g11 / det;
    const Jet a = s * i11, b = s * i12, c = s * i22;
    const double second = i11.v * F.xx + 2 * i12.v * F.xy + i22.v * F.yy;
    const double first = ((a.x + b.y) * F.x + (b.x + c.y) * F.y) / s.v;
    return second + first;
}

}  // namespace oracle
