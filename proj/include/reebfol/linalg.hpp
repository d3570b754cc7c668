#pragma once

#include <cmath>

namespace reebfol {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2& operator+=(Vec2 o) {
        x += o.x;
        y += o.y;
        return *this;
    }
    constexpr double dot(Vec2 o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

// General 2x2 matrix, row-major.
struct Mat2 {
    double a = 1.0, b = 0.0;
    double c = 0.0, d = 1.0;

    static constexpr Mat2 identity() { return {}; }
    constexpr Vec2 operator*(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    constexpr Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    constexpr Mat2 transpose() const { return {a, c, b, d}; }
    constexpr double det() const { return a * d - b * c; }
};

// Symmetric 2x2 leafwise metric tensor g = [[g11, g12], [g12, g22]].
struct Metric2 {
    double g11 = 1.0;
    double g12 = 0.0;
    double g22 = 1.0;

    constexpr double det() const { return g11 * g22 - g12 * g12; }
    constexpr double trace() const { return g11 + g22; }
    constexpr bool is_spd() const { return det() > 0.0 && trace() > 0.0; }
    constexpr bool is_identity() const { return g11 == 1.0 && g12 == 0.0 && g22 == 1.0; }

    // Inverse metric g^{ij}.
    constexpr Metric2 inverse() const {
        const double dt = det();
        return {g22 / dt, -g12 / dt, g11 / dt};
    }

    // Lower-triangular L with L L^T = g^{-1}; maps isotropic noise to metric noise.
    Mat2 inverse_sqrt_factor() const {
        const Metric2 inv = inverse();
        const double l11 = std::sqrt(inv.g11);
        const double l21 = inv.g12 / l11;
        const double l22 = std::sqrt(inv.g22 - l21 * l21);
        return {l11, 0.0, l21, l22};
    }

    double max_inverse_eigenvalue() const {
        const Metric2 inv = inverse();
        const double m = 0.5 * (inv.g11 + inv.g22);
        const double r = std::hypot(0.5 * (inv.g11 - inv.g22), inv.g12);
        return m + r;
    }

    constexpr Metric2 operator+(const Metric2& o) const { return {g11 + o.g11, g12 + o.g12, g22 + o.g22}; }
    constexpr Metric2 operator*(double s) const { return {g11 * s, g12 * s, g22 * s}; }
};

inline double lerp(double a, double b, double t) { return a + t * (b - a); }

}  // namespace reebfol
