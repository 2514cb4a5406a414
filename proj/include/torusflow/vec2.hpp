#pragma once

#include <cmath>

namespace torusflow {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
inline Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
/// Clockwise rotation by 90 degrees: (x, y) -> (y, -x).
inline Vec2 rot_cw(Vec2 a) { return {a.y, -a.x}; }

/// Representative of a - b in [-1/2, 1/2)^2.
inline Vec2 min_image(Vec2 d) {
    return {d.x - std::floor(d.x + 0.5), d.y - std::floor(d.y + 0.5)};
}

/// Reduce a point to [0,1)^2.
inline Vec2 reduce(Vec2 p) {
    Vec2 r{p.x - std::floor(p.x), p.y - std::floor(p.y)};
    if (r.x >= 1.0) r.x = 0.0;
    if (r.y >= 1.0) r.y = 0.0;
    return r;
}

}  // namespace torusflow
