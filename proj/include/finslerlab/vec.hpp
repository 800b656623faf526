#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>

namespace fin {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
    constexpr bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline constexpr Vec2 operator*(double s, const Vec2& v) { return v * s; }
inline constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::hypot(v.x, v.y); }
inline constexpr double norm2(const Vec2& v) { return v.x * v.x + v.y * v.y; }
inline Vec2 normalized(const Vec2& v) { double n = norm(v); return {v.x / n, v.y / n}; }
inline constexpr Vec2 perp(const Vec2& v) { return {-v.y, v.x}; }
inline bool finite(const Vec2& v) { return std::isfinite(v.x) && std::isfinite(v.y); }

/// Integer lattice vector (homotopy/homology class on the torus).
struct Vec2i {
    int x = 0;
    int y = 0;

    constexpr Vec2i() = default;
    constexpr Vec2i(int x_, int y_) : x(x_), y(y_) {}
    constexpr Vec2i operator+(const Vec2i& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2i operator-(const Vec2i& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2i operator-() const { return {-x, -y}; }
    constexpr Vec2i operator*(int s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2i& o) const { return x == o.x && y == o.y; }
    constexpr bool operator!=(const Vec2i& o) const { return !(*this == o); }
    Vec2 toVec() const { return {double(x), double(y)}; }
};

inline int gcd2(int a, int b) {
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b) { int t = a % b; a = b; b = t; }
    return a;
}

inline bool isPrimitive(const Vec2i& z) {
    if (z.x == 0 && z.y == 0) return false;
    return gcd2(z.x, z.y) == 1;
}

inline int maxAbs(const Vec2i& z) {
    int ax = z.x < 0 ? -z.x : z.x;
    int ay = z.y < 0 ? -z.y : z.y;
    return ax > ay ? ax : ay;
}

}  // namespace fin
