#pragma once

#include <array>
#include <cmath>

namespace nfem {

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator-() const { return {-x, -y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::sqrt(norm2(a)); }
// counter-clockwise rotation by 90 degrees
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

struct Mat2 {
    // m[i][j] = entry in row i, column j
    std::array<std::array<double, 2>, 2> m{{{0.0, 0.0}, {0.0, 0.0}}};

    Mat2() = default;
    Mat2(double a, double b, double c, double d) : m{{{a, b}, {c, d}}} {}

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 outer(Vec2 a, Vec2 b) {
        return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y};
    }

    double operator()(int i, int j) const { return m[i][j]; }
    double& operator()(int i, int j) { return m[i][j]; }

    Mat2 operator+(const Mat2& o) const {
        return {m[0][0] + o.m[0][0], m[0][1] + o.m[0][1],
                m[1][0] + o.m[1][0], m[1][1] + o.m[1][1]};
    }
    Mat2 operator-(const Mat2& o) const {
        return {m[0][0] - o.m[0][0], m[0][1] - o.m[0][1],
                m[1][0] - o.m[1][0], m[1][1] - o.m[1][1]};
    }
    Mat2 operator*(double s) const {
        return {m[0][0] * s, m[0][1] * s, m[1][0] * s, m[1][1] * s};
    }
    Mat2& operator+=(const Mat2& o) {
        m[0][0] += o.m[0][0]; m[0][1] += o.m[0][1];
        m[1][0] += o.m[1][0]; m[1][1] += o.m[1][1];
        return *this;
    }
};

inline Mat2 operator*(double s, const Mat2& a) { return a * s; }
inline Vec2 operator*(const Mat2& a, Vec2 v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y, a(1, 0) * v.x + a(1, 1) * v.y};
}
inline double trace(const Mat2& a) { return a(0, 0) + a(1, 1); }
// sum_ij a_ij b_ji
inline double contract(const Mat2& a, const Mat2& b) {
    return a(0, 0) * b(0, 0) + a(0, 1) * b(1, 0) + a(1, 0) * b(0, 1) + a(1, 1) * b(1, 1);
}
inline Mat2 transpose(const Mat2& a) {
    return {a(0, 0), a(1, 0), a(0, 1), a(1, 1)};
}

// Compensated (Kahan) accumulator for long reductions whose value relies on
// cancellation between terms of opposite sign.
class KahanSum {
public:
    void add(double v) {
        double y = v - c_;
        double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

} // namespace nfem
