#pragma once

#include <array>
#include <cmath>
#include <string>

namespace blens {

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

enum class BC { Dirichlet, Neumann, Robin };

enum class Polygon { Square, Rectangle, IsoTriangle, EquiTriangle, HemiTriangle };

inline Vec2 mat_vec(const Mat2& m, const Vec2& v) {
    return {m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]};
}

inline Mat2 mat_mul(const Mat2& a, const Mat2& b) {
    Mat2 r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    return r;
}

inline Mat2 mat_transpose(const Mat2& m) { return {{{m[0][0], m[1][0]}, {m[0][1], m[1][1]}}}; }

inline double mat_det(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

inline Mat2 identity2() { return {{{1.0, 0.0}, {0.0, 1.0}}}; }

// Reflection about the line {z2 = m z1} through the origin.
inline Mat2 reflection_slope(double m) {
    double d = 1.0 + m * m;
    return {{{(1.0 - m * m) / d, 2.0 * m / d}, {2.0 * m / d, (m * m - 1.0) / d}}};
}

// Reflection about the vertical axis {z1 = 0}.
inline Mat2 reflection_vertical() { return {{{-1.0, 0.0}, {0.0, 1.0}}}; }

inline double norm2(const Vec2& v) { return std::hypot(v[0], v[1]); }

inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 operator*(double s, const Vec2& a) { return {s * a[0], s * a[1]}; }

std::string polygon_name(Polygon p);
Polygon polygon_from_name(const std::string& s);
std::string bc_name(BC bc);
BC bc_from_name(const std::string& s);

}  // namespace blens
