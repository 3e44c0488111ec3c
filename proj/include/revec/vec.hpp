#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace revec {

struct Vec2 {
    double x = 0.0, y = 0.0;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
};

struct Vec4 {
    double x = 0.0, y = 0.0, z = 0.0, w = 0.0;
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) { return v / length(v); }

inline bool finite(const Vec3& v) {
    return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

/// Row-major 4x4 transform.
struct Mat4 {
    std::array<double, 16> m{};

    static Mat4 identity() {
        Mat4 r;
        r.m[0] = r.m[5] = r.m[10] = r.m[15] = 1.0;
        return r;
    }

    double& at(int row, int col) { return m[row * 4 + col]; }
    double at(int row, int col) const { return m[row * 4 + col]; }

    Vec4 mul(const Vec4& v) const {
        Vec4 r;
        r.x = m[0] * v.x + m[1] * v.y + m[2] * v.z + m[3] * v.w;
        r.y = m[4] * v.x + m[5] * v.y + m[6] * v.z + m[7] * v.w;
        r.z = m[8] * v.x + m[9] * v.y + m[10] * v.z + m[11] * v.w;
        r.w = m[12] * v.x + m[13] * v.y + m[14] * v.z + m[15] * v.w;
        return r;
    }

    Vec4 mul(const Vec3& v) const { return mul(Vec4{v.x, v.y, v.z, 1.0}); }

    /// Affine point transform (ignores the projective row).
    Vec3 mul_point(const Vec3& v) const {
        const Vec4 r = mul(v);
        return {r.x, r.y, r.z};
    }

    Mat4 mul(const Mat4& o) const {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                double s = 0.0;
                for (int k = 0; k < 4; ++k) s += at(i, k) * o.at(k, j);
                r.at(i, j) = s;
            }
        return r;
    }

    double determinant() const;
};

inline double Mat4::determinant() const {
    // Laplace expansion along the first row.
    auto det3 = [](double a, double b, double c, double d, double e, double f, double g,
                   double h, double i) {
        return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
    };
    return m[0] * det3(m[5], m[6], m[7], m[9], m[10], m[11], m[13], m[14], m[15]) -
           m[1] * det3(m[4], m[6], m[7], m[8], m[10], m[11], m[12], m[14], m[15]) +
           m[2] * det3(m[4], m[5], m[7], m[8], m[9], m[11], m[12], m[13], m[15]) -
           m[3] * det3(m[4], m[5], m[6], m[8], m[9], m[10], m[12], m[13], m[14]);
}

/// Gauss-Jordan inverse. Returns false if the matrix is singular.
inline bool invert(const Mat4& in, Mat4& out) {
    std::array<double, 32> a{};
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) a[i * 8 + j] = in.at(i, j);
        a[i * 8 + 4 + i] = 1.0;
    }
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r * 8 + col]) > std::abs(a[pivot * 8 + col])) pivot = r;
        if (a[pivot * 8 + col] == 0.0) return false;
        if (pivot != col)
            for (int j = 0; j < 8; ++j) std::swap(a[col * 8 + j], a[pivot * 8 + j]);
        const double inv = 1.0 / a[col * 8 + col];
        for (int j = 0; j < 8; ++j) a[col * 8 + j] *= inv;
        for (int r = 0; r < 4; ++r) {
            if (r == col) continue;
            const double f = a[r * 8 + col];
            for (int j = 0; j < 8; ++j) a[r * 8 + j] -= f * a[col * 8 + j];
        }
    }
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) out.at(i, j) = a[i * 8 + 4 + j];
    return true;
}

struct Aabb {
    Vec3 min{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity()};
    Vec3 max{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};

    void extend(const Vec3& p) {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        min.z = std::min(min.z, p.z);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
        max.z = std::max(max.z, p.z);
    }

    bool empty() const { return min.x > max.x; }

    Vec3 extent() const { return max - min; }

    double diagonal() const { return empty() ? 0.0 : length(extent()); }

    std::array<Vec3, 8> corners() const {
        return {Vec3{min.x, min.y, min.z}, Vec3{max.x, min.y, min.z}, Vec3{min.x, max.y, min.z},
                Vec3{max.x, max.y, min.z}, Vec3{min.x, min.y, max.z}, Vec3{max.x, min.y, max.z},
                Vec3{min.x, max.y, max.z}, Vec3{max.x, max.y, max.z}};
    }
};

}  // namespace revec
