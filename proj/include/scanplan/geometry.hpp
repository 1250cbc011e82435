#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "scanplan/errors.hpp"

namespace scanplan {

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    bool operator==(const Vec3& o) const { return x == o.x && y == o.y && z == o.z; }

    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm_sq(const Vec3& v) { return dot(v, v); }
inline double norm(const Vec3& v) { return std::sqrt(norm_sq(v)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (n <= 0.0) throw GeometryError("cannot normalize a zero-length vector");
    return v / n;
}

inline bool is_unit(const Vec3& v, double tol = 1e-9) { return std::abs(norm(v) - 1.0) <= tol; }

/// Angle between two vectors in [0, pi].
inline double angle_between(const Vec3& a, const Vec3& b) {
    const double c = dot(a, b) / (norm(a) * norm(b));
    return std::acos(std::clamp(c, -1.0, 1.0));
}

/// Right-handed orthonormal frame with `axis` as the third column. The two
/// lateral directions are a deterministic function of the axis so that
/// repeated calls agree bit-for-bit.
struct Frame {
    Vec3 u, v, axis;
};

inline Frame frame_from_axis(const Vec3& axis_in, double roll = 0.0) {
    const Vec3 a = normalized(axis_in);
    const Vec3 ref = std::abs(a.z) < 0.999 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
    const Vec3 u0 = normalized(cross(ref, a));
    const Vec3 v0 = cross(a, u0);
    const double c = std::cos(roll);
    const double s = std::sin(roll);
    return Frame{u0 * c + v0 * s, v0 * c - u0 * s, a};
}

/// Rodrigues rotation of `v` about unit `axis` by `angle`.
inline Vec3 rotate_about(const Vec3& v, const Vec3& axis, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return v * c + cross(axis, v) * s + axis * (dot(axis, v) * (1.0 - c));
}

/// Rotation angle between two frames, i.e. the single-axis angle of the
/// relative rotation, in [0, pi].
inline double frame_rotation_angle(const Frame& a, const Frame& b) {
    // trace(Ra^T Rb) = sum of dot products of matching columns.
    const double tr = dot(a.u, b.u) + dot(a.v, b.v) + dot(a.axis, b.axis);
    return std::acos(std::clamp((tr - 1.0) / 2.0, -1.0, 1.0));
}

struct Quat {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;
};

inline Quat quat_from_frame(const Frame& f) {
    // Columns of the rotation matrix.
    const double m00 = f.u.x, m01 = f.v.x, m02 = f.axis.x;
    const double m10 = f.u.y, m11 = f.v.y, m12 = f.axis.y;
    const double m20 = f.u.z, m21 = f.v.z, m22 = f.axis.z;
    Quat q;
    const double trace = m00 + m11 + m22;
    if (trace > 0.0) {
        const double s = std::sqrt(trace + 1.0) * 2.0;
        q.w = 0.25 * s;
        q.x = (m21 - m12) / s;
        q.y = (m02 - m20) / s;
        q.z = (m10 - m01) / s;
    } else if (m00 > m11 && m00 > m22) {
        const double s = std::sqrt(1.0 + m00 - m11 - m22) * 2.0;
        q.w = (m21 - m12) / s;
        q.x = 0.25 * s;
        q.y = (m01 + m10) / s;
        q.z = (m02 + m20) / s;
    } else if (m11 > m22) {
        const double s = std::sqrt(1.0 + m11 - m00 - m22) * 2.0;
        q.w = (m02 - m20) / s;
        q.x = (m01 + m10) / s;
        q.y = 0.25 * s;
        q.z = (m12 + m21) / s;
    } else {
        const double s = std::sqrt(1.0 + m22 - m00 - m11) * 2.0;
        q.w = (m10 - m01) / s;
        q.x = (m02 + m20) / s;
        q.y = (m12 + m21) / s;
        q.z = 0.25 * s;
    }
    return q;
}

inline Frame frame_from_quat(const Quat& q) {
    const double xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
    const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
    const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
    Frame f;
    f.u = {1.0 - 2.0 * (yy + zz), 2.0 * (xy + wz), 2.0 * (xz - wy)};
    f.v = {2.0 * (xy - wz), 1.0 - 2.0 * (xx + zz), 2.0 * (yz + wx)};
    f.axis = {2.0 * (xz + wy), 2.0 * (yz - wx), 1.0 - 2.0 * (xx + yy)};
    return f;
}

inline Quat slerp(const Quat& a, Quat b, double t) {
    double d = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    if (d < 0.0) {
        b = {-b.w, -b.x, -b.y, -b.z};
        d = -d;
    }
    if (d > 0.9995) {
        Quat q{a.w + t * (b.w - a.w), a.x + t * (b.x - a.x), a.y + t * (b.y - a.y),
               a.z + t * (b.z - a.z)};
        const double n = std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z);
        return {q.w / n, q.x / n, q.y / n, q.z / n};
    }
    const double theta = std::acos(std::clamp(d, -1.0, 1.0));
    const double sa = std::sin((1.0 - t) * theta) / std::sin(theta);
    const double sb = std::sin(t * theta) / std::sin(theta);
    return {sa * a.w + sb * b.w, sa * a.x + sb * b.x, sa * a.y + sb * b.y, sa * a.z + sb * b.z};
}

inline Frame interpolate_frames(const Frame& a, const Frame& b, double t) {
    return frame_from_quat(slerp(quat_from_frame(a), quat_from_frame(b), t));
}

/// Perpendicular distance from p to the infinite line through a and b,
/// computed with Heron's formula: s = (d1+d2+d3)/2, S = sqrt(s(s-d1)(s-d2)(s-d3)),
/// D = 2S/d1.
inline double min_distance_point_to_line(const Vec3& a, const Vec3& b, const Vec3& p) {
    const double d1 = distance(a, b);
    if (d1 <= 0.0) throw GeometryError("degenerate line: endpoints coincide");
    const double d2 = distance(a, p);
    const double d3 = distance(b, p);
    const double s = (d1 + d2 + d3) / 2.0;
    const double radicand = s * (s - d1) * (s - d2) * (s - d3);
    const double area = std::sqrt(std::max(radicand, 0.0));
    return 2.0 * area / d1;
}

/// Cross-product route for the same distance; used as the independent check
/// against the Heron route.
inline double point_line_distance_cross(const Vec3& a, const Vec3& b, const Vec3& p) {
    const Vec3 ab = b - a;
    const double d1 = norm(ab);
    if (d1 <= 0.0) throw GeometryError("degenerate line: endpoints coincide");
    return norm(cross(p - a, ab)) / d1;
}

/// Closest point on triangle (t0,t1,t2) to p. Ericson, Real-Time Collision
/// Detection, section 5.1.5.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& t0, const Vec3& t1,
                                      const Vec3& t2) {
    const Vec3 ab = t1 - t0;
    const Vec3 ac = t2 - t0;
    const Vec3 ap = p - t0;
    const double d1 = dot(ab, ap);
    const double d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return t0;

    const Vec3 bp = p - t1;
    const double d3 = dot(ab, bp);
    const double d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return t1;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return t0 + ab * v;
    }

    const Vec3 cp = p - t2;
    const double d5 = dot(ab, cp);
    const double d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return t2;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return t0 + ac * w;
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return t1 + (t2 - t1) * w;
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom;
    const double w = vc * denom;
    return t0 + ab * v + ac * w;
}

/// Separating-axis overlap test between a triangle and an axis-aligned box
/// centered at the origin with half extents h (Akenine-Moller). With
/// `touching_counts` false, configurations that merely touch are treated as
/// separated (used for the exclusive collision clearance).
inline bool triangle_box_overlap(const Vec3& v0, const Vec3& v1, const Vec3& v2, const Vec3& h,
                                 bool touching_counts = true) {
    const auto separated = [&](double lo, double hi, double r) {
        return touching_counts ? (lo > r || hi < -r) : (lo >= r || hi <= -r);
    };
    const auto axis_test = [&](const Vec3& axis) {
        const double len2 = norm_sq(axis);
        if (len2 < 1e-18) return false;  // degenerate axis, skip
        const double p0 = dot(v0, axis);
        const double p1 = dot(v1, axis);
        const double p2 = dot(v2, axis);
        const double lo = std::min({p0, p1, p2});
        const double hi = std::max({p0, p1, p2});
        const double r = h.x * std::abs(axis.x) + h.y * std::abs(axis.y) + h.z * std::abs(axis.z);
        return separated(lo, hi, r);
    };

    // Box face normals.
    if (separated(std::min({v0.x, v1.x, v2.x}), std::max({v0.x, v1.x, v2.x}), h.x)) return false;
    if (separated(std::min({v0.y, v1.y, v2.y}), std::max({v0.y, v1.y, v2.y}), h.y)) return false;
    if (separated(std::min({v0.z, v1.z, v2.z}), std::max({v0.z, v1.z, v2.z}), h.z)) return false;

    const Vec3 e0 = v1 - v0;
    const Vec3 e1 = v2 - v1;
    const Vec3 e2 = v0 - v2;

    // Triangle plane.
    if (axis_test(cross(e0, e1))) return false;

    // Nine edge cross products.
    const Vec3 box_axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (const Vec3& e : {e0, e1, e2})
        for (const Vec3& b : box_axes)
            if (axis_test(cross(e, b))) return false;

    return true;
}

struct Aabb {
    Vec3 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
             std::numeric_limits<double>::max()};
    Vec3 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::lowest()};

    void extend(const Vec3& p) {
        min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
        max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
    }
    Vec3 extent() const { return max - min; }
    bool valid() const { return min.x <= max.x && min.y <= max.y && min.z <= max.z; }
};

}  // namespace scanplan
