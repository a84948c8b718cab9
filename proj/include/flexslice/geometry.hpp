#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace flexslice {

struct Vec2
{
    double x = 0.;
    double y = 0.;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return { a.x + b.x, a.y + b.y }; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return { a.x - b.x, a.y - b.y }; }
    friend Vec2 operator*(Vec2 a, double s) { return { a.x * s, a.y * s }; }
    friend Vec2 operator*(double s, Vec2 a) { return { a.x * s, a.y * s }; }
    friend bool operator==(Vec2 a, Vec2 b) = default;
};

struct Vec3
{
    double x = 0.;
    double y = 0.;
    double z = 0.;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return { a.x + b.x, a.y + b.y, a.z + b.z }; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return { a.x - b.x, a.y - b.y, a.z - b.z }; }
    friend Vec3 operator*(Vec3 a, double s) { return { a.x * s, a.y * s, a.z * s }; }
    friend Vec3 operator*(double s, Vec3 a) { return { a.x * s, a.y * s, a.z * s }; }
    friend bool operator==(Vec3 a, Vec3 b) = default;

    Vec2 xy() const { return { x, y }; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(b - a); }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(const Vec3& a, const Vec3& b)
{
    return { a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x };
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(b - a); }

inline double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.; }

// Distance from p to the segment [a, b].
inline double distance_to_segment(Vec2 p, Vec2 a, Vec2 b)
{
    const Vec2   ab = b - a;
    const double l2 = dot(ab, ab);
    if (l2 <= 0.)
        return distance(p, a);
    double t = dot(p - a, ab) / l2;
    t        = t < 0. ? 0. : (t > 1. ? 1. : t);
    return distance(p, a + ab * t);
}

struct BoundingBox2
{
    Vec2 min { INFINITY, INFINITY };
    Vec2 max { -INFINITY, -INFINITY };

    void merge(Vec2 p)
    {
        min.x = std::fmin(min.x, p.x);
        min.y = std::fmin(min.y, p.y);
        max.x = std::fmax(max.x, p.x);
        max.y = std::fmax(max.y, p.y);
    }
    bool defined() const { return min.x <= max.x && min.y <= max.y; }
};

struct BoundingBox3
{
    Vec3 min { INFINITY, INFINITY, INFINITY };
    Vec3 max { -INFINITY, -INFINITY, -INFINITY };

    void merge(const Vec3& p)
    {
        min.x = std::fmin(min.x, p.x);
        min.y = std::fmin(min.y, p.y);
        min.z = std::fmin(min.z, p.z);
        max.x = std::fmax(max.x, p.x);
        max.y = std::fmax(max.y, p.y);
        max.z = std::fmax(max.z, p.z);
    }
    Vec3 size() const { return max - min; }
};

} // namespace flexslice
