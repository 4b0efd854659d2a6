#pragma once

#include <cmath>
#include <cstddef>
#include <span>

namespace uavplan {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Vec3&) const = default;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline double dist(const Vec3& a, const Vec3& b) { return norm(a - b); }

inline double polyline_length(std::span<const Vec3> points) {
    double total = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        total += dist(points[i - 1], points[i]);
    }
    return total;
}

inline double clamp(double v, double lo, double hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace uavplan
