#pragma once

#include <cmath>

namespace balltrack {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

// Circle in pixel coordinates. Center is integer-bin resolution straight out
// of voting and sub-pixel after refinement.
struct Circle {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
};

}  // namespace balltrack
