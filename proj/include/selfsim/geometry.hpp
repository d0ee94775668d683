#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace selfsim {

struct Vec2 {
    double x = 0;
    double y = 0;

    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
    friend bool operator<(Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Exact predicates on double inputs. Values are evaluated with a floating
// filter and fall back to exact integer/rational arithmetic.

/// Sign of the orientation of (a, b, c): +1 counterclockwise, -1 clockwise, 0 collinear.
int orient2d(Vec2 a, Vec2 b, Vec2 c);

/// Sign of the incircle determinant: +1 if d lies strictly inside the circle
/// through a, b, c (counterclockwise), -1 outside, 0 cocircular.
int incircle_raw(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Incircle under symbolic perturbation of the paraboloid lift, ranked by
/// lexicographic (x, y) order: the lexicographically smaller a point, the
/// larger its lift perturbation. Never returns 0 for four distinct points
/// with a, b, c noncollinear. Translation invariant.
int incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Closed segments [p1,p2] and [q1,q2] share a point.
bool segments_intersect(Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2);

/// Open interiors of two triangles overlap (both given counterclockwise).
bool triangles_overlap(const Vec2 (&t1)[3], const Vec2 (&t2)[3]);

double distance_to_segment(Vec2 p, Vec2 a, Vec2 b);
double polygon_signed_area(std::span<const Vec2> poly);

/// -1 outside, 0 on boundary, +1 strictly inside (simple polygon, exact).
int point_in_polygon(Vec2 p, std::span<const Vec2> poly);

/// Distance from p to a filled convex polygon given counterclockwise (0 inside).
double distance_to_convex_polygon(Vec2 p, std::span<const Vec2> poly);

struct Circle {
    Vec2 center;
    double radius = 0;
};
Circle circumcircle(Vec2 a, Vec2 b, Vec2 c);

double inradius(Vec2 a, Vec2 b, Vec2 c);
double min_angle(Vec2 a, Vec2 b, Vec2 c);

}  // namespace selfsim
