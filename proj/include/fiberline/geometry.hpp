#pragma once

#include <algorithm>
#include <cmath>

namespace fiberline {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(Point2, Point2) = default;
};

constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 p) { return std::hypot(p.x, p.y); }
inline double distance(Point2 a, Point2 b) { return norm(b - a); }
inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Closed axis-aligned box. Zero width or height is legal.
struct Aabb {
    Point2 min;
    Point2 max;

    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    double area() const { return width() * height(); }
    Point2 center() const { return {0.5 * (min.x + max.x), 0.5 * (min.y + max.y)}; }

    bool contains(Point2 p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
    bool contains(const Aabb& b) const {
        return b.min.x >= min.x && b.max.x <= max.x && b.min.y >= min.y && b.max.y <= max.y;
    }

    /// Smallest box enclosing both. `unite` with an empty() box is the identity.
    static Aabb unite(const Aabb& a, const Aabb& b) {
        return {{std::min(a.min.x, b.min.x), std::min(a.min.y, b.min.y)},
                {std::max(a.max.x, b.max.x), std::max(a.max.y, b.max.y)}};
    }
    static Aabb empty() {
        constexpr double inf = HUGE_VAL;
        return {{inf, inf}, {-inf, -inf}};
    }

    friend bool operator==(const Aabb&, const Aabb&) = default;
};

struct Segment {
    Point2 a;
    Point2 b;

    double length() const { return distance(a, b); }
    Point2 direction() const { return b - a; }

    friend bool operator==(const Segment&, const Segment&) = default;
};

Aabb aabb_of_triangle(Point2 p0, Point2 p1, Point2 p2);
Aabb aabb_of_segment(const Segment& s);
Aabb aabb_of_points(const Point2* first, const Point2* last);

/// Closed-box overlap; touching boxes overlap.
inline bool aabb_overlap(const Aabb& x, const Aabb& y) {
    return x.min.x <= y.max.x && y.min.x <= x.max.x && x.min.y <= y.max.y && y.min.y <= x.max.y;
}

/// Closed segment vs closed box, slab test on the segment parameter.
///
/// Rejects first on the segment's own bounding box, so a positive answer always
/// implies `aabb_overlap(aabb_of_segment(s), box)`. The result is monotone under box
/// containment, which the traversals rely on for soundness.
bool segment_aabb_intersects(const Segment& s, const Aabb& box);

/// Unit direction of a line; `len` receives the original length.
struct LineFrame {
    Point2 origin;
    Point2 dir; // unit length

    static LineFrame through(Point2 a, Point2 b);

    /// cross(dir, p - origin): positive on the left of the direction of travel.
    double signed_distance(Point2 p) const {
        return dir.x * (p.y - origin.y) - dir.y * (p.x - origin.x);
    }
};

/// Perpendicular distance of `p` to the infinite line a->b, positive on the left.
/// Throws ValidationError on a zero-length line.
double signed_distance(Point2 p, Point2 line_a, Point2 line_b);

/// t = dot(p - a, b - a) / |b - a|^2. Throws ValidationError on a zero-length segment.
double edge_parameter(Point2 p, const Segment& s);

/// Euclidean distance from `p` to the closed segment.
double distance_to_segment(Point2 p, const Segment& s);

} // namespace fiberline
