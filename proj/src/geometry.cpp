#include "fiberline/geometry.hpp"

#include "fiberline/error.hpp"

namespace fiberline {

Aabb aabb_of_triangle(Point2 p0, Point2 p1, Point2 p2) {
    return {{std::min({p0.x, p1.x, p2.x}), std::min({p0.y, p1.y, p2.y})},
            {std::max({p0.x, p1.x, p2.x}), std::max({p0.y, p1.y, p2.y})}};
}

Aabb aabb_of_segment(const Segment& s) {
    return {{std::min(s.a.x, s.b.x), std::min(s.a.y, s.b.y)},
            {std::max(s.a.x, s.b.x), std::max(s.a.y, s.b.y)}};
}

Aabb aabb_of_points(const Point2* first, const Point2* last) {
    Aabb box = Aabb::empty();
    for (; first != last; ++first)
        box = Aabb::unite(box, Aabb{*first, *first});
    return box;
}

namespace {

// Narrows [t0, t1] to the parameters where a + t*d lies inside [lo, hi].
bool clip_slab(double a, double d, double lo, double hi, double& t0, double& t1) {
    if (d == 0.0)
        return a >= lo && a <= hi;
    double ta = (lo - a) / d;
    double tb = (hi - a) / d;
    if (ta > tb)
        std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    return t0 <= t1;
}

} // namespace

bool segment_aabb_intersects(const Segment& s, const Aabb& box) {
    if (!aabb_overlap(aabb_of_segment(s), box))
        return false;
    double t0 = 0.0;
    double t1 = 1.0;
    const Point2 d = s.b - s.a;
    return clip_slab(s.a.x, d.x, box.min.x, box.max.x, t0, t1) &&
           clip_slab(s.a.y, d.y, box.min.y, box.max.y, t0, t1);
}

LineFrame LineFrame::through(Point2 a, Point2 b) {
    const Point2 d = b - a;
    const double len = norm(d);
    if (!(len > 0.0))
        throw ValidationError("line through coincident points");
    return {a, {d.x / len, d.y / len}};
}

double signed_distance(Point2 p, Point2 line_a, Point2 line_b) {
    return LineFrame::through(line_a, line_b).signed_distance(p);
}

double edge_parameter(Point2 p, const Segment& s) {
    const Point2 d = s.b - s.a;
    const double len2 = dot(d, d);
    if (!(len2 > 0.0))
        throw ValidationError("edge parameter on a zero-length segment");
    return dot(p - s.a, d) / len2;
}

double distance_to_segment(Point2 p, const Segment& s) {
    const Point2 d = s.b - s.a;
    const double len2 = dot(d, d);
    if (len2 == 0.0)
        return distance(p, s.a);
    const double t = std::clamp(dot(p - s.a, d) / len2, 0.0, 1.0);
    return distance(p, s.a + t * d);
}

} // namespace fiberline
