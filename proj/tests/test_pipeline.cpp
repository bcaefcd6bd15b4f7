#include "fiberline/error.hpp"
#include "fiberline/pipeline.hpp"
#include "support/instances.hpp"

#include <doctest.h>

using namespace fiberline;

namespace {

double distance_to_polyline(Point2 p, std::span<const Segment> edges) {
    double best = HUGE_VAL;
    for (const Segment& e : edges)
        best = std::min(best, distance_to_segment(p, e));
    return best;
}

double distance_to_pieces(Point2 p, std::span<const DomainSegment> segs) {
    double best = HUGE_VAL;
    for (const DomainSegment& s : segs)
        best = std::min(best, distance_to_segment(p, {s.p, s.q}));
    return best;
}

constexpr Method kMethods[] = {Method::naive, Method::single, Method::dual, Method::hybrid};

} // namespace

TEST_CASE("run_query accounting") {
    fltest::Rng rng(2);
    const BivariateField f = fltest::make_field(rng, fltest::FieldKind::double_gyre, 5000);
    const ControlPolygon poly = gen_polygon(PolygonShape::star, 60, f.codomain_box().center(), 0.1, 0.05);
    std::size_t count = 0;
    for (Method m : kMethods) {
        const QueryResult r = run_query(f, poly, SearchConfig::defaults_for(m));
        const QueryStats& s = r.stats;
        CHECK(s.consistent());
        CHECK(s.true_positives == r.fiber_lines.segments.size());
        CHECK(s.total_ms >= s.build_cells_ms + s.build_edges_ms + s.search_ms + s.extract_ms);
        if (m == Method::naive) {
            CHECK(s.build_cells_ms == 0.0);
            CHECK(s.nit_total == 0);
        }
        if (m == Method::single)
            CHECK(s.build_edges_ms == 0.0);
        if (count == 0)
            count = r.fiber_lines.segments.size();
        CHECK(r.fiber_lines.segments.size() == count);
    }
    CHECK(count > 0);

    const Bvh reuse = build_cells(f, 1);
    const QueryResult reused = run_query(f, poly, SearchConfig::defaults_for(Method::hybrid), &reuse);
    CHECK(reused.stats.build_cells_ms == 0.0);
    CHECK(reused.fiber_lines.segments.size() == count);
    CHECK_THROWS_AS(run_query(f, poly, SearchConfig::defaults_for(Method::single), &reuse), ValidationError);
    CHECK_THROWS_AS(run_query(f, ControlPolygon({{1, 1}, {1, 1}}, true), SearchConfig{}), InvalidPolygon);
}

TEST_CASE("duplicate vertices do not change the result") {
    const BivariateField f = gen_double_gyre(40, 20);
    const Point2 c = f.codomain_box().center();
    const ControlPolygon dup({c, c + Point2{0.1, 0}, c + Point2{0.1, 0}, c + Point2{0.1, 0.05}, c, c}, true);
    const ControlPolygon clean = dup.deduplicated();
    REQUIRE(dup.edge_count() == 3);
    for (Method m : kMethods) {
        const auto a = run_query(f, dup, SearchConfig::defaults_for(m)).fiber_lines.segments;
        const auto b = run_query(f, clean, SearchConfig::defaults_for(m)).fiber_lines.segments;
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].p == b[i].p);
            CHECK(a[i].q == b[i].q);
            CHECK(a[i].edge_id == b[i].edge_id);
        }
    }
}

TEST_CASE("chaining keeps every segment") {
    const std::vector<Segment> square{{{1, 0}, {1, 1}}, {{0, 0}, {1, 0}}, {{0, 1}, {0, 0}}, {{1, 1}, {0, 1}}};
    const auto closed = chain_segments(square);
    REQUIRE(closed.size() == 1);
    CHECK(closed[0].closed);
    CHECK(ControlPolygon(closed).edge_count() == 4);

    const std::vector<Segment> path{{{2, 0}, {3, 0}}, {{0, 0}, {1, 0}}, {{2, 0}, {1, 0}}};
    const auto open = chain_segments(path);
    REQUIRE(open.size() == 1);
    CHECK_FALSE(open[0].closed);
    CHECK(open[0].vertices.size() == 4);

    // A T junction needs two chains.
    const std::vector<Segment> tee{{{0, 0}, {1, 0}}, {{1, 0}, {2, 0}}, {{1, 0}, {1, 1}}};
    const auto t = chain_segments(tee);
    CHECK(ControlPolygon(t).edge_count() == 3);
    CHECK(t.size() == 2);

    fltest::Rng rng(3);
    std::vector<Segment> random;
    for (int i = 0; i < 300; ++i) {
        const Point2 a{double(fltest::pick(rng, 0, 9)), double(fltest::pick(rng, 0, 9))};
        const Point2 b{double(fltest::pick(rng, 0, 9)), double(fltest::pick(rng, 0, 9))};
        if (a != b)
            random.push_back({a, b});
    }
    CHECK(ControlPolygon(chain_segments(random)).edge_count() == random.size());
}

TEST_CASE("isoline control polygons") {
    const BivariateField f = gen_double_gyre(64, 32);
    const auto fscp = isoline_fscp(f, Component::u, 0.0);
    REQUIRE(fscp);
    for (Point2 v : fscp->vertices())
        CHECK(std::fabs(v.x) <= 1e-9);
    // One edge per isoline segment, except the few whose image is a single point
    // (on the gyre's walls v is symmetric about y = 0.5).
    auto projected = [&f](Component c, double iso) {
        std::size_t n = 0;
        for (const DomainSegment& s : extract_isoline(f, c, iso))
            n += distance(evaluate(f, s.cell_id, s.p), evaluate(f, s.cell_id, s.q)) > 1e-12;
        return n;
    };
    CHECK(fscp->edge_count() == projected(Component::u, 0.0));
    CHECK(projected(Component::u, 0.0) + 4 == extract_isoline(f, Component::u, 0.0).size());

    const auto v_iso = isoline_fscp(f, Component::v, 0.05);
    REQUIRE(v_iso);
    CHECK(v_iso->edge_count() == extract_isoline(f, Component::v, 0.05).size());
    CHECK_FALSE(isoline_fscp(f, Component::u, f.codomain_box().min.x));
}

TEST_CASE("image of a domain polyline") {
    const BivariateField f = gen_double_gyre(32, 16);
    const ControlPolygon line({{0.13, 0.21}, {1.71, 0.64}}, false);
    const ImagePolyline image = image_of_domain_polyline(f, line);
    REQUIRE(image.segments.size() > 10);
    for (std::size_t i = 0; i + 1 < image.segments.size(); ++i) {
        CHECK(image.segments[i].t1 == doctest::Approx(image.segments[i + 1].t0).epsilon(1e-12));
        CHECK(fltest::close_points(image.segments[i].image.b, image.segments[i + 1].image.a, 1e-9));
    }
    CHECK(image.segments.front().t0 == 0.0);
    CHECK(image.segments.back().t1 == 1.0);

    // Pieces agree with a per-cell count of crossings.
    std::size_t crossed = 0;
    for (Index c = 0; c < f.cell_count(); ++c) {
        const auto dom = cell_domain(f, c);
        const BivariateField ident({dom[0], dom[1], dom[2]}, {dom[0], dom[1], dom[2]}, {Triangle{0, 1, 2}});
        if (fltest::oracle_fiber(ident, 0, line.edges()[0]))
            ++crossed;
    }
    CHECK(image.segments.size() == crossed);

    const ControlPolygon outside({{5, 5}, {6, 6}}, false);
    CHECK(image_of_domain_polyline(f, outside).empty());
    CHECK_THROWS_AS(image_of_domain_polyline(f, ControlPolygon({{1, 1}}, false)), InvalidPolygon);
}

TEST_CASE("field equivalence") {
    const BivariateField f = gen_double_gyre(48, 24);
    const ControlPolygon domain_poly = gen_polygon(PolygonShape::star, 16, {0.6, 0.4}, 0.2, 0.1);
    const ImagePolyline image = image_of_domain_polyline(f, domain_poly);
    const auto image_edges = image.codomain_segments();
    std::vector<DomainSegment> reference;
    for (Method m : kMethods) {
        const QueryResult r = field_equivalence(f, domain_poly, SearchConfig::defaults_for(m));
        CHECK(r.stats.consistent());
        CHECK(r.polygon_used.edge_count() == image.segments.size());
        REQUIRE(!r.fiber_lines.segments.empty());
        for (const DomainSegment& s : r.fiber_lines.segments) {
            CHECK(distance_to_polyline(evaluate(f, s.cell_id, s.p), image_edges) <= 1e-9);
            CHECK(distance_to_polyline(evaluate(f, s.cell_id, s.q), image_edges) <= 1e-9);
        }
        if (reference.empty())
            reference = r.fiber_lines.segments;
        CHECK(r.fiber_lines.segments.size() == reference.size());
    }
    const QueryResult none = field_equivalence(f, ControlPolygon({{5, 5}, {6, 6}}, false), SearchConfig{});
    CHECK(none.fiber_lines.segments.empty());
}

TEST_CASE("field equivalence on the identity field returns the trace") {
    const BivariateField f = gen_identity(30, 20, {{0, 0}, {3, 2}});
    const ControlPolygon domain_poly = gen_polygon(PolygonShape::ngon, 7, {1.4, 0.9}, 0.6);
    const QueryResult r = field_equivalence(f, domain_poly, SearchConfig{});
    const auto& segs = r.fiber_lines.segments;
    for (const Segment& e : domain_poly.edges())
        for (int k = 0; k <= 50; ++k)
            CHECK(distance_to_pieces(e.a + (k / 50.0) * (e.b - e.a), segs) <= 1e-9);
    for (const DomainSegment& s : segs) {
        CHECK(distance_to_polyline(s.p, domain_poly.edges()) <= 1e-9);
        CHECK(distance_to_polyline(s.q, domain_poly.edges()) <= 1e-9);
    }
}
