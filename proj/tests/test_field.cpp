#include "fiberline/error.hpp"
#include "fiberline/field.hpp"
#include "support/instances.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace fiberline;

namespace {

// Closed-form double gyre at t = 0, A = 0.1: g(x) = x, psi = A sin(pi x) sin(pi y).
Point2 gyre_at_rest(Point2 p) {
    const double a = 0.1;
    return {-M_PI * a * std::sin(M_PI * p.x) * std::cos(M_PI * p.y),
            M_PI * a * std::cos(M_PI * p.x) * std::sin(M_PI * p.y)};
}

BivariateField single_triangle(Point2 a, Point2 b, Point2 c, Point2 fa, Point2 fb, Point2 fc) {
    return BivariateField({a, b, c}, {fa, fb, fc}, {Triangle{0, 1, 2}});
}

} // namespace

TEST_CASE("grid cell counts") {
    CHECK(gen_identity(2, 2, {{0, 0}, {1, 1}}).cell_count() == 2);
    CHECK(gen_identity(2, 2, {{0, 0}, {1, 1}}).vertex_count() == 4);
    CHECK(gen_double_gyre(256, 128).cell_count() == 64770);
    CHECK(gen_double_gyre(181, 91).cell_count() == 32400);
    CHECK_THROWS_AS(gen_double_gyre(1, 5), ValidationError);
}

TEST_CASE("grid triangulation is watertight") {
    const auto tris = grid_triangles(7, 5);
    std::map<std::pair<Index, Index>, int> uses;
    for (const Triangle& t : tris)
        for (int k = 0; k < 3; ++k) {
            const Index a = t[k], b = t[(k + 1) % 3];
            ++uses[{std::min(a, b), std::max(a, b)}];
        }
    int interior = 0, boundary = 0;
    for (const auto& [edge, n] : uses) {
        CHECK((n == 1 || n == 2));
        (n == 2 ? interior : boundary) += 1;
    }
    // Boundary edges: 2 * (6 + 4).
    CHECK(boundary == 20);
    CHECK(interior == static_cast<int>(uses.size()) - 20);
}

TEST_CASE("double gyre closed form") {
    const Point2 centre = double_gyre_velocity({0.5, 0.5}, {});
    CHECK(std::fabs(centre.x) < 1e-15);
    CHECK(std::fabs(centre.y) < 1e-15);
    const Point2 v = double_gyre_velocity({0.5, 0.25}, {});
    CHECK(v.x == doctest::Approx(-0.2221441469079183).epsilon(1e-14));
    CHECK(std::fabs(v.y) < 1e-15);

    const BivariateField f = gen_double_gyre(11, 6);
    const CellImage im = cell_image(f, 0);
    const auto dom = cell_domain(f, 0);
    const Point2 img[3] = {im.p0, im.p1, im.p2};
    for (int k = 0; k < 3; ++k) {
        const Point2 expect = gyre_at_rest(dom[k]);
        CHECK(img[k].x == doctest::Approx(expect.x).epsilon(1e-13));
        CHECK(img[k].y == doctest::Approx(expect.y).epsilon(1e-13));
    }
}

TEST_CASE("double gyre is deterministic") {
    const BivariateField a = gen_double_gyre(40, 20);
    const BivariateField b = gen_double_gyre(40, 20);
    CHECK(format_native(a) == format_native(b));
}

TEST_CASE("cell images of identity and constant fields") {
    const BivariateField id = gen_identity(4, 3, {{-1, -1}, {1, 1}});
    for (Index c = 0; c < id.cell_count(); ++c) {
        const CellImage im = cell_image(id, c);
        const auto dom = cell_domain(id, c);
        CHECK(im.p0 == dom[0]);
        CHECK(im.p1 == dom[1]);
        CHECK(im.p2 == dom[2]);
    }
    const BivariateField k = gen_constant(3, 3, {{0, 0}, {1, 1}}, {3, 7});
    const CellImage im = cell_image(k, 3);
    CHECK(im.p0 == Point2{3, 7});
    CHECK(im.p1 == Point2{3, 7});
    CHECK(im.p2 == Point2{3, 7});
    CHECK_THROWS_AS(cell_image(k, 8), ValidationError);
}

TEST_CASE("evaluate") {
    fltest::Rng rng(3);
    const BivariateField f = fltest::random_grid_field(rng, 9, 7, true);
    for (Index c = 0; c < f.cell_count(); ++c) {
        const auto dom = cell_domain(f, c);
        const Triangle& t = f.triangles()[c];
        for (int k = 0; k < 3; ++k)
            CHECK(evaluate(f, c, dom[k]) == f.values()[t[k]]);

        const Point2 centroid = (1.0 / 3.0) * (dom[0] + dom[1] + dom[2]);
        const Point2 mean =
            (1.0 / 3.0) * (f.values()[t[0]] + f.values()[t[1]] + f.values()[t[2]]);
        const Point2 got = evaluate(f, c, centroid);
        CHECK(got.x == doctest::Approx(mean.x).epsilon(1e-12));
        CHECK(got.y == doctest::Approx(mean.y).epsilon(1e-12));

        // Independent 2x2 solve for the barycentric weights of a random interior point.
        double w1 = fltest::uniform(rng, 0, 1), w2 = fltest::uniform(rng, 0, 1);
        if (w1 + w2 > 1) {
            w1 = 1 - w1;
            w2 = 1 - w2;
        }
        const Point2 p = dom[0] + w1 * (dom[1] - dom[0]) + w2 * (dom[2] - dom[0]);
        const double a = dom[1].x - dom[0].x, b = dom[2].x - dom[0].x;
        const double cc = dom[1].y - dom[0].y, d = dom[2].y - dom[0].y;
        const double det = a * d - b * cc;
        const double s = ((p.x - dom[0].x) * d - b * (p.y - dom[0].y)) / det;
        const double r = (a * (p.y - dom[0].y) - cc * (p.x - dom[0].x)) / det;
        const Point2 expect = f.values()[t[0]] + s * (f.values()[t[1]] - f.values()[t[0]]) +
                              r * (f.values()[t[2]] - f.values()[t[0]]);
        const Point2 e = evaluate(f, c, p);
        CHECK(e.x == doctest::Approx(expect.x).epsilon(1e-10));
        CHECK(e.y == doctest::Approx(expect.y).epsilon(1e-10));
    }
    CHECK_THROWS_AS(evaluate(f, 0, {5, 5}), ValidationError);
}

TEST_CASE("field validation") {
    CHECK_THROWS_AS(single_triangle({0, 0}, {1, 1}, {2, 2}, {}, {}, {}), ValidationError);
    CHECK_THROWS_AS(BivariateField({{0, 0}, {1, 0}, {0, 1}}, {{0, 0}, {1, 0}}, {Triangle{0, 1, 2}}),
                    ValidationError);
    CHECK_THROWS_AS(BivariateField({{0, 0}, {1, 0}, {0, 1}}, {{0, 0}, {1, 0}, {0, 0}}, {Triangle{0, 1, 3}}),
                    ValidationError);
    CHECK_THROWS_AS(BivariateField({{0, 0}, {1, 0}, {0, NAN}}, {{0, 0}, {1, 0}, {0, 0}}, {Triangle{0, 1, 2}}),
                    ValidationError);
    // Degenerate images are fine.
    CHECK_NOTHROW(single_triangle({0, 0}, {1, 0}, {0, 1}, {1, 1}, {1, 1}, {1, 1}));
}

TEST_CASE("native and grid formats") {
    const BivariateField f = gen_double_gyre(6, 4);
    const BivariateField back = parse_field(format_native(f), FieldFormat::native);
    CHECK(back.cell_count() == f.cell_count());
    for (std::size_t i = 0; i < f.vertex_count(); ++i) {
        CHECK(back.vertices()[i] == f.vertices()[i]);
        CHECK(back.values()[i] == f.values()[i]);
    }

    const BivariateField g = parse_field("# tiny\ngrid 2 2 0 0 1 1\n0 0\n1 0\n0 1\n1 1\n", FieldFormat::grid);
    CHECK(g.vertex_count() == 4);
    CHECK(g.cell_count() == 2);

    CHECK_THROWS_AS(parse_field("bvf2 3 1\n0 0 0 0\n1 0 0 0\n0 1 0 0\n0 1 3\n", FieldFormat::native),
                    ValidationError);
    CHECK_THROWS_AS(parse_field("bvf2 3 1\n0 0 0 0\n1 0 0 0\n0 1 0 0\n", FieldFormat::native), ParseError);
    CHECK_THROWS_AS(parse_field("bvf2 3 1\n0 0 0 0\n1 0 zero 0\n0 1 0 0\n0 1 2\n", FieldFormat::native),
                    ParseError);
    CHECK_THROWS_AS(load_field("/nonexistent/mesh.bvf2"), IoError);
}
