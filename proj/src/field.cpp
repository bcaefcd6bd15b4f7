#include "fiberline/field.hpp"

#include "fiberline/error.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fiberline {

BivariateField::BivariateField(std::vector<Point2> vertices, std::vector<Point2> values,
                               std::vector<Triangle> triangles)
    : vertices_(std::move(vertices)), values_(std::move(values)), triangles_(std::move(triangles)) {
    if (values_.size() != vertices_.size())
        throw ValidationError("value count " + std::to_string(values_.size()) +
                              " != vertex count " + std::to_string(vertices_.size()));
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (!is_finite(vertices_[i]) || !is_finite(values_[i]))
            throw ValidationError("non-finite coordinate at vertex " + std::to_string(i));

    const std::size_t nv = vertices_.size();
    for (std::size_t c = 0; c < triangles_.size(); ++c) {
        const Triangle& t = triangles_[c];
        for (Index i : t)
            if (i >= nv)
                throw ValidationError("triangle " + std::to_string(c) + " references vertex " +
                                      std::to_string(i) + " of " + std::to_string(nv));
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw ValidationError("triangle " + std::to_string(c) + " repeats a vertex");
        const Point2 a = vertices_[t[0]];
        if (cross(vertices_[t[1]] - a, vertices_[t[2]] - a) == 0.0)
            throw ValidationError("triangle " + std::to_string(c) + " has zero domain area");
    }

    domain_box_ = aabb_of_points(vertices_.data(), vertices_.data() + vertices_.size());
    codomain_box_ = aabb_of_points(values_.data(), values_.data() + values_.size());

    const std::size_t n = triangles_.size();
    for (auto* col : {&columns_.x0, &columns_.y0, &columns_.x1, &columns_.y1, &columns_.x2, &columns_.y2})
        col->resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        const Triangle& t = triangles_[c];
        columns_.x0[c] = values_[t[0]].x;
        columns_.y0[c] = values_[t[0]].y;
        columns_.x1[c] = values_[t[1]].x;
        columns_.y1[c] = values_[t[1]].y;
        columns_.x2[c] = values_[t[2]].x;
        columns_.y2[c] = values_[t[2]].y;
    }
}

CellImage cell_image(const BivariateField& field, Index cell_id) {
    if (cell_id >= field.cell_count())
        throw ValidationError("cell id " + std::to_string(cell_id) + " out of range");
    const Triangle& t = field.triangles()[cell_id];
    const auto values = field.values();
    return {cell_id, values[t[0]], values[t[1]], values[t[2]]};
}

std::array<Point2, 3> cell_domain(const BivariateField& field, Index cell_id) {
    if (cell_id >= field.cell_count())
        throw ValidationError("cell id " + std::to_string(cell_id) + " out of range");
    const Triangle& t = field.triangles()[cell_id];
    const auto verts = field.vertices();
    return {verts[t[0]], verts[t[1]], verts[t[2]]};
}

std::array<double, 3> barycentric(const BivariateField& field, Index cell_id, Point2 p) {
    const auto [a, b, c] = cell_domain(field, cell_id);
    const Point2 e1 = b - a;
    const Point2 e2 = c - a;
    const Point2 r = p - a;
    const double det = cross(e1, e2);
    const double l1 = cross(r, e2) / det;
    const double l2 = cross(e1, r) / det;
    return {1.0 - l1 - l2, l1, l2};
}

Point2 evaluate(const BivariateField& field, Index cell_id, Point2 p) {
    const auto lambda = barycentric(field, cell_id, p);
    const Triangle& t = field.triangles()[cell_id];
    const auto verts = field.vertices();
    const auto values = field.values();
    for (int k = 0; k < 3; ++k)
        if (verts[t[k]] == p)
            return values[t[k]];
    for (double l : lambda)
        if (l < -kBarycentricTolerance)
            throw ValidationError("point outside cell " + std::to_string(cell_id));
    const Point2 v0 = values[t[0]];
    return v0 + lambda[1] * (values[t[1]] - v0) + lambda[2] * (values[t[2]] - v0);
}

std::vector<Triangle> grid_triangles(std::size_t nx, std::size_t ny) {
    std::vector<Triangle> tris;
    if (nx < 2 || ny < 2)
        return tris;
    tris.reserve(2 * (nx - 1) * (ny - 1));
    for (std::size_t j = 0; j + 1 < ny; ++j) {
        for (std::size_t i = 0; i + 1 < nx; ++i) {
            const auto v00 = static_cast<Index>(j * nx + i);
            const auto v10 = v00 + 1;
            const auto v01 = static_cast<Index>(v00 + nx);
            const auto v11 = v01 + 1;
            tris.push_back({v00, v10, v11});
            tris.push_back({v00, v11, v01});
        }
    }
    return tris;
}

std::vector<Point2> grid_vertices(std::size_t nx, std::size_t ny, Point2 origin, Point2 spacing) {
    std::vector<Point2> verts;
    verts.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            verts.push_back({origin.x + static_cast<double>(i) * spacing.x,
                             origin.y + static_cast<double>(j) * spacing.y});
    return verts;
}

namespace {

void check_resolution(std::size_t nx, std::size_t ny) {
    if (nx < 2 || ny < 2)
        throw ValidationError("grid resolution must be at least 2 x 2, got " + std::to_string(nx) +
                              " x " + std::to_string(ny));
}

std::vector<Point2> grid_over(std::size_t nx, std::size_t ny, const Aabb& domain) {
    return grid_vertices(nx, ny, domain.min,
                         {domain.width() / static_cast<double>(nx - 1),
                          domain.height() / static_cast<double>(ny - 1)});
}

} // namespace

Point2 double_gyre_velocity(Point2 p, const DoubleGyreParams& params) {
    using std::numbers::pi;
    const double a = params.eps * std::sin(params.omega * params.t);
    const double b = 1.0 - 2.0 * a;
    const double g = a * p.x * p.x + b * p.x;
    const double dg = 2.0 * a * p.x + b;
    const double u = -pi * params.amplitude * std::sin(pi * g) * std::cos(pi * p.y);
    const double v = pi * params.amplitude * std::cos(pi * g) * std::sin(pi * p.y) * dg;
    return {u, v};
}

BivariateField gen_double_gyre(std::size_t nx, std::size_t ny, const DoubleGyreParams& params) {
    check_resolution(nx, ny);
    auto verts = grid_over(nx, ny, {{0.0, 0.0}, {2.0, 1.0}});
    std::vector<Point2> values;
    values.reserve(verts.size());
    for (Point2 p : verts)
        values.push_back(double_gyre_velocity(p, params));
    return {std::move(verts), std::move(values), grid_triangles(nx, ny)};
}

BivariateField gen_identity(std::size_t nx, std::size_t ny, const Aabb& domain) {
    check_resolution(nx, ny);
    auto verts = grid_over(nx, ny, domain);
    auto values = verts;
    return {std::move(verts), std::move(values), grid_triangles(nx, ny)};
}

BivariateField gen_constant(std::size_t nx, std::size_t ny, const Aabb& domain, Point2 value) {
    check_resolution(nx, ny);
    auto verts = grid_over(nx, ny, domain);
    std::vector<Point2> values(verts.size(), value);
    return {std::move(verts), std::move(values), grid_triangles(nx, ny)};
}

} // namespace fiberline
