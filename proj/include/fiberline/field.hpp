#pragma once

#include "fiberline/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fiberline {

using Index = std::uint32_t;
using Triangle = std::array<Index, 3>;

/// The codomain triangle of one mesh cell.
struct CellImage {
    Index cell_id = 0;
    Point2 p0, p1, p2;
};

/// Cell-image vertex coordinates in structure-of-arrays layout, one entry per
/// cell. Feeds the batch kernels.
struct ImageColumns {
    std::vector<double> x0, y0, x1, y1, x2, y2;

    std::size_t size() const { return x0.size(); }
};

/// Piecewise-linear map f: D -> R^2 on a triangle mesh. Immutable once built.
class BivariateField {
  public:
    BivariateField() = default;

    /// Validates every invariant; throws ValidationError otherwise.
    BivariateField(std::vector<Point2> vertices, std::vector<Point2> values,
                   std::vector<Triangle> triangles);

    std::span<const Point2> vertices() const { return vertices_; }
    std::span<const Point2> values() const { return values_; }
    std::span<const Triangle> triangles() const { return triangles_; }
    const ImageColumns& image_columns() const { return columns_; }

    std::size_t cell_count() const { return triangles_.size(); }
    std::size_t vertex_count() const { return vertices_.size(); }
    bool empty() const { return triangles_.empty(); }

    const Aabb& domain_box() const { return domain_box_; }
    const Aabb& codomain_box() const { return codomain_box_; }

  private:
    std::vector<Point2> vertices_;
    std::vector<Point2> values_;
    std::vector<Triangle> triangles_;
    ImageColumns columns_;
    Aabb domain_box_ = Aabb::empty();
    Aabb codomain_box_ = Aabb::empty();
};

/// Throws ValidationError for an out-of-range id.
CellImage cell_image(const BivariateField& field, Index cell_id);

/// Domain triangle of one cell.
std::array<Point2, 3> cell_domain(const BivariateField& field, Index cell_id);

/// Barycentric coordinates of `p` with respect to the domain triangle of `cell_id`.
std::array<double, 3> barycentric(const BivariateField& field, Index cell_id, Point2 p);

/// Linear interpolation of the cell's vertex values at a domain point.
/// Points equal to a cell vertex return that vertex's value exactly.
/// Throws ValidationError if any barycentric coordinate is below -1e-9.
Point2 evaluate(const BivariateField& field, Index cell_id, Point2 p);

inline constexpr double kBarycentricTolerance = 1e-9;

/// Regular grid over [x0, x0+(nx-1)dx] x [y0, y0+(ny-1)dy], vertex (i, j) at
/// index j*nx + i, each quad split along its (i,j)-(i+1,j+1) diagonal.
std::vector<Triangle> grid_triangles(std::size_t nx, std::size_t ny);
std::vector<Point2> grid_vertices(std::size_t nx, std::size_t ny, Point2 origin, Point2 spacing);

struct DoubleGyreParams {
    double t = 0.0;
    double amplitude = 0.1;
    double eps = 0.25;
    double omega = 0.6283185307179586; // pi / 5
};

/// Velocity (u, v) of the double-gyre stream function at (x, y).
Point2 double_gyre_velocity(Point2 p, const DoubleGyreParams& params);

/// Double gyre sampled on an nx x ny grid over [0,2] x [0,1].
BivariateField gen_double_gyre(std::size_t nx, std::size_t ny, const DoubleGyreParams& params = {});

/// Field whose values equal the vertex positions, on an nx x ny grid over `domain`.
BivariateField gen_identity(std::size_t nx, std::size_t ny, const Aabb& domain);

/// Same value at every vertex.
BivariateField gen_constant(std::size_t nx, std::size_t ny, const Aabb& domain, Point2 value);

enum class FieldFormat { native, grid };

/// Throws ParseError, ValidationError or IoError.
BivariateField load_field(const std::filesystem::path& path, FieldFormat format);
BivariateField parse_field(std::string_view text, FieldFormat format);

/// Guesses the format from the first non-comment token (`bvf2` or `grid`).
BivariateField load_field(const std::filesystem::path& path);

/// Native `bvf2` text form, full double precision.
std::string format_native(const BivariateField& field);
void save_native(const BivariateField& field, const std::filesystem::path& path);

} // namespace fiberline
