#pragma once

#include "fiberline/geometry.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fiberline {

struct Polyline {
    std::vector<Point2> vertices;
    bool closed = false;
};

/// Control polygon in the codomain: one or more polylines whose edges are the
/// polygon's edge set. Zero-length edges are dropped when the edge list is
/// derived, so every edge has positive length.
class ControlPolygon {
  public:
    ControlPolygon() = default;
    ControlPolygon(std::vector<Point2> vertices, bool closed);
    explicit ControlPolygon(std::vector<Polyline> chains);

    std::span<const Polyline> chains() const { return chains_; }
    std::span<const Segment> edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    /// All chain vertices, concatenated.
    std::vector<Point2> vertices() const;

    /// Single-chain polygons only report meaningful values here.
    bool closed() const { return chains_.size() == 1 && chains_.front().closed; }

    /// Bounding box of all vertices.
    Aabb bounds() const;

    /// Copy shifted by `offset`.
    ControlPolygon translated(Point2 offset) const;

    /// Copy scaled about `pivot`.
    ControlPolygon scaled(Point2 pivot, double factor) const;

    /// Copy with consecutive duplicate vertices removed (same edge set).
    ControlPolygon deduplicated() const;

  private:
    std::vector<Polyline> chains_;
    std::vector<Segment> edges_;
};

enum class PolygonShape { ngon, star, circle_approx };

/// Closed polygon with exactly `edge_count` edges, first vertex at angle 0.
/// `star` alternates `radius` and `inner_radius` and needs an even edge count.
/// Throws ValidationError on invalid counts or radii.
ControlPolygon gen_polygon(PolygonShape shape, std::size_t edge_count, Point2 center, double radius,
                           double inner_radius = 0.0);

/// The nine edge counts of the benchmark polygon family.
inline constexpr std::size_t kBenchmarkPolygonSizes[] = {3, 4, 8, 16, 38, 60, 126, 232, 2997};

/// Benchmark family: one polygon per entry of kBenchmarkPolygonSizes.
std::vector<ControlPolygon> benchmark_polygons(Point2 center, double radius);

/// `poly <n> <closed|open>` text format. Single-chain polygons only.
ControlPolygon parse_polygon(std::string_view text);
ControlPolygon load_polygon(const std::filesystem::path& path);
std::string format_polygon(const ControlPolygon& polygon);
void save_polygon(const ControlPolygon& polygon, const std::filesystem::path& path);

} // namespace fiberline
