#pragma once

#include "fiberline/bvh.hpp"
#include "fiberline/extraction.hpp"
#include "fiberline/field.hpp"
#include "fiberline/polygon.hpp"
#include "fiberline/traversal.hpp"

#include <optional>
#include <span>
#include <vector>

namespace fiberline {

struct QueryResult {
    FiberLineSet fiber_lines;
    ControlPolygon polygon_used;
    QueryStats stats;
};

/// Search followed by exact extraction.
///
/// The cell hierarchy is built unless `reuse_cells` is given (its leaf size must
/// match `config.leaf_cells`); the naive method needs none. The edge hierarchy
/// for dual and hybrid is always rebuilt and its time charged to the query.
/// Throws InvalidPolygon if the polygon has no edges.
QueryResult run_query(const BivariateField& field, const ControlPolygon& polygon, const SearchConfig& config,
                      const Bvh* reuse_cells = nullptr);

/// Joins segments that share endpoints (after quantizing coordinates to
/// `quantum`) into polylines. Every input segment becomes exactly one chain
/// edge; segments whose endpoints quantize together are dropped.
std::vector<Polyline> chain_segments(std::span<const Segment> segments, double quantum = 1e-12);

/// Isoline of one component mapped into the codomain and chained into an
/// open edge list. std::nullopt when the isoline is empty.
std::optional<ControlPolygon> isoline_fscp(const BivariateField& field, Component component, double isovalue);

/// One codomain piece of a domain polyline: the image of the part of domain
/// edge `edge_id` with parameters [t0, t1] inside cell `cell_id`.
struct ImageSegment {
    Segment image;
    Index cell_id = 0;
    Index edge_id = 0;
    double t0 = 0.0;
    double t1 = 0.0;
};

/// Pieces ordered along the polyline: by edge, then by parameter.
struct ImagePolyline {
    std::vector<ImageSegment> segments;
    QueryStats stats;

    bool empty() const { return segments.empty(); }
    std::vector<Segment> codomain_segments() const;
};

/// Clips every domain edge against the cells it crosses (hybrid search over
/// the cells' domain boxes) and maps each piece through the field. An empty
/// result means the polyline misses the mesh. Throws InvalidPolygon when the
/// polyline has no edges.
ImagePolyline image_of_domain_polyline(const BivariateField& field, const ControlPolygon& domain_polyline,
                                       const Bvh* domain_cells = nullptr, Recursion recursion = Recursion::area);

/// Preimage of the image of a domain polyline. Stats cover both phases: times
/// and test counters are summed, candidate counters describe the second phase.
/// A polyline whose image is empty or a single point yields an empty result.
QueryResult field_equivalence(const BivariateField& field, const ControlPolygon& domain_polyline,
                              const SearchConfig& config, const Bvh* reuse_cells = nullptr,
                              const Bvh* reuse_domain_cells = nullptr);

} // namespace fiberline
