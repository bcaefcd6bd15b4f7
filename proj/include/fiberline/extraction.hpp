#pragma once

#include "fiberline/candidates.hpp"
#include "fiberline/field.hpp"
#include "fiberline/geometry.hpp"
#include "fiberline/polygon.hpp"
#include "fiberline/stats.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fiberline {

/// Piece of a fiber line inside one cell, generated by one polygon edge.
struct DomainSegment {
    Point2 p;
    Point2 q;
    Index cell_id = 0;
    Index edge_id = 0;
};

struct FiberLineSet {
    /// Sorted by (cell_id, edge_id); at most one segment per pair.
    std::vector<DomainSegment> segments;
    QueryStats stats;
};

/// Cell images whose three |signed distance| are all at or below this are
/// treated as lying on the line and produce nothing.
inline constexpr double kDegenerateDistance = 1e-12;

/// Output segments shorter than this (domain units) are dropped.
inline constexpr double kMinSegmentLength = 1e-12;

enum class PairOutcome { none, segment, degenerate };

/// Exact preimage of `edge` within one cell. `edge` must have positive length.
///
/// Vertices with d > 0 lie on the positive side and d <= 0 on the other. The
/// two crossings of the line with the cell image are located by linear
/// interpolation, ordered by their parameter along the edge, clipped to
/// [0, 1], and carried to the domain with the same interpolation weights.
std::optional<DomainSegment> extract_pair(const BivariateField& field, Index cell_id, const Segment& edge,
                                          Index edge_id, PairOutcome* outcome = nullptr);

/// Same kernel with a precomputed line frame for `edge`.
std::optional<DomainSegment> extract_pair(const BivariateField& field, Index cell_id, const Segment& edge,
                                          const LineFrame& line, Index edge_id, PairOutcome* outcome = nullptr);

/// Runs extract_pair over every candidate and counts true positives.
/// Dense candidate lists are screened per edge with the batch straddle kernel.
FiberLineSet extract_all(const BivariateField& field, const ControlPolygon& polygon,
                         const CandidateList& candidates);

/// Same, over an explicit edge set (edge ids index `edges`).
FiberLineSet extract_all(const BivariateField& field, std::span<const Segment> edges,
                         const CandidateList& candidates);

enum class Component { u, v };

/// Marching-triangles isoline of one value component; segments carry edge_id 0.
std::vector<DomainSegment> extract_isoline(const BivariateField& field, Component component, double isovalue);

/// Fiber-line CSV: `cell_id,edge_id,px,py,qx,qy`, 17 significant digits.
std::string format_fiber_csv(std::span<const DomainSegment> segments);
void save_fiber_csv(std::span<const DomainSegment> segments, const std::filesystem::path& path);

} // namespace fiberline
