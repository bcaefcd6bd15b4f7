#pragma once

#include "fiberline/bvh.hpp"
#include "fiberline/candidates.hpp"
#include "fiberline/field.hpp"
#include "fiberline/polygon.hpp"
#include "fiberline/stats.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace fiberline {

enum class Method { naive, single, dual, hybrid };

/// Which tree a dual traversal descends next.
enum class Recursion { area, height, cells_first, edges_first };

enum class Descend { cells, edges };

struct SearchConfig {
    Method method = Method::hybrid;
    std::size_t leaf_cells = 1;
    std::size_t leaf_edges = 1;
    Recursion recursion = Recursion::area;

    /// Benchmarked defaults: 8 cells per leaf for single, 1 per leaf otherwise.
    static SearchConfig defaults_for(Method method);
};

std::string_view method_name(Method m);
std::string_view recursion_name(Recursion r);
std::optional<Method> parse_method(std::string_view name);
/// Accepts both `cells_first` and `cells-first` spellings.
std::optional<Recursion> parse_recursion(std::string_view name);

struct SearchResult {
    CandidateList candidates;
    QueryStats stats;
};

/// Ties go to the cell side; a leaf is never selected when the other node is internal.
Descend recursion_decide(Recursion strategy, const BvhNode& cell_node, const BvhNode& edge_node);

/// Every cell paired with every edge; no intersection tests.
SearchResult search_naive(const BivariateField& field, const ControlPolygon& polygon);

/// One depth-first descent of the cell hierarchy per edge, segment-vs-box at every node.
SearchResult search_single(std::span<const Segment> edges, const Bvh& cells);
SearchResult search_single(const BivariateField& field, const ControlPolygon& polygon, const Bvh& cells);

/// Simultaneous descent of both hierarchies with box-vs-box tests throughout.
SearchResult search_dual(const Bvh& cells, const Bvh& edges, Recursion recursion);
SearchResult search_dual(const BivariateField& field, const ControlPolygon& polygon, const Bvh& cells,
                         const Bvh& edges, Recursion recursion);

/// Dual descent that switches to segment-vs-box tests whenever the edge-side
/// node is a leaf (a leaf with several edges passes if any of its segments does).
SearchResult search_hybrid(std::span<const Segment> segments, const Bvh& cells, const Bvh& edges,
                           Recursion recursion);
SearchResult search_hybrid(const BivariateField& field, const ControlPolygon& polygon, const Bvh& cells,
                           const Bvh& edges, Recursion recursion);

} // namespace fiberline
