#include "fiberline/traversal.hpp"

#include "fiberline/error.hpp"

#include <chrono>
#include <vector>

namespace fiberline {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void emit_leaf_pairs(const Bvh& cells, const BvhNode& cell_leaf, const Bvh& edges, const BvhNode& edge_leaf,
                     std::vector<CandidatePair>& out) {
    for (Index c : cells.leaf_primitives(cell_leaf))
        for (Index e : edges.leaf_primitives(edge_leaf))
            out.push_back({c, e});
}

// Simultaneous descent of two hierarchies. Each work item names a node pair
// whose test already passed and the side to split next; each child of that
// side is tested against the other node, emitted when both are leaves, and
// queued otherwise. `test(cell_node, edge_node)` counts its own evaluations.
template <class PairTest>
SearchResult dual_descent(const Bvh& cells, const Bvh& edges, Recursion recursion, PairTest&& test) {
    const auto start = Clock::now();
    SearchResult result;
    std::vector<CandidatePair> pairs;

    struct Work {
        Index cell;
        Index edge;
        Descend side;
    };
    std::vector<Work> stack;

    auto visit = [&](Index c, Index e) {
        const BvhNode& cn = cells.node(c);
        const BvhNode& en = edges.node(e);
        if (!test(cn, en, result.stats))
            return;
        if (cn.is_leaf() && en.is_leaf())
            emit_leaf_pairs(cells, cn, edges, en, pairs);
        else
            stack.push_back({c, e, recursion_decide(recursion, cn, en)});
    };

    visit(Bvh::root_index, Bvh::root_index);
    while (!stack.empty()) {
        const Work w = stack.back();
        stack.pop_back();
        if (w.side == Descend::cells) {
            const BvhNode& n = cells.node(w.cell);
            visit(n.right, w.edge);
            visit(n.first, w.edge);
        } else {
            const BvhNode& n = edges.node(w.edge);
            visit(w.cell, n.right);
            visit(w.cell, n.first);
        }
    }

    result.candidates = CandidateList(std::move(pairs));
    result.stats.candidates = result.candidates.size();
    result.stats.finalize();
    result.stats.search_ms = elapsed_ms(start);
    return result;
}

void require_edge_tree(const Bvh& edges, std::size_t edge_count) {
    if (edges.kind() != BvhKind::edges || edges.primitive_count() != edge_count)
        throw ValidationError("edge hierarchy does not match the polygon");
}

} // namespace

SearchConfig SearchConfig::defaults_for(Method method) {
    SearchConfig cfg;
    cfg.method = method;
    cfg.leaf_cells = method == Method::single ? 8 : 1;
    cfg.leaf_edges = 1;
    cfg.recursion = Recursion::area;
    return cfg;
}

std::string_view method_name(Method m) {
    switch (m) {
    case Method::naive:
        return "naive";
    case Method::single:
        return "single";
    case Method::dual:
        return "dual";
    case Method::hybrid:
        return "hybrid";
    }
    return "?";
}

std::string_view recursion_name(Recursion r) {
    switch (r) {
    case Recursion::area:
        return "area";
    case Recursion::height:
        return "height";
    case Recursion::cells_first:
        return "cells-first";
    case Recursion::edges_first:
        return "edges-first";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view name) {
    for (Method m : {Method::naive, Method::single, Method::dual, Method::hybrid})
        if (name == method_name(m))
            return m;
    return std::nullopt;
}

std::optional<Recursion> parse_recursion(std::string_view name) {
    if (name == "area")
        return Recursion::area;
    if (name == "height")
        return Recursion::height;
    if (name == "cells-first" || name == "cells_first")
        return Recursion::cells_first;
    if (name == "edges-first" || name == "edges_first")
        return Recursion::edges_first;
    return std::nullopt;
}

Descend recursion_decide(Recursion strategy, const BvhNode& cell_node, const BvhNode& edge_node) {
    if (cell_node.is_leaf())
        return Descend::edges;
    if (edge_node.is_leaf())
        return Descend::cells;
    switch (strategy) {
    case Recursion::area:
        return edge_node.area > cell_node.area ? Descend::edges : Descend::cells;
    case Recursion::height:
        return edge_node.height > cell_node.height ? Descend::edges : Descend::cells;
    case Recursion::cells_first:
        return Descend::cells;
    case Recursion::edges_first:
        return Descend::edges;
    }
    return Descend::cells;
}

SearchResult search_naive(const BivariateField& field, const ControlPolygon& polygon) {
    const auto start = Clock::now();
    SearchResult result;
    result.candidates = CandidateList::all_pairs(field.cell_count(), polygon.edge_count());
    result.stats.candidates = result.candidates.size();
    result.stats.finalize();
    result.stats.search_ms = elapsed_ms(start);
    return result;
}

SearchResult search_single(std::span<const Segment> edges, const Bvh& cells) {
    const auto start = Clock::now();
    SearchResult result;
    std::vector<CandidatePair> pairs;
    std::vector<Index> stack;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const Segment& seg = edges[e];
        stack.assign(1, Bvh::root_index);
        while (!stack.empty()) {
            const BvhNode& n = cells.node(stack.back());
            stack.pop_back();
            ++result.stats.nit_seg_box;
            if (!segment_aabb_intersects(seg, n.box))
                continue;
            if (n.is_leaf()) {
                for (Index c : cells.leaf_primitives(n))
                    pairs.push_back({c, static_cast<Index>(e)});
            } else {
                stack.push_back(n.right);
                stack.push_back(n.first);
            }
        }
    }
    result.candidates = CandidateList(std::move(pairs));
    result.stats.candidates = result.candidates.size();
    result.stats.finalize();
    result.stats.search_ms = elapsed_ms(start);
    return result;
}

SearchResult search_single(const BivariateField& field, const ControlPolygon& polygon, const Bvh& cells) {
    if (cells.primitive_count() != field.cell_count())
        throw ValidationError("cell hierarchy does not match the field");
    return search_single(polygon.edges(), cells);
}

SearchResult search_dual(const Bvh& cells, const Bvh& edges, Recursion recursion) {
    return dual_descent(cells, edges, recursion, [](const BvhNode& c, const BvhNode& e, QueryStats& stats) {
        ++stats.nit_box_box;
        return aabb_overlap(c.box, e.box);
    });
}

SearchResult search_dual(const BivariateField& field, const ControlPolygon& polygon, const Bvh& cells,
                         const Bvh& edges, Recursion recursion) {
    if (cells.primitive_count() != field.cell_count())
        throw ValidationError("cell hierarchy does not match the field");
    require_edge_tree(edges, polygon.edge_count());
    return search_dual(cells, edges, recursion);
}

SearchResult search_hybrid(std::span<const Segment> segments, const Bvh& cells, const Bvh& edges,
                           Recursion recursion) {
    require_edge_tree(edges, segments.size());
    return dual_descent(cells, edges, recursion,
                        [&](const BvhNode& c, const BvhNode& e, QueryStats& stats) {
                            if (!e.is_leaf()) {
                                ++stats.nit_box_box;
                                return aabb_overlap(c.box, e.box);
                            }
                            for (Index id : edges.leaf_primitives(e)) {
                                ++stats.nit_seg_box;
                                if (segment_aabb_intersects(segments[id], c.box))
                                    return true;
                            }
                            return false;
                        });
}

SearchResult search_hybrid(const BivariateField& field, const ControlPolygon& polygon, const Bvh& cells,
                           const Bvh& edges, Recursion recursion) {
    if (cells.primitive_count() != field.cell_count())
        throw ValidationError("cell hierarchy does not match the field");
    return search_hybrid(polygon.edges(), cells, edges, recursion);
}

} // namespace fiberline
