#include "fiberline/pipeline.hpp"

#include "fiberline/error.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <unordered_map>

namespace fiberline {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

SearchResult run_search(const BivariateField& field, const ControlPolygon& polygon, const SearchConfig& config,
                        const Bvh* cells, QueryStats& stats) {
    if (config.method == Method::naive)
        return search_naive(field, polygon);
    if (config.method == Method::single)
        return search_single(field, polygon, *cells);

    const auto t0 = Clock::now();
    const Bvh edges = build_edges(polygon, config.leaf_edges);
    stats.build_edges_ms = elapsed_ms(t0);
    if (config.method == Method::dual)
        return search_dual(field, polygon, *cells, edges, config.recursion);
    return search_hybrid(field, polygon, *cells, edges, config.recursion);
}

// Parameter interval of a + t*(b - a), t in [0, 1], inside a closed triangle.
bool clip_to_triangle(const Segment& s, const std::array<Point2, 3>& tri, double& t0, double& t1) {
    const double orient = cross(tri[1] - tri[0], tri[2] - tri[0]) > 0.0 ? 1.0 : -1.0;
    const Point2 d = s.b - s.a;
    t0 = 0.0;
    t1 = 1.0;
    for (int k = 0; k < 3; ++k) {
        const Point2 v = tri[k];
        const Point2 e = tri[(k + 1) % 3] - v;
        const double f0 = orient * cross(e, s.a - v);
        const double df = orient * cross(e, d);
        if (df == 0.0) {
            if (f0 < 0.0)
                return false;
            continue;
        }
        const double t = -f0 / df;
        if (df > 0.0)
            t0 = std::max(t0, t);
        else
            t1 = std::min(t1, t);
        if (t0 > t1)
            return false;
    }
    return true;
}

struct QuantKey {
    long long x;
    long long y;
    bool operator==(const QuantKey&) const = default;
};

struct QuantKeyHash {
    std::size_t operator()(const QuantKey& k) const noexcept {
        const auto h = static_cast<std::size_t>(k.x) * 0x9E3779B97F4A7C15ull;
        return h ^ (static_cast<std::size_t>(k.y) + 0x7F4A7C159E3779B9ull + (h << 6) + (h >> 2));
    }
};

} // namespace

QueryResult run_query(const BivariateField& field, const ControlPolygon& polygon, const SearchConfig& config,
                      const Bvh* reuse_cells) {
    const auto start = Clock::now();
    if (polygon.edge_count() == 0)
        throw InvalidPolygon("polygon has no edge of positive length");
    if (config.leaf_cells < 1 || config.leaf_edges < 1)
        throw ValidationError("leaf sizes must be at least 1");

    QueryResult result;
    result.polygon_used = polygon;
    QueryStats& stats = result.stats;

    Bvh local_cells;
    const Bvh* cells = reuse_cells;
    if (config.method != Method::naive) {
        if (cells && cells->leaf_size() != config.leaf_cells)
            throw ValidationError("reused cell hierarchy has leaf size " + std::to_string(cells->leaf_size()) +
                                  ", query asks for " + std::to_string(config.leaf_cells));
        if (!cells) {
            const auto t0 = Clock::now();
            local_cells = build_cells(field, config.leaf_cells);
            stats.build_cells_ms = elapsed_ms(t0);
            cells = &local_cells;
        }
    }

    SearchResult search = run_search(field, polygon, config, cells, stats);
    stats.nit_box_box = search.stats.nit_box_box;
    stats.nit_seg_box = search.stats.nit_seg_box;
    stats.search_ms = search.stats.search_ms;

    result.fiber_lines = extract_all(field, polygon, search.candidates);
    const QueryStats& ex = result.fiber_lines.stats;
    stats.candidates = ex.candidates;
    stats.true_positives = ex.true_positives;
    stats.degenerate_cells = ex.degenerate_cells;
    stats.extract_ms = ex.extract_ms;
    stats.finalize();
    stats.total_ms = elapsed_ms(start);
    result.fiber_lines.stats = stats;
    return result;
}

std::vector<Polyline> chain_segments(std::span<const Segment> segments, double quantum) {
    std::unordered_map<QuantKey, Index, QuantKeyHash> ids;
    std::vector<Point2> points;
    auto vertex_of = [&](Point2 p) {
        const QuantKey key{std::llround(p.x / quantum), std::llround(p.y / quantum)};
        auto [it, inserted] = ids.try_emplace(key, static_cast<Index>(points.size()));
        if (inserted)
            points.push_back(p);
        return it->second;
    };

    struct Link {
        Index a;
        Index b;
    };
    std::vector<Link> links;
    links.reserve(segments.size());
    for (const Segment& s : segments) {
        const Index a = vertex_of(s.a);
        const Index b = vertex_of(s.b);
        if (a != b)
            links.push_back({a, b});
    }

    std::vector<std::vector<Index>> incident(points.size());
    for (Index i = 0; i < links.size(); ++i) {
        incident[links[i].a].push_back(i);
        incident[links[i].b].push_back(i);
    }

    std::vector<bool> used(links.size(), false);
    std::vector<std::size_t> cursor(points.size(), 0);
    auto next_link = [&](Index v) -> std::optional<Index> {
        auto& list = incident[v];
        while (cursor[v] < list.size()) {
            const Index l = list[cursor[v]++];
            if (!used[l])
                return l;
        }
        return std::nullopt;
    };
    auto walk = [&](Index start) {
        Polyline chain;
        chain.vertices.push_back(points[start]);
        Index v = start;
        while (auto l = next_link(v)) {
            used[*l] = true;
            v = links[*l].a == v ? links[*l].b : links[*l].a;
            chain.vertices.push_back(points[v]);
        }
        if (v == start && chain.vertices.size() > 2) {
            chain.vertices.pop_back();
            chain.closed = true;
        }
        return chain;
    };

    std::vector<Polyline> chains;
    // Open ends first so that paths are not split at their interior.
    for (Index v = 0; v < points.size(); ++v)
        if (incident[v].size() % 2 == 1)
            while (cursor[v] < incident[v].size()) {
                Polyline c = walk(v);
                if (c.vertices.size() > 1)
                    chains.push_back(std::move(c));
            }
    for (Index l = 0; l < links.size(); ++l)
        if (!used[l])
            chains.push_back(walk(links[l].a));
    return chains;
}

std::optional<ControlPolygon> isoline_fscp(const BivariateField& field, Component component, double isovalue) {
    const auto isoline = extract_isoline(field, component, isovalue);
    if (isoline.empty())
        return std::nullopt;
    std::vector<Segment> projected;
    projected.reserve(isoline.size());
    for (const DomainSegment& s : isoline)
        projected.push_back({evaluate(field, s.cell_id, s.p), evaluate(field, s.cell_id, s.q)});
    ControlPolygon polygon(chain_segments(projected));
    if (polygon.edge_count() == 0)
        return std::nullopt;
    return polygon;
}

std::vector<Segment> ImagePolyline::codomain_segments() const {
    std::vector<Segment> out;
    out.reserve(segments.size());
    for (const ImageSegment& s : segments)
        out.push_back(s.image);
    return out;
}

ImagePolyline image_of_domain_polyline(const BivariateField& field, const ControlPolygon& domain_polyline,
                                       const Bvh* domain_cells, Recursion recursion) {
    const auto edges = domain_polyline.edges();
    if (edges.empty())
        throw InvalidPolygon("domain polyline has no edge of positive length");

    ImagePolyline out;
    QueryStats& stats = out.stats;

    Bvh local;
    if (!domain_cells) {
        const auto t0 = Clock::now();
        local = build_domain_cells(field, 1);
        stats.build_cells_ms = elapsed_ms(t0);
        domain_cells = &local;
    }
    auto t0 = Clock::now();
    const Bvh edge_tree = build_segments(edges, 1);
    stats.build_edges_ms = elapsed_ms(t0);

    const SearchResult search = search_hybrid(edges, *domain_cells, edge_tree, recursion);
    stats.nit_box_box = search.stats.nit_box_box;
    stats.nit_seg_box = search.stats.nit_seg_box;
    stats.search_ms = search.stats.search_ms;
    stats.candidates = search.candidates.size();

    t0 = Clock::now();
    struct Piece {
        Index edge;
        double t0;
        double t1;
        Index cell;
    };
    std::vector<Piece> pieces;
    for (const CandidatePair& pair : search.candidates.pairs()) {
        double a = 0.0, b = 0.0;
        if (clip_to_triangle(edges[pair.edge_id], cell_domain(field, pair.cell_id), a, b))
            pieces.push_back({pair.edge_id, a, b, pair.cell_id});
    }
    std::sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) {
        if (x.edge != y.edge)
            return x.edge < y.edge;
        if (x.t0 != y.t0)
            return x.t0 < y.t0;
        if (x.t1 != y.t1)
            return x.t1 < y.t1;
        return x.cell < y.cell;
    });

    constexpr double same_param = 1e-12;
    const Piece* last = nullptr;
    for (const Piece& piece : pieces) {
        // A piece running along an edge shared by two cells appears twice.
        if (last && last->edge == piece.edge && std::fabs(last->t0 - piece.t0) <= same_param &&
            std::fabs(last->t1 - piece.t1) <= same_param)
            continue;
        const Segment& e = edges[piece.edge];
        const Point2 p = e.a + piece.t0 * (e.b - e.a);
        const Point2 q = e.a + piece.t1 * (e.b - e.a);
        if (distance(p, q) <= kMinSegmentLength)
            continue;
        last = &piece;
        const Segment image{evaluate(field, piece.cell, p), evaluate(field, piece.cell, q)};
        if (image.a == image.b)
            continue;
        out.segments.push_back({image, piece.cell, piece.edge, piece.t0, piece.t1});
    }
    stats.true_positives = out.segments.size();
    stats.extract_ms = elapsed_ms(t0);
    stats.candidates = std::max<std::uint64_t>(stats.candidates, stats.true_positives);
    stats.finalize();
    return out;
}

QueryResult field_equivalence(const BivariateField& field, const ControlPolygon& domain_polyline,
                              const SearchConfig& config, const Bvh* reuse_cells, const Bvh* reuse_domain_cells) {
    const auto start = Clock::now();
    const ImagePolyline image = image_of_domain_polyline(field, domain_polyline, reuse_domain_cells, config.recursion);

    QueryResult result;
    ControlPolygon fscp(chain_segments(image.codomain_segments()));
    if (fscp.edge_count() > 0) {
        result = run_query(field, fscp, config, reuse_cells);
    } else {
        result.polygon_used = fscp;
        result.stats.finalize();
    }

    QueryStats& stats = result.stats;
    stats.nit_box_box += image.stats.nit_box_box;
    stats.nit_seg_box += image.stats.nit_seg_box;
    stats.build_cells_ms += image.stats.build_cells_ms;
    stats.build_edges_ms += image.stats.build_edges_ms;
    stats.search_ms += image.stats.search_ms;
    stats.extract_ms += image.stats.extract_ms;
    stats.finalize();
    stats.total_ms = elapsed_ms(start);
    result.fiber_lines.stats = stats;
    return result;
}

} // namespace fiberline
