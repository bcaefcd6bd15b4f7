#include "fiberline/extraction.hpp"

#include "fiberline/error.hpp"
#include "fiberline/kernels.hpp"
#include "fiberline/text_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fiberline {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Marching-triangles case split on three signed values. Returns false when the
// zero level misses the triangle; otherwise `lone` is the vertex alone on its
// side and `i`, `j` the other two in increasing order.
bool split_triangle(const double (&d)[3], int& lone, int& i, int& j) {
    const bool pos[3] = {d[0] > 0.0, d[1] > 0.0, d[2] > 0.0};
    const int npos = int(pos[0]) + int(pos[1]) + int(pos[2]);
    if (npos == 0 || npos == 3)
        return false;
    const bool lone_side = npos == 1;
    lone = pos[0] == lone_side ? 0 : (pos[1] == lone_side ? 1 : 2);
    i = lone == 0 ? 1 : 0;
    j = lone == 2 ? 1 : 2;
    return true;
}

Point2 lerp(Point2 a, Point2 b, double s) { return a + s * (b - a); }

} // namespace

std::optional<DomainSegment> extract_pair(const BivariateField& field, Index cell_id, const Segment& edge,
                                          Index edge_id, PairOutcome* outcome) {
    return extract_pair(field, cell_id, edge, LineFrame::through(edge.a, edge.b), edge_id, outcome);
}

std::optional<DomainSegment> extract_pair(const BivariateField& field, Index cell_id, const Segment& edge,
                                          const LineFrame& line, Index edge_id, PairOutcome* outcome) {
    if (outcome)
        *outcome = PairOutcome::none;
    if (cell_id >= field.cell_count())
        throw ValidationError("cell id " + std::to_string(cell_id) + " out of range");

    const Triangle& tri = field.triangles()[cell_id];
    const auto values = field.values();
    const auto verts = field.vertices();
    const Point2 img[3] = {values[tri[0]], values[tri[1]], values[tri[2]]};
    const Point2 dom[3] = {verts[tri[0]], verts[tri[1]], verts[tri[2]]};
    const double d[3] = {line.signed_distance(img[0]), line.signed_distance(img[1]), line.signed_distance(img[2])};

    if (std::fabs(d[0]) <= kDegenerateDistance && std::fabs(d[1]) <= kDegenerateDistance &&
        std::fabs(d[2]) <= kDegenerateDistance) {
        if (outcome)
            *outcome = PairOutcome::degenerate;
        return std::nullopt;
    }

    int lone = 0, i = 0, j = 0;
    if (!split_triangle(d, lone, i, j))
        return std::nullopt;

    const double si = d[lone] / (d[lone] - d[i]);
    const double sj = d[lone] / (d[lone] - d[j]);
    const Point2 ci = lerp(img[lone], img[i], si);
    const Point2 cj = lerp(img[lone], img[j], sj);
    Point2 lo_dom = lerp(dom[lone], dom[i], si);
    Point2 hi_dom = lerp(dom[lone], dom[j], sj);

    const Point2 dir = edge.b - edge.a;
    const double len2 = dot(dir, dir);
    double t_lo = dot(ci - edge.a, dir) / len2;
    double t_hi = dot(cj - edge.a, dir) / len2;
    if (t_hi < t_lo) {
        std::swap(t_lo, t_hi);
        std::swap(lo_dom, hi_dom);
    }
    if (t_hi < 0.0 || t_lo > 1.0)
        return std::nullopt;

    Point2 p = lo_dom;
    Point2 q = hi_dom;
    const double span = t_hi - t_lo;
    if (span > 0.0) {
        if (t_lo < 0.0)
            p = lerp(lo_dom, hi_dom, (0.0 - t_lo) / span);
        if (t_hi > 1.0)
            q = lerp(lo_dom, hi_dom, (1.0 - t_lo) / span);
    }
    if (distance(p, q) <= kMinSegmentLength)
        return std::nullopt;

    if (outcome)
        *outcome = PairOutcome::segment;
    return DomainSegment{p, q, cell_id, edge_id};
}

FiberLineSet extract_all(const BivariateField& field, const ControlPolygon& polygon,
                         const CandidateList& candidates) {
    return extract_all(field, polygon.edges(), candidates);
}

FiberLineSet extract_all(const BivariateField& field, std::span<const Segment> edges,
                         const CandidateList& candidates) {
    const auto start = Clock::now();
    FiberLineSet out;
    QueryStats& stats = out.stats;
    stats.candidates = candidates.size();

    std::vector<LineFrame> frames;
    frames.reserve(edges.size());
    for (const Segment& e : edges)
        frames.push_back(LineFrame::through(e.a, e.b));

    auto run = [&](Index cell, Index edge) {
        PairOutcome outcome = PairOutcome::none;
        auto seg = extract_pair(field, cell, edges[edge], frames[edge], edge, &outcome);
        if (seg) {
            out.segments.push_back(*seg);
            ++stats.true_positives;
        } else if (outcome == PairOutcome::degenerate) {
            ++stats.degenerate_cells;
        }
    };

    if (candidates.dense()) {
        if (candidates.dense_cells() != field.cell_count() || candidates.dense_edges() != edges.size())
            throw ValidationError("dense candidate list does not match field and polygon");
        std::vector<Index> hits;
        for (std::size_t e = 0; e < edges.size(); ++e) {
            hits.clear();
            kernels::select_straddling(field.image_columns(), frames[e], kDegenerateDistance, hits);
            for (Index c : hits)
                run(c, static_cast<Index>(e));
        }
        std::sort(out.segments.begin(), out.segments.end(), [](const DomainSegment& a, const DomainSegment& b) {
            return a.cell_id != b.cell_id ? a.cell_id < b.cell_id : a.edge_id < b.edge_id;
        });
    } else {
        for (const CandidatePair& pair : candidates.pairs()) {
            if (pair.cell_id >= field.cell_count() || pair.edge_id >= edges.size())
                throw ValidationError("candidate (" + std::to_string(pair.cell_id) + ", " +
                                      std::to_string(pair.edge_id) + ") out of range");
            run(pair.cell_id, pair.edge_id);
        }
    }

    stats.finalize();
    stats.extract_ms = elapsed_ms(start);
    return out;
}

std::vector<DomainSegment> extract_isoline(const BivariateField& field, Component component, double isovalue) {
    std::vector<DomainSegment> out;
    const auto values = field.values();
    const auto verts = field.vertices();
    const auto tris = field.triangles();
    for (std::size_t c = 0; c < tris.size(); ++c) {
        const Triangle& tri = tris[c];
        double d[3];
        for (int k = 0; k < 3; ++k) {
            const Point2 v = values[tri[k]];
            d[k] = (component == Component::u ? v.x : v.y) - isovalue;
        }
        int lone = 0, i = 0, j = 0;
        if (!split_triangle(d, lone, i, j))
            continue;
        const Point2 p = lerp(verts[tri[lone]], verts[tri[i]], d[lone] / (d[lone] - d[i]));
        const Point2 q = lerp(verts[tri[lone]], verts[tri[j]], d[lone] / (d[lone] - d[j]));
        if (distance(p, q) > kMinSegmentLength)
            out.push_back({p, q, static_cast<Index>(c), 0});
    }
    return out;
}

std::string format_fiber_csv(std::span<const DomainSegment> segments) {
    std::string out = "cell_id,edge_id,px,py,qx,qy\n";
    for (const DomainSegment& s : segments) {
        out += std::to_string(s.cell_id) + ',' + std::to_string(s.edge_id) + ',' + format_real(s.p.x) + ',' +
               format_real(s.p.y) + ',' + format_real(s.q.x) + ',' + format_real(s.q.y) + '\n';
    }
    return out;
}

void save_fiber_csv(std::span<const DomainSegment> segments, const std::filesystem::path& path) {
    write_file(path, format_fiber_csv(segments));
}

} // namespace fiberline
