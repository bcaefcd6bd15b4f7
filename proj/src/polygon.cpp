#include "fiberline/polygon.hpp"

#include "fiberline/error.hpp"
#include "fiberline/text_io.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace fiberline {

namespace {

void append_edges(const Polyline& chain, std::vector<Segment>& edges) {
    const auto& v = chain.vertices;
    if (v.size() < 2)
        return;
    for (std::size_t i = 0; i + 1 < v.size(); ++i)
        if (v[i] != v[i + 1])
            edges.push_back({v[i], v[i + 1]});
    if (chain.closed && v.back() != v.front())
        edges.push_back({v.back(), v.front()});
}

} // namespace

ControlPolygon::ControlPolygon(std::vector<Point2> vertices, bool closed)
    : ControlPolygon(std::vector<Polyline>{Polyline{std::move(vertices), closed}}) {}

ControlPolygon::ControlPolygon(std::vector<Polyline> chains) : chains_(std::move(chains)) {
    for (const Polyline& chain : chains_) {
        for (Point2 p : chain.vertices)
            if (!is_finite(p))
                throw ValidationError("non-finite polygon vertex");
        append_edges(chain, edges_);
    }
}

std::vector<Point2> ControlPolygon::vertices() const {
    std::vector<Point2> all;
    for (const Polyline& chain : chains_)
        all.insert(all.end(), chain.vertices.begin(), chain.vertices.end());
    return all;
}

Aabb ControlPolygon::bounds() const {
    Aabb box = Aabb::empty();
    for (const Polyline& chain : chains_)
        box = Aabb::unite(box, aabb_of_points(chain.vertices.data(), chain.vertices.data() + chain.vertices.size()));
    return box;
}

ControlPolygon ControlPolygon::translated(Point2 offset) const {
    std::vector<Polyline> moved = chains_;
    for (Polyline& chain : moved)
        for (Point2& p : chain.vertices)
            p = p + offset;
    return ControlPolygon(std::move(moved));
}

ControlPolygon ControlPolygon::scaled(Point2 pivot, double factor) const {
    std::vector<Polyline> moved = chains_;
    for (Polyline& chain : moved)
        for (Point2& p : chain.vertices)
            p = pivot + factor * (p - pivot);
    return ControlPolygon(std::move(moved));
}

ControlPolygon ControlPolygon::deduplicated() const {
    std::vector<Polyline> clean;
    clean.reserve(chains_.size());
    for (const Polyline& chain : chains_) {
        Polyline out{{}, chain.closed};
        for (Point2 p : chain.vertices)
            if (out.vertices.empty() || out.vertices.back() != p)
                out.vertices.push_back(p);
        if (out.closed && out.vertices.size() > 1 && out.vertices.back() == out.vertices.front())
            out.vertices.pop_back();
        clean.push_back(std::move(out));
    }
    return ControlPolygon(std::move(clean));
}

ControlPolygon gen_polygon(PolygonShape shape, std::size_t edge_count, Point2 center, double radius,
                           double inner_radius) {
    if (edge_count < 3)
        throw ValidationError("polygon needs at least 3 edges, got " + std::to_string(edge_count));
    if (!(radius > 0.0))
        throw ValidationError("polygon radius must be positive");
    if (shape == PolygonShape::star) {
        if (edge_count % 2 != 0)
            throw ValidationError("star polygon needs an even edge count");
        if (!(inner_radius > 0.0))
            throw ValidationError("star polygon needs a positive inner radius");
    }

    std::vector<Point2> verts;
    verts.reserve(edge_count);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(edge_count);
    for (std::size_t k = 0; k < edge_count; ++k) {
        const double r = (shape == PolygonShape::star && k % 2 == 1) ? inner_radius : radius;
        const double angle = step * static_cast<double>(k);
        verts.push_back({center.x + r * std::cos(angle), center.y + r * std::sin(angle)});
    }
    return {std::move(verts), true};
}

std::vector<ControlPolygon> benchmark_polygons(Point2 center, double radius) {
    std::vector<ControlPolygon> family;
    for (std::size_t n : kBenchmarkPolygonSizes) {
        if (n < 8)
            family.push_back(gen_polygon(PolygonShape::ngon, n, center, radius));
        else if (n % 2 == 0)
            family.push_back(gen_polygon(PolygonShape::star, n, center, radius, 0.6 * radius));
        else
            family.push_back(gen_polygon(PolygonShape::circle_approx, n, center, radius));
    }
    return family;
}

ControlPolygon parse_polygon(std::string_view text) {
    LineReader in(text);
    auto header = in.next_record();
    if (!header || header->size() != 3 || (*header)[0] != "poly")
        throw ParseError("expected header 'poly <n> <closed|open>'", in.line_number());
    const std::size_t n = parse_count((*header)[1], in.line_number());
    const std::string_view flag = (*header)[2];
    if (flag != "closed" && flag != "open")
        throw ParseError("polygon flag must be 'closed' or 'open'", in.line_number());

    std::vector<Point2> verts;
    verts.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = in.next_record();
        if (!row || row->size() != 2)
            throw ParseError("expected vertex row 'u v'", in.line_number());
        verts.push_back({parse_real((*row)[0], in.line_number()), parse_real((*row)[1], in.line_number())});
    }
    if (in.next_record())
        throw ParseError("trailing data after last polygon vertex", in.line_number());
    return {std::move(verts), flag == "closed"};
}

ControlPolygon load_polygon(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_polygon(buf.str());
}

std::string format_polygon(const ControlPolygon& polygon) {
    if (polygon.chains().size() != 1)
        throw ValidationError("polygon file format holds exactly one chain");
    const Polyline& chain = polygon.chains().front();
    std::string out = "poly " + std::to_string(chain.vertices.size()) + (chain.closed ? " closed\n" : " open\n");
    for (Point2 p : chain.vertices)
        out += format_real(p.x) + ' ' + format_real(p.y) + '\n';
    return out;
}

void save_polygon(const ControlPolygon& polygon, const std::filesystem::path& path) {
    write_file(path, format_polygon(polygon));
}

} // namespace fiberline
