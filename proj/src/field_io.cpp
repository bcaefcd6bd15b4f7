#include "fiberline/error.hpp"
#include "fiberline/field.hpp"
#include "fiberline/text_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace fiberline {

namespace {

BivariateField parse_native(LineReader& in) {
    auto header = in.next_record();
    if (!header || header->size() != 3 || (*header)[0] != "bvf2")
        throw ParseError("expected header 'bvf2 <nv> <nt>'", in.line_number());
    const auto nv = parse_count((*header)[1], in.line_number());
    const auto nt = parse_count((*header)[2], in.line_number());

    std::vector<Point2> verts;
    std::vector<Point2> values;
    verts.reserve(nv);
    values.reserve(nv);
    for (std::size_t i = 0; i < nv; ++i) {
        auto row = in.next_record();
        if (!row || row->size() != 4)
            throw ParseError("expected vertex row 'x y u v'", in.line_number());
        verts.push_back({parse_real((*row)[0], in.line_number()), parse_real((*row)[1], in.line_number())});
        values.push_back({parse_real((*row)[2], in.line_number()), parse_real((*row)[3], in.line_number())});
    }

    std::vector<Triangle> tris;
    tris.reserve(nt);
    for (std::size_t i = 0; i < nt; ++i) {
        auto row = in.next_record();
        if (!row || row->size() != 3)
            throw ParseError("expected triangle row 'i j k'", in.line_number());
        Triangle t{};
        for (int k = 0; k < 3; ++k) {
            const auto idx = parse_count((*row)[k], in.line_number());
            if (idx >= nv)
                throw ValidationError("line " + std::to_string(in.line_number()) + ": vertex index " +
                                      std::to_string(idx) + " out of range (nv = " + std::to_string(nv) + ")");
            t[k] = static_cast<Index>(idx);
        }
        tris.push_back(t);
    }
    if (in.next_record())
        throw ParseError("trailing data after last triangle", in.line_number());
    return {std::move(verts), std::move(values), std::move(tris)};
}

BivariateField parse_grid(LineReader& in) {
    auto header = in.next_record();
    if (!header || header->size() != 7 || (*header)[0] != "grid")
        throw ParseError("expected header 'grid <nx> <ny> <x0> <y0> <dx> <dy>'", in.line_number());
    const std::size_t line = in.line_number();
    const auto nx = parse_count((*header)[1], line);
    const auto ny = parse_count((*header)[2], line);
    const Point2 origin{parse_real((*header)[3], line), parse_real((*header)[4], line)};
    const Point2 spacing{parse_real((*header)[5], line), parse_real((*header)[6], line)};
    if (nx < 2 || ny < 2)
        throw ValidationError("grid needs nx, ny >= 2");
    if (!(spacing.x != 0.0 && spacing.y != 0.0))
        throw ValidationError("grid spacing must be nonzero");

    std::vector<Point2> values;
    values.reserve(nx * ny);
    for (std::size_t i = 0; i < nx * ny; ++i) {
        auto row = in.next_record();
        if (!row || row->size() != 2)
            throw ParseError("expected value row 'u v'", in.line_number());
        values.push_back({parse_real((*row)[0], in.line_number()), parse_real((*row)[1], in.line_number())});
    }
    if (in.next_record())
        throw ParseError("trailing data after last grid value", in.line_number());
    return {grid_vertices(nx, ny, origin, spacing), std::move(values), grid_triangles(nx, ny)};
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw IoError("read failed: " + path.string());
    return std::move(buf).str();
}

} // namespace

BivariateField parse_field(std::string_view text, FieldFormat format) {
    LineReader in(text);
    return format == FieldFormat::native ? parse_native(in) : parse_grid(in);
}

BivariateField load_field(const std::filesystem::path& path, FieldFormat format) {
    return parse_field(read_file(path), format);
}

BivariateField load_field(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    LineReader probe(text);
    auto first = probe.next_record();
    if (first && !first->empty() && (*first)[0] == "grid")
        return parse_field(text, FieldFormat::grid);
    return parse_field(text, FieldFormat::native);
}

std::string format_native(const BivariateField& field) {
    std::string out = "bvf2 " + std::to_string(field.vertex_count()) + " " +
                      std::to_string(field.cell_count()) + "\n";
    const auto verts = field.vertices();
    const auto values = field.values();
    for (std::size_t i = 0; i < verts.size(); ++i) {
        out += format_real(verts[i].x) + ' ' + format_real(verts[i].y) + ' ' + format_real(values[i].x) +
               ' ' + format_real(values[i].y) + '\n';
    }
    for (const Triangle& t : field.triangles())
        out += std::to_string(t[0]) + ' ' + std::to_string(t[1]) + ' ' + std::to_string(t[2]) + '\n';
    return out;
}

void save_native(const BivariateField& field, const std::filesystem::path& path) {
    write_file(path, format_native(field));
}

} // namespace fiberline
