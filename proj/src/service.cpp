#include "fiberline/service.hpp"

#include "fiberline/error.hpp"
#include "fiberline/pipeline.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>

namespace fiberline {

using nlohmann::json;

namespace {

constexpr std::size_t kMinRes = 16;
constexpr std::size_t kMaxRes = 2048;

// Request errors that map to 400.
struct BadRequest : Error {
    using Error::Error;
};

json point_json(Point2 p) { return json::array({p.x, p.y}); }

json box_json(const Aabb& b) { return {{"min", point_json(b.min)}, {"max", point_json(b.max)}}; }

json stats_json(const QueryStats& s) {
    return {{"nit_box_box", s.nit_box_box},
            {"nit_seg_box", s.nit_seg_box},
            {"nit_total", s.nit_total},
            {"candidates", s.candidates},
            {"true_positives", s.true_positives},
            {"tpap", s.tpap},
            {"build_cells_ms", s.build_cells_ms},
            {"build_edges_ms", s.build_edges_ms},
            {"search_ms", s.search_ms},
            {"extract_ms", s.extract_ms},
            {"total_ms", s.total_ms},
            {"degenerate_cells", s.degenerate_cells}};
}

json chains_json(const ControlPolygon& polygon) {
    json chains = json::array();
    for (const Polyline& chain : polygon.chains()) {
        json vertices = json::array();
        for (Point2 p : chain.vertices)
            vertices.push_back(point_json(p));
        chains.push_back({{"vertices", std::move(vertices)}, {"closed", chain.closed}});
    }
    return {{"chains", std::move(chains)}, {"edge_count", polygon.edge_count()}};
}

json segments_json(std::span<const DomainSegment> segments) {
    json out = json::array();
    for (const DomainSegment& s : segments)
        out.push_back({{"p", point_json(s.p)}, {"q", point_json(s.q)}, {"cell_id", s.cell_id}, {"edge_id", s.edge_id}});
    return out;
}

HttpReply error_reply(int status, std::string_view message) {
    return {status, json{{"error", message}}.dump()};
}

HttpReply json_reply(const json& body) { return {200, body.dump()}; }

json parse_body(std::string_view body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw BadRequest("request body must be a JSON object");
    return j;
}

Point2 parse_point(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw BadRequest("a vertex must be a [x, y] pair of numbers");
    return {j[0].get<double>(), j[1].get<double>()};
}

ControlPolygon parse_polygon_json(const json& j) {
    if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
        throw BadRequest("polygon needs a vertices array");
    std::vector<Point2> vertices;
    for (const json& v : j["vertices"])
        vertices.push_back(parse_point(v));
    bool closed = true;
    if (j.contains("closed")) {
        if (!j["closed"].is_boolean())
            throw BadRequest("closed must be a boolean");
        closed = j["closed"].get<bool>();
    }
    return ControlPolygon(std::move(vertices), closed);
}

std::size_t parse_leaf(const json& j, const char* key, std::size_t fallback) {
    if (!j.contains(key))
        return fallback;
    if (!j[key].is_number_integer() || j[key].get<long long>() < 1)
        throw BadRequest(std::string(key) + " must be a positive integer");
    return j[key].get<std::size_t>();
}

SearchConfig parse_config(const json& j) {
    Method method = Method::hybrid;
    if (j.contains("method")) {
        const auto m = j["method"].is_string() ? parse_method(j["method"].get<std::string>()) : std::nullopt;
        if (!m)
            throw BadRequest("method must be one of naive, single, dual, hybrid");
        method = *m;
    }
    SearchConfig config = SearchConfig::defaults_for(method);
    if (j.contains("recursion")) {
        const auto r = j["recursion"].is_string() ? parse_recursion(j["recursion"].get<std::string>()) : std::nullopt;
        if (!r)
            throw BadRequest("recursion must be one of area, height, cells-first, edges-first");
        config.recursion = *r;
    }
    config.leaf_cells = parse_leaf(j, "leaf_cells", config.leaf_cells);
    config.leaf_edges = parse_leaf(j, "leaf_edges", config.leaf_edges);
    return config;
}

template <class Handler>
HttpReply guarded(Handler&& handler) {
    try {
        return handler();
    } catch (const BadRequest& e) {
        return error_reply(400, e.what());
    } catch (const InvalidPolygon& e) {
        return error_reply(422, e.what());
    } catch (const ValidationError& e) {
        return error_reply(400, e.what());
    } catch (const json::exception& e) {
        return error_reply(400, e.what());
    } catch (const std::exception& e) {
        return error_reply(500, e.what());
    }
}

} // namespace

Dataset::Dataset(std::string id, BivariateField field)
    : id_(std::move(id)), field_(std::move(field)), domain_cells_(build_domain_cells(field_, 1)) {
    // Leaf sizes of the benchmarked defaults are ready before the first request.
    for (std::size_t leaf : {1, 8})
        cells_.emplace(leaf, std::make_unique<Bvh>(build_cells(field_, leaf)));
}

const Bvh& Dataset::cells(std::size_t leaf_size) const {
    std::lock_guard lock(mutex_);
    auto& slot = cells_[leaf_size];
    if (!slot)
        slot = std::make_unique<Bvh>(build_cells(field_, leaf_size));
    return *slot;
}

Service Service::from_directory(const std::filesystem::path& data_dir) {
    std::error_code ec;
    std::filesystem::directory_iterator it(data_dir, ec);
    if (ec)
        throw IoError("cannot read data directory " + data_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : it) {
        const auto ext = entry.path().extension();
        if (entry.is_regular_file() && (ext == ".bvf2" || ext == ".grid"))
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<std::shared_ptr<const Dataset>> datasets;
    for (const auto& path : files)
        datasets.push_back(std::make_shared<const Dataset>(path.stem().string(), load_field(path)));
    return Service(std::move(datasets));
}

Service::Service(std::vector<std::shared_ptr<const Dataset>> datasets) {
    for (auto& d : datasets) {
        const std::string id = d->id();
        if (!datasets_.emplace(id, std::move(d)).second)
            throw ValidationError("duplicate dataset id " + id);
    }
}

const Dataset* Service::find(std::string_view id) const {
    const auto it = datasets_.find(id);
    return it == datasets_.end() ? nullptr : it->second.get();
}

HttpReply Service::list_datasets() const {
    json list = json::array();
    for (const auto& [id, d] : datasets_)
        list.push_back({{"id", id},
                        {"cells", d->field().cell_count()},
                        {"vertices", d->field().vertex_count()},
                        {"domain_box", box_json(d->field().domain_box())},
                        {"codomain_box", box_json(d->field().codomain_box())}});
    return json_reply(list);
}

std::vector<std::uint8_t> density_raster(const BivariateField& field, std::size_t res) {
    if (res < kMinRes || res > kMaxRes)
        throw ValidationError("res must be within [16, 2048]");
    Aabb range = field.codomain_box();
    if (!(range.width() > 0.0)) {
        range.min.x -= 0.5;
        range.max.x += 0.5;
    }
    if (!(range.height() > 0.0)) {
        range.min.y -= 0.5;
        range.max.y += 0.5;
    }
    const double n = static_cast<double>(res);
    auto column = [&](double x) {
        const double f = std::floor((x - range.min.x) / range.width() * n);
        return static_cast<std::size_t>(std::clamp(f, 0.0, n - 1.0));
    };
    auto band = [&](double v) {
        const double f = std::floor((v - range.min.y) / range.height() * n);
        return static_cast<std::size_t>(std::clamp(f, 0.0, n - 1.0));
    };

    // Summed-area accumulation of one rectangle per cell.
    std::vector<std::int64_t> diff((res + 1) * (res + 1), 0);
    const auto& c = field.image_columns();
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Aabb box = aabb_of_triangle({c.x0[i], c.y0[i]}, {c.x1[i], c.y1[i]}, {c.x2[i], c.y2[i]});
        const std::size_t x0 = column(box.min.x), x1 = column(box.max.x) + 1;
        const std::size_t y0 = band(box.min.y), y1 = band(box.max.y) + 1;
        diff[y0 * (res + 1) + x0] += 1;
        diff[y0 * (res + 1) + x1] -= 1;
        diff[y1 * (res + 1) + x0] -= 1;
        diff[y1 * (res + 1) + x1] += 1;
    }
    std::vector<std::int64_t> count(res * res, 0);
    std::int64_t peak = 0;
    for (std::size_t y = 0; y < res; ++y)
        for (std::size_t x = 0; x < res; ++x) {
            std::int64_t v = diff[y * (res + 1) + x];
            if (x > 0)
                v += count[y * res + x - 1];
            if (y > 0)
                v += count[(y - 1) * res + x];
            if (x > 0 && y > 0)
                v -= count[(y - 1) * res + x - 1];
            count[y * res + x] = v;
            peak = std::max(peak, v);
        }

    std::vector<std::uint8_t> pixels(res * res, 0);
    for (std::size_t y = 0; y < res; ++y)
        for (std::size_t x = 0; x < res; ++x) {
            const std::int64_t v = count[y * res + x];
            if (v == 0)
                continue;
            // Any covered pixel stays visible.
            const auto level = std::max<std::int64_t>(1, (v * 255 + peak / 2) / peak);
            pixels[(res - 1 - y) * res + x] = static_cast<std::uint8_t>(level);
        }
    return pixels;
}

HttpReply Service::density(std::string_view id, std::string_view res_text) const {
    const Dataset* d = find(id);
    if (!d)
        return error_reply(404, "unknown dataset");
    std::size_t res = 0;
    const auto [end, ec] = std::from_chars(res_text.data(), res_text.data() + res_text.size(), res);
    if (ec != std::errc() || end != res_text.data() + res_text.size() || res < kMinRes || res > kMaxRes)
        return error_reply(400, "res must be an integer within [16, 2048]");
    const auto pixels = density_raster(d->field(), res);
    return json_reply({{"width", res},
                       {"height", res},
                       {"format", "gray8"},
                       {"encoding", "base64"},
                       {"codomain_box", box_json(d->field().codomain_box())},
                       {"data", httplib::detail::base64_encode(std::string(pixels.begin(), pixels.end()))}});
}

HttpReply Service::extract(std::string_view id, std::string_view body) const {
    const Dataset* d = find(id);
    if (!d)
        return error_reply(404, "unknown dataset");
    return guarded([&] {
        const json request = parse_body(body);
        const SearchConfig config = parse_config(request);
        const bool equivalence = request.value("equivalence", false);
        const Bvh* cells = config.method == Method::naive ? nullptr : &d->cells(config.leaf_cells);

        QueryResult result;
        if (equivalence) {
            if (!request.contains("domain_polygon"))
                throw BadRequest("equivalence needs a domain_polygon");
            const ControlPolygon domain = parse_polygon_json(request["domain_polygon"]);
            if (domain.edge_count() == 0)
                throw InvalidPolygon("domain polygon has no edge of positive length");
            result = field_equivalence(d->field(), domain, config, cells, &d->domain_cells());
        } else {
            if (!request.contains("polygon"))
                throw BadRequest("request needs a polygon");
            const ControlPolygon polygon = parse_polygon_json(request["polygon"]);
            if (polygon.edge_count() == 0)
                throw InvalidPolygon("polygon has no edge of positive length");
            result = run_query(d->field(), polygon, config, cells);
        }

        json response = {{"segments", segments_json(result.fiber_lines.segments)},
                         {"stats", stats_json(result.stats)},
                         {"method", method_name(config.method)},
                         {"recursion", recursion_name(config.recursion)},
                         {"leaf_cells", config.leaf_cells},
                         {"leaf_edges", config.leaf_edges},
                         {"equivalence", equivalence}};
        if (equivalence)
            response["image_polyline"] = chains_json(result.polygon_used);
        return json_reply(response);
    });
}

HttpReply Service::isoline(std::string_view id, std::string_view body) const {
    const Dataset* d = find(id);
    if (!d)
        return error_reply(404, "unknown dataset");
    return guarded([&] {
        const json request = parse_body(body);
        const std::string component = request.value("component", std::string("u"));
        if (component != "u" && component != "v")
            throw BadRequest("component must be u or v");
        if (!request.contains("isovalue") || !request["isovalue"].is_number())
            throw BadRequest("isovalue must be a number");
        const double iso = request["isovalue"].get<double>();
        const auto fscp = isoline_fscp(d->field(), component == "u" ? Component::u : Component::v, iso);
        return json_reply({{"component", component},
                           {"isovalue", iso},
                           {"polygon", chains_json(fscp ? *fscp : ControlPolygon())}});
    });
}

struct HttpServer::Impl {
    std::shared_ptr<const Service> service;
    httplib::Server server;
    bool bound = false;
};

namespace {

void send(httplib::Response& res, const HttpReply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, reply.content_type);
}

} // namespace

HttpServer::HttpServer(std::shared_ptr<const Service> service) : impl_(std::make_unique<Impl>()) {
    impl_->service = std::move(service);
    auto& server = impl_->server;
    const Service& svc = *impl_->service;

    server.Get("/datasets", [&svc](const httplib::Request&, httplib::Response& res) { send(res, svc.list_datasets()); });
    server.Get(R"(/datasets/([^/]+)/density)", [&svc](const httplib::Request& req, httplib::Response& res) {
        send(res, svc.density(req.matches[1].str(), req.has_param("res") ? req.get_param_value("res") : "256"));
    });
    server.Post(R"(/datasets/([^/]+)/extract)", [&svc](const httplib::Request& req, httplib::Response& res) {
        send(res, svc.extract(req.matches[1].str(), req.body));
    });
    server.Post(R"(/datasets/([^/]+)/isoline)", [&svc](const httplib::Request& req, httplib::Response& res) {
        send(res, svc.isoline(req.matches[1].str(), req.body));
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty())
            res.set_content(json{{"error", httplib::status_message(res.status)}}.dump(), "application/json");
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    int bound = -1;
    if (port == 0)
        bound = impl_->server.bind_to_any_port(host);
    else if (impl_->server.bind_to_port(host, port))
        bound = port;
    impl_->bound = bound > 0;
    return bound;
}

bool HttpServer::run() { return impl_->bound && impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_ && impl_->server.is_running())
        impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

} // namespace fiberline
