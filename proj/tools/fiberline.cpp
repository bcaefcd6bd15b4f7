#include "fiberline/bench.hpp"
#include "fiberline/error.hpp"
#include "fiberline/extraction.hpp"
#include "fiberline/field.hpp"
#include "fiberline/pipeline.hpp"
#include "fiberline/polygon.hpp"
#include "fiberline/service.hpp"
#include "fiberline/text_io.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <pthread.h>
#include <thread>
#include <unistd.h>
#include <cstdio>
#include <iostream>

using namespace fiberline;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Flag combinations CLI11 cannot express.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GenOptions {
    std::size_t nx = 256;
    std::size_t ny = 128;
    double time = 0.0;
    std::vector<double> domain{0.0, 0.0, 1.0, 1.0};
    std::string shape = "ngon";
    std::size_t edges = 60;
    std::vector<double> center{0.0, 0.0};
    double radius = 1.0;
    double inner = 0.0;
    std::string out;
};

struct ExtractOptions {
    std::string mesh;
    std::string polygon;
    std::string method = "hybrid";
    std::string recursion = "area";
    std::size_t leaf_cells = 0;
    std::size_t leaf_edges = 1;
    bool equivalence = false;
    std::string out;
};

struct BenchOptionsCli {
    int bench_case = 1;
    std::uint64_t seed = 1;
    std::size_t placements = 0;
    std::string mesh;
    std::size_t nx = 256;
    std::size_t ny = 128;
    std::vector<std::string> methods{"naive", "single", "dual", "hybrid"};
    std::string recursion = "area";
    std::vector<std::size_t> edges;
    std::size_t isovalues = 1001;
    std::string component = "u";
    std::size_t repeat = 1;
    std::size_t threads = 1;
    std::string out;
};

struct ServeOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string data = ".";
};

SearchConfig make_config(const std::string& method_text, const std::string& recursion_text, std::size_t leaf_cells,
                         std::size_t leaf_edges) {
    const auto method = parse_method(method_text);
    const auto recursion = parse_recursion(recursion_text);
    if (!method)
        throw UsageError("unknown method '" + method_text + "'");
    if (!recursion)
        throw UsageError("unknown recursion '" + recursion_text + "'");
    SearchConfig config = SearchConfig::defaults_for(*method);
    config.recursion = *recursion;
    if (leaf_cells > 0)
        config.leaf_cells = leaf_cells;
    config.leaf_edges = leaf_edges;
    return config;
}

int cmd_gen(const std::string& kind, const GenOptions& o) {
    if (kind == "polygon") {
        PolygonShape shape = PolygonShape::ngon;
        if (o.shape == "star")
            shape = PolygonShape::star;
        else if (o.shape == "circle")
            shape = PolygonShape::circle_approx;
        else if (o.shape != "ngon")
            throw UsageError("unknown shape '" + o.shape + "'");
        if (o.inner != 0.0 && shape != PolygonShape::star)
            throw UsageError("--inner applies to --shape star only");
        const double inner = shape == PolygonShape::star && o.inner == 0.0 ? 0.6 * o.radius : o.inner;
        ControlPolygon polygon;
        try {
            polygon = gen_polygon(shape, o.edges, {o.center[0], o.center[1]}, o.radius, inner);
        } catch (const ValidationError& e) {
            throw UsageError(e.what());
        }
        save_polygon(polygon, o.out);
        std::cout << "edges=" << polygon.edge_count() << "\n";
        return 0;
    }

    BivariateField field;
    try {
        if (kind == "doublegyre") {
            DoubleGyreParams params;
            params.t = o.time;
            field = gen_double_gyre(o.nx, o.ny, params);
        } else {
            const Aabb domain{{o.domain[0], o.domain[1]}, {o.domain[2], o.domain[3]}};
            field = gen_identity(o.nx, o.ny, domain);
        }
    } catch (const ValidationError& e) {
        throw UsageError(e.what());
    }
    save_native(field, o.out);
    std::cout << "cells=" << field.cell_count() << "\nvertices=" << field.vertex_count() << "\n";
    return 0;
}

int cmd_extract(const ExtractOptions& o) {
    const SearchConfig config = make_config(o.method, o.recursion, o.leaf_cells, o.leaf_edges);
    const BivariateField field = load_field(o.mesh);
    const ControlPolygon polygon = load_polygon(o.polygon);
    const QueryResult result =
        o.equivalence ? field_equivalence(field, polygon, config) : run_query(field, polygon, config);
    if (!o.out.empty())
        save_fiber_csv(result.fiber_lines.segments, o.out);
    std::cout << "method=" << method_name(config.method) << "\nrecursion=" << recursion_name(config.recursion)
              << "\nleaf_cells=" << config.leaf_cells << "\nleaf_edges=" << config.leaf_edges
              << "\nsegments=" << result.fiber_lines.segments.size() << "\n"
              << to_key_value(result.stats);
    return 0;
}

int cmd_bench(const BenchOptionsCli& o) {
    std::vector<SearchConfig> configs;
    for (const std::string& m : o.methods)
        configs.push_back(make_config(m, o.recursion, 0, 1));

    BenchOptions options;
    options.repeat = std::max<std::size_t>(o.repeat, 1);
    options.threads = std::max<std::size_t>(o.threads, 1);
    BivariateField field;
    if (o.mesh.empty()) {
        field = gen_double_gyre(o.nx, o.ny);
        options.dataset_id = "doublegyre_" + std::to_string(o.nx) + "x" + std::to_string(o.ny);
    } else {
        field = load_field(o.mesh);
        options.dataset_id = std::filesystem::path(o.mesh).stem().string();
    }

    BenchRun run;
    if (o.bench_case == 1) {
        const Aabb range = field.codomain_box();
        const double radius = 0.25 * std::min(range.width(), range.height());
        std::vector<ControlPolygon> polygons = benchmark_polygons({0.0, 0.0}, radius > 0.0 ? radius : 1.0);
        if (!o.edges.empty()) {
            std::vector<ControlPolygon> chosen;
            for (const ControlPolygon& p : polygons)
                if (std::find(o.edges.begin(), o.edges.end(), p.edge_count()) != o.edges.end())
                    chosen.push_back(p);
            if (chosen.empty())
                throw UsageError("--edges matches no benchmark polygon");
            polygons = std::move(chosen);
        }
        run = run_case1(field, polygons, o.placements ? o.placements : 205, o.seed, configs, options);
    } else if (o.bench_case == 2) {
        const Component comp = o.component == "v" ? Component::v : Component::u;
        const auto isovalues = uniform_isovalues(field, comp, o.isovalues);
        run = run_case2(field, isovalues, comp, configs, options);
    } else {
        const ControlPolygon base = gen_polygon(PolygonShape::star, 60, {0.0, 0.0}, 1.0, 0.6);
        run = run_case3(field, o.placements ? o.placements : 101, o.seed, base, configs, options);
    }

    if (o.out.empty())
        std::cout << format_report(run);
    else
        report(run, o.out);
    std::cerr << "rows=" << run.rows.size() << " mismatched_placements=" << run.mismatched_placements << "\n";
    return run.mismatched_placements == 0 ? 0 : kExitRuntime;
}

int cmd_serve(const ServeOptions& o) {
    // Signals go to a watcher thread, so a stop request arriving before the
    // accept loop starts is not lost.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto service = std::make_shared<const Service>(Service::from_directory(o.data));
    HttpServer server(service);
    const int port = server.bind(o.host, o.port);
    if (port <= 0) {
        std::cerr << "fiberline: cannot bind " << o.host << ":" << o.port << "\n";
        return kExitRuntime;
    }
    std::jthread watcher([&server, signals] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.wait_until_ready();
        server.stop();
    });
    std::cout << "listening on http://" << o.host << ":" << port << " (" << service->dataset_count()
              << " datasets)" << std::endl;
    const bool ok = server.run();
    // Release the watcher if the loop ended on its own.
    kill(getpid(), SIGTERM);
    return ok ? 0 : kExitRuntime;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fiber-line extraction on bivariate triangle meshes"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a mesh or a control polygon");
    gen_cmd->require_subcommand(1);
    auto* gen_dg = gen_cmd->add_subcommand("doublegyre", "Double Gyre vector field on a regular grid");
    gen_dg->add_option("--nx", gen.nx, "Grid vertices along x")->capture_default_str();
    gen_dg->add_option("--ny", gen.ny, "Grid vertices along y")->capture_default_str();
    gen_dg->add_option("--time", gen.time, "Time parameter")->capture_default_str();
    gen_dg->add_option("--out", gen.out, "Output mesh file")->required();
    auto* gen_id = gen_cmd->add_subcommand("identity", "Identity field f(x, y) = (x, y)");
    gen_id->add_option("--nx", gen.nx)->capture_default_str();
    gen_id->add_option("--ny", gen.ny)->capture_default_str();
    gen_id->add_option("--domain", gen.domain, "x0 y0 x1 y1")->expected(4);
    gen_id->add_option("--out", gen.out, "Output mesh file")->required();
    auto* gen_poly = gen_cmd->add_subcommand("polygon", "Closed control polygon");
    gen_poly->add_option("--shape", gen.shape, "ngon, star or circle")->capture_default_str();
    gen_poly->add_option("--edges", gen.edges)->capture_default_str();
    gen_poly->add_option("--center", gen.center, "x y")->expected(2);
    gen_poly->add_option("--radius", gen.radius)->capture_default_str();
    gen_poly->add_option("--inner", gen.inner, "Inner radius of a star (default 0.6 * radius)");
    gen_poly->add_option("--out", gen.out, "Output polygon file")->required();

    ExtractOptions ex;
    auto* ex_cmd = app.add_subcommand("extract", "Extract fiber lines of a control polygon");
    ex_cmd->add_option("--mesh", ex.mesh, "Mesh file (bvf2 or grid)")->required();
    ex_cmd->add_option("--polygon", ex.polygon, "Polygon file")->required();
    ex_cmd->add_option("--method", ex.method, "naive, single, dual or hybrid")->capture_default_str();
    ex_cmd->add_option("--recursion", ex.recursion, "area, height, cells-first or edges-first")
        ->capture_default_str();
    ex_cmd->add_option("--leaf-cells", ex.leaf_cells, "Cells per leaf (default 8 for single, else 1)");
    ex_cmd->add_option("--leaf-edges", ex.leaf_edges)->capture_default_str();
    ex_cmd->add_flag("--equivalence", ex.equivalence, "Treat the polygon as a domain polyline");
    ex_cmd->add_option("--out", ex.out, "Fiber-line CSV");

    BenchOptionsCli bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run an evaluation case and write CSV");
    bench_cmd->add_option("--case", bench.bench_case)->required()->check(CLI::IsMember({1, 2, 3}));
    bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
    bench_cmd->add_option("--placements", bench.placements, "Placements (default 205 for case 1, 101 for case 3)");
    bench_cmd->add_option("--mesh", bench.mesh, "Mesh file (default: generated Double Gyre)");
    bench_cmd->add_option("--nx", bench.nx)->capture_default_str();
    bench_cmd->add_option("--ny", bench.ny)->capture_default_str();
    bench_cmd->add_option("--methods", bench.methods)->capture_default_str();
    bench_cmd->add_option("--recursion", bench.recursion)->capture_default_str();
    bench_cmd->add_option("--edges", bench.edges, "Case 1: restrict to these polygon sizes");
    bench_cmd->add_option("--isovalues", bench.isovalues, "Case 2: isovalue count")->capture_default_str();
    bench_cmd->add_option("--component", bench.component)->check(CLI::IsMember({"u", "v"}))->capture_default_str();
    bench_cmd->add_option("--repeat", bench.repeat, "Keep the fastest of k runs per trial")->capture_default_str();
    bench_cmd->add_option("--threads", bench.threads)->capture_default_str();
    bench_cmd->add_option("--out", bench.out, "CSV file (default: standard output)");

    ServeOptions serve;
    auto* serve_cmd = app.add_subcommand("serve", "Serve datasets over HTTP");
    serve_cmd->add_option("--host", serve.host)->capture_default_str();
    serve_cmd->add_option("--port", serve.port)->capture_default_str();
    serve_cmd->add_option("--data", serve.data, "Directory of mesh files")->envname("FIBERLINE_DATA");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) {
            const auto* sub = gen_cmd->get_subcommands().front();
            return cmd_gen(sub->get_name(), gen);
        }
        if (ex_cmd->parsed())
            return cmd_extract(ex);
        if (bench_cmd->parsed())
            return cmd_bench(bench);
        return cmd_serve(serve);
    } catch (const UsageError& e) {
        std::cerr << "fiberline: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "fiberline: " << e.what() << "\n";
        return kExitRuntime;
    }
}
