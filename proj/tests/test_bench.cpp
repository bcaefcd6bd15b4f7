#include "fiberline/bench.hpp"
#include "fiberline/error.hpp"
#include "fiberline/text_io.hpp"
#include "support/instances.hpp"
#include "support/report.hpp"

#include <doctest.h>

#include <charconv>
#include <map>

using namespace fiberline;

namespace {

std::vector<SearchConfig> all_methods() {
    return {SearchConfig::defaults_for(Method::naive), SearchConfig::defaults_for(Method::single),
            SearchConfig::defaults_for(Method::dual), SearchConfig::defaults_for(Method::hybrid)};
}

double number(const std::string& s) {
    double v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
}

// Means recomputed from the CSV rows, compared bit for bit with the summary block.
void check_summary_recomputes(const std::string& text) {
    const fltest::Report r = fltest::parse_report(text);
    const char* mean_columns[] = {"nit_box_box", "nit_seg_box", "candidates", "true_positives", "tpap",
                                  "build_cells_ms", "build_edges_ms", "search_ms", "extract_ms", "total_ms"};
    std::map<std::string, std::vector<const fltest::Row*>> groups;
    const std::size_t method = fltest::column(r.header, "method"), rec = fltest::column(r.header, "recursion");
    const std::size_t lc = fltest::column(r.header, "leaf_cells"), le = fltest::column(r.header, "leaf_edges");
    const std::size_t edges = fltest::column(r.header, "polygon_edges");
    for (const fltest::Row& row : r.rows)
        if (row[edges] != "0")
            groups[row[method] + "/" + row[rec] + "/" + row[lc] + "/" + row[le]].push_back(&row);

    REQUIRE(r.summary.size() == groups.size());
    for (const fltest::Row& s : r.summary) {
        const std::string key = s[fltest::column(r.summary_header, "method")] + "/" +
                                s[fltest::column(r.summary_header, "recursion")] + "/" +
                                s[fltest::column(r.summary_header, "leaf_cells")] + "/" +
                                s[fltest::column(r.summary_header, "leaf_edges")];
        const auto& rows = groups.at(key);
        CHECK(s[fltest::column(r.summary_header, "trials")] == std::to_string(rows.size()));
        for (const char* name : mean_columns) {
            double sum = 0;
            for (const fltest::Row* row : rows)
                sum += number((*row)[fltest::column(r.header, name)]);
            CHECK(format_real(sum / static_cast<double>(rows.size())) == s[fltest::column(r.summary_header, name)]);
        }
    }
}

} // namespace

TEST_CASE("splitmix reference values") {
    // First outputs for seed 0 as published with the generator.
    SplitMix64 rng(0);
    CHECK(rng.next() == 0xE220A8397B1DCDAFull);
    CHECK(rng.next() == 0x6E789E6AA1B965F4ull);
    CHECK(rng.next() == 0x06C45D188009454Full);
    SplitMix64 u(42);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("placements are reproducible and inside the box") {
    const Aabb box{{-2, 1}, {3, 1.5}};
    for (std::uint64_t t = 0; t < 500; ++t) {
        const Point2 p = placement_point(7, t, box);
        CHECK(box.contains(p));
        CHECK(p == placement_point(7, t, box));
    }
    CHECK(placement_point(7, 0, box) != placement_point(8, 0, box));
}

TEST_CASE("case I rows, determinism and summary") {
    const BivariateField f = gen_double_gyre(40, 20);
    const auto polygons = benchmark_polygons({0, 0}, 0.05);
    const std::vector<ControlPolygon> some(polygons.begin(), polygons.begin() + 4);
    const auto configs = all_methods();
    BenchOptions options;
    options.dataset_id = "dg";
    const BenchRun a = run_case1(f, some, 6, 11, configs, options);
    CHECK(a.rows.size() == 4 * 6 * 4);
    CHECK(a.mismatched_placements == 0);
    const BenchRun b = run_case1(f, some, 6, 11, configs, options);
    CHECK(fltest::without_timings(format_report(a)) == fltest::without_timings(format_report(b)));
    check_summary_recomputes(format_report(a));

    // Hybrid candidates never exceed dual's.
    for (std::size_t i = 0; i < a.rows.size(); i += 4) {
        CHECK(a.rows[i + 3].stats.candidates <= a.rows[i + 2].stats.candidates);
        CHECK(a.rows[i + 3].stats.tpap >= a.rows[i + 2].stats.tpap);
        CHECK(a.rows[i].stats.true_positives == a.rows[i + 3].stats.true_positives);
    }
    const auto summary = summarize(a);
    CHECK(summary[3].tpap >= summary[2].tpap);

    BenchOptions threaded = options;
    threaded.threads = 3;
    const BenchRun c = run_case1(f, some, 6, 11, configs, threaded);
    CHECK(fltest::without_timings(format_report(c)) == fltest::without_timings(format_report(a)));

    CHECK_THROWS_AS(run_case1(f, {}, 3, 1, configs), ValidationError);
}

TEST_CASE("empty and single-trial reports") {
    const BivariateField f = gen_double_gyre(20, 10);
    const auto polygons = benchmark_polygons({0, 0}, 0.05);
    const std::vector<SearchConfig> hybrid{SearchConfig{}};
    const BenchRun empty = run_case1(f, std::span(polygons).first(1), 0, 1, hybrid);
    const fltest::Report er = fltest::parse_report(format_report(empty));
    CHECK(er.rows.empty());
    CHECK(er.summary.empty());
    CHECK(er.header.size() == 18);

    const BenchRun one = run_case1(f, std::span(polygons).first(1), 1, 1, hybrid);
    const auto s = summarize(one);
    REQUIRE(s.size() == 1);
    CHECK(s[0].trials == 1);
    CHECK(s[0].total_ms == one.rows[0].stats.total_ms);
    CHECK(s[0].nit_total == static_cast<double>(one.rows[0].stats.nit_total));
    CHECK(s[0].tpap == one.rows[0].stats.tpap);
}

TEST_CASE("case II skips empty isolines") {
    const BivariateField f = gen_double_gyre(40, 20);
    const auto isovalues = uniform_isovalues(f, Component::u, 9);
    REQUIRE(isovalues.size() == 9);
    CHECK(isovalues.front() == f.codomain_box().min.x);
    CHECK(isovalues.back() == f.codomain_box().max.x);
    const auto configs = all_methods();
    const BenchRun run = run_case2(f, isovalues, Component::u, configs);
    CHECK(run.rows.size() == 9 * 4);
    CHECK(run.rows.front().skipped);
    CHECK(run.rows.front().polygon_edges == 0);
    CHECK(run.mismatched_placements == 0);
    std::size_t ran = 0;
    for (const BenchRow& r : run.rows)
        ran += !r.skipped;
    CHECK(ran >= 7 * 4);
    check_summary_recomputes(format_report(run));
}

TEST_CASE("case III placements fit the domain") {
    const BivariateField f = gen_double_gyre(40, 20);
    const ControlPolygon base = gen_polygon(PolygonShape::star, 60, {3, 3}, 2, 1.2);
    const auto placed = case3_placements(f, base, 30, 5);
    for (const ControlPolygon& p : placed) {
        CHECK(f.domain_box().contains(p.bounds()));
        CHECK(std::max(p.bounds().width(), p.bounds().height()) == doctest::Approx(0.25));
        CHECK(p.edge_count() == 60);
    }
    const auto configs = all_methods();
    const BenchRun run = run_case3(f, 5, 5, base, configs);
    CHECK(run.rows.size() == 20);
    CHECK(run.mismatched_placements == 0);
    const BenchRun again = run_case3(f, 5, 5, base, configs);
    CHECK(fltest::without_timings(format_report(run)) == fltest::without_timings(format_report(again)));
    check_summary_recomputes(format_report(run));
}

TEST_CASE("fiber-line set comparison") {
    const std::vector<DomainSegment> a{{{0, 0}, {1, 1}, 2, 3}, {{0, 1}, {1, 0}, 1, 3}};
    const std::vector<DomainSegment> b{{{0, 1}, {1, 0}, 1, 3}, {{1, 1}, {0, 1e-10}, 2, 3}};
    CHECK(same_fiber_lines(a, b, 1e-9));
    CHECK_FALSE(same_fiber_lines(a, b, 1e-11));
    CHECK_FALSE(same_fiber_lines(a, std::span(b).first(1), 1e-9));
}
