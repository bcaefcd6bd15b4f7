#include "fiberline/bench.hpp"

#include "fiberline/bvh.hpp"
#include "fiberline/error.hpp"
#include "fiberline/pipeline.hpp"
#include "fiberline/text_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>

namespace fiberline {

namespace {

struct TrialOutput {
    std::vector<BenchRow> rows;
    bool mismatch = false;
};

// Trials are independent; each writes only its own slot.
std::vector<TrialOutput> run_trials(std::size_t count, std::size_t threads,
                                    const std::function<TrialOutput(std::size_t)>& trial) {
    std::vector<TrialOutput> out(count);
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        for (std::size_t t = 0; t < count; ++t)
            out[t] = trial(t);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t t; (t = next.fetch_add(1)) < count;) {
                try {
                    out[t] = trial(t);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

BenchRun collect(BenchRun run, std::vector<TrialOutput> trials) {
    for (TrialOutput& t : trials) {
        run.mismatched_placements += t.mismatch ? 1 : 0;
        for (BenchRow& row : t.rows)
            run.rows.push_back(std::move(row));
    }
    return run;
}

// Prebuilt cell hierarchies per leaf size, shared read-only by all trials.
class CellTrees {
  public:
    CellTrees(const BivariateField& field, std::span<const SearchConfig> configs) {
        for (const SearchConfig& c : configs)
            if (c.method != Method::naive && !trees_.count(c.leaf_cells))
                trees_.emplace(c.leaf_cells, build_cells(field, c.leaf_cells));
    }

    const Bvh* get(const SearchConfig& c) const {
        if (c.method == Method::naive)
            return nullptr;
        return &trees_.at(c.leaf_cells);
    }

  private:
    std::map<std::size_t, Bvh> trees_;
};

QueryResult fastest_of(std::size_t repeat, const std::function<QueryResult()>& run) {
    QueryResult best = run();
    for (std::size_t k = 1; k < repeat; ++k) {
        QueryResult again = run();
        if (again.stats.total_ms < best.stats.total_ms)
            best = std::move(again);
    }
    return best;
}

template <class Query>
TrialOutput run_configs(const BenchRun& proto, std::span<const SearchConfig> configs, std::size_t polygon_edges,
                        std::size_t placement_index, Point2 placement, std::size_t repeat, Query&& query) {
    TrialOutput out;
    std::optional<FiberLineSet> reference;
    for (const SearchConfig& config : configs) {
        QueryResult r = fastest_of(repeat, [&] { return query(config); });
        BenchRow row;
        row.bench_case = proto.bench_case;
        row.dataset = proto.dataset_id;
        row.config = config;
        row.polygon_edges = polygon_edges;
        row.placement_index = placement_index;
        row.placement = placement;
        row.stats = r.stats;
        out.rows.push_back(std::move(row));
        if (!reference)
            reference = std::move(r.fiber_lines);
        else if (!same_fiber_lines(reference->segments, r.fiber_lines.segments, 1e-9))
            out.mismatch = true;
    }
    return out;
}

BenchRun prototype(BenchCase c, std::span<const SearchConfig> configs, std::size_t placements, std::uint64_t seed,
                   const BenchOptions& options) {
    BenchRun run;
    run.bench_case = c;
    run.dataset_id = options.dataset_id;
    run.configs.assign(configs.begin(), configs.end());
    run.placements = placements;
    run.seed = seed;
    return run;
}

bool segment_less(const DomainSegment& x, const DomainSegment& y) {
    if (x.cell_id != y.cell_id)
        return x.cell_id < y.cell_id;
    if (x.edge_id != y.edge_id)
        return x.edge_id < y.edge_id;
    if (x.p.x != y.p.x)
        return x.p.x < y.p.x;
    return x.p.y < y.p.y;
}

bool close(Point2 a, Point2 b, double tol) { return std::fabs(a.x - b.x) <= tol && std::fabs(a.y - b.y) <= tol; }

} // namespace

Point2 placement_point(std::uint64_t seed, std::uint64_t trial, const Aabb& box) {
    SplitMix64 rng = SplitMix64::for_trial(seed, trial);
    const double u = rng.uniform();
    const double v = rng.uniform();
    return {box.min.x + u * (box.max.x - box.min.x), box.min.y + v * (box.max.y - box.min.y)};
}

ControlPolygon case1_placement(const ControlPolygon& base, std::uint64_t seed, std::uint64_t trial,
                               const Aabb& codomain) {
    return base.translated(placement_point(seed, trial, codomain) - base.bounds().center());
}

std::vector<ControlPolygon> case3_placements(const BivariateField& field, const ControlPolygon& base,
                                             std::size_t positions, std::uint64_t seed) {
    if (base.edge_count() == 0)
        throw InvalidPolygon("case III base polygon has no edges");
    const Aabb domain = field.domain_box();
    const Aabb base_box = base.bounds();
    const double extent = std::max(base_box.width(), base_box.height());
    const double factor = 0.25 * std::min(domain.width(), domain.height()) / extent;
    const ControlPolygon sized = base.scaled(base_box.center(), factor).translated(Point2{} - base_box.center());
    const Aabb sized_box = sized.bounds();
    const Aabb centers{domain.min - sized_box.min, domain.max - sized_box.max};
    std::vector<ControlPolygon> out;
    out.reserve(positions);
    for (std::size_t t = 0; t < positions; ++t)
        out.push_back(sized.translated(placement_point(seed, t, centers)));
    return out;
}

std::string_view bench_case_name(BenchCase c) {
    switch (c) {
    case BenchCase::I:
        return "I";
    case BenchCase::II:
        return "II";
    case BenchCase::III:
        return "III";
    }
    return "?";
}

BenchRun run_case1(const BivariateField& field, std::span<const ControlPolygon> polygons, std::size_t placements,
                   std::uint64_t seed, std::span<const SearchConfig> configs, const BenchOptions& options) {
    if (polygons.empty())
        throw ValidationError("case I needs at least one polygon");
    BenchRun run = prototype(BenchCase::I, configs, placements, seed, options);
    const CellTrees trees(field, configs);
    const Aabb range = field.codomain_box();

    auto trial = [&](std::size_t t) {
        const ControlPolygon& base = polygons[t / std::max<std::size_t>(placements, 1)];
        const ControlPolygon placed = case1_placement(base, seed, t, range);
        return run_configs(run, configs, placed.edge_count(), t % placements, placed.bounds().center(), options.repeat,
                           [&](const SearchConfig& c) { return run_query(field, placed, c, trees.get(c)); });
    };
    return collect(std::move(run), run_trials(polygons.size() * placements, options.threads, trial));
}

std::vector<double> uniform_isovalues(const BivariateField& field, Component component, std::size_t count) {
    const Aabb range = field.codomain_box();
    const double lo = component == Component::u ? range.min.x : range.min.y;
    const double hi = component == Component::u ? range.max.x : range.max.y;
    std::vector<double> values;
    if (count == 1)
        values.push_back(lo);
    for (std::size_t i = 0; count > 1 && i < count; ++i)
        values.push_back(i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
    return values;
}

BenchRun run_case2(const BivariateField& field, std::span<const double> isovalues, Component component,
                   std::span<const SearchConfig> configs, const BenchOptions& options) {
    if (isovalues.empty())
        throw ValidationError("case II needs at least one isovalue");
    BenchRun run = prototype(BenchCase::II, configs, isovalues.size(), 0, options);
    const CellTrees trees(field, configs);

    auto trial = [&](std::size_t t) {
        const auto fscp = isoline_fscp(field, component, isovalues[t]);
        const Point2 marker = component == Component::u ? Point2{isovalues[t], 0.0} : Point2{0.0, isovalues[t]};
        if (!fscp) {
            TrialOutput out;
            for (const SearchConfig& c : configs) {
                BenchRow row;
                row.bench_case = BenchCase::II;
                row.dataset = run.dataset_id;
                row.config = c;
                row.placement_index = t;
                row.placement = marker;
                row.skipped = true;
                out.rows.push_back(std::move(row));
            }
            return out;
        }
        return run_configs(run, configs, fscp->edge_count(), t, marker, options.repeat,
                           [&](const SearchConfig& c) { return run_query(field, *fscp, c, trees.get(c)); });
    };
    return collect(std::move(run), run_trials(isovalues.size(), options.threads, trial));
}

BenchRun run_case3(const BivariateField& field, std::size_t positions, std::uint64_t seed,
                   const ControlPolygon& base_polygon, std::span<const SearchConfig> configs,
                   const BenchOptions& options) {
    BenchRun run = prototype(BenchCase::III, configs, positions, seed, options);
    const CellTrees trees(field, configs);
    const Bvh domain_tree = build_domain_cells(field, 1);
    const auto placed = case3_placements(field, base_polygon, positions, seed);

    auto trial = [&](std::size_t t) {
        const ControlPolygon& polygon = placed[t];
        return run_configs(run, configs, polygon.edge_count(), t, polygon.bounds().center(), options.repeat,
                           [&](const SearchConfig& c) {
                               return field_equivalence(field, polygon, c, trees.get(c), &domain_tree);
                           });
    };
    return collect(std::move(run), run_trials(positions, options.threads, trial));
}

std::vector<BenchSummary> summarize(const BenchRun& run) {
    std::vector<BenchSummary> out;
    for (const SearchConfig& c : run.configs) {
        BenchSummary s;
        s.config = c;
        for (const BenchRow& row : run.rows) {
            const SearchConfig& rc = row.config;
            if (row.skipped || rc.method != c.method || rc.recursion != c.recursion ||
                rc.leaf_cells != c.leaf_cells || rc.leaf_edges != c.leaf_edges)
                continue;
            ++s.trials;
            s.nit_box_box += static_cast<double>(row.stats.nit_box_box);
            s.nit_seg_box += static_cast<double>(row.stats.nit_seg_box);
            s.nit_total += static_cast<double>(row.stats.nit_total);
            s.candidates += static_cast<double>(row.stats.candidates);
            s.true_positives += static_cast<double>(row.stats.true_positives);
            s.tpap += row.stats.tpap;
            s.build_cells_ms += row.stats.build_cells_ms;
            s.build_edges_ms += row.stats.build_edges_ms;
            s.search_ms += row.stats.search_ms;
            s.extract_ms += row.stats.extract_ms;
            s.total_ms += row.stats.total_ms;
        }
        if (s.trials == 0)
            continue;
        const double n = static_cast<double>(s.trials);
        for (double* m : {&s.nit_box_box, &s.nit_seg_box, &s.nit_total, &s.candidates, &s.true_positives, &s.tpap,
                          &s.build_cells_ms, &s.build_edges_ms, &s.search_ms, &s.extract_ms, &s.total_ms})
            *m /= n;
        out.push_back(s);
    }
    return out;
}

std::string format_report(const BenchRun& run) {
    std::string out = "case,dataset,method,recursion,leaf_cells,leaf_edges,polygon_edges,placement_index,"
                      "nit_box_box,nit_seg_box,candidates,true_positives,tpap,build_cells_ms,build_edges_ms,"
                      "search_ms,extract_ms,total_ms\n";
    auto field = [&out](std::string_view v, char end = ',') {
        out += v;
        out += end;
    };
    for (const BenchRow& row : run.rows) {
        const QueryStats& s = row.stats;
        field(bench_case_name(row.bench_case));
        field(row.dataset);
        field(method_name(row.config.method));
        field(recursion_name(row.config.recursion));
        field(std::to_string(row.config.leaf_cells));
        field(std::to_string(row.config.leaf_edges));
        field(std::to_string(row.polygon_edges));
        field(std::to_string(row.placement_index));
        field(std::to_string(s.nit_box_box));
        field(std::to_string(s.nit_seg_box));
        field(std::to_string(s.candidates));
        field(std::to_string(s.true_positives));
        field(format_real(s.tpap));
        field(format_real(s.build_cells_ms));
        field(format_real(s.build_edges_ms));
        field(format_real(s.search_ms));
        field(format_real(s.extract_ms));
        field(format_real(s.total_ms), '\n');
    }
    out += "#summary,case,dataset,method,recursion,leaf_cells,leaf_edges,trials,nit_box_box,nit_seg_box,nit_total,"
           "candidates,true_positives,tpap,build_cells_ms,build_edges_ms,search_ms,extract_ms,total_ms\n";
    for (const BenchSummary& s : summarize(run)) {
        field("#summary");
        field(bench_case_name(run.bench_case));
        field(run.dataset_id);
        field(method_name(s.config.method));
        field(recursion_name(s.config.recursion));
        field(std::to_string(s.config.leaf_cells));
        field(std::to_string(s.config.leaf_edges));
        field(std::to_string(s.trials));
        for (double v : {s.nit_box_box, s.nit_seg_box, s.nit_total, s.candidates, s.true_positives, s.tpap,
                         s.build_cells_ms, s.build_edges_ms, s.search_ms, s.extract_ms})
            field(format_real(v));
        field(format_real(s.total_ms), '\n');
    }
    return out;
}

std::vector<BenchSummary> report(const BenchRun& run, const std::filesystem::path& out) {
    write_file(out, format_report(run));
    return summarize(run);
}

bool same_fiber_lines(std::span<const DomainSegment> a, std::span<const DomainSegment> b, double tolerance) {
    if (a.size() != b.size())
        return false;
    std::vector<DomainSegment> x(a.begin(), a.end()), y(b.begin(), b.end());
    std::sort(x.begin(), x.end(), segment_less);
    std::sort(y.begin(), y.end(), segment_less);
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].cell_id != y[i].cell_id || x[i].edge_id != y[i].edge_id)
            return false;
        const bool direct = close(x[i].p, y[i].p, tolerance) && close(x[i].q, y[i].q, tolerance);
        const bool flipped = close(x[i].p, y[i].q, tolerance) && close(x[i].q, y[i].p, tolerance);
        if (!direct && !flipped)
            return false;
    }
    return true;
}

} // namespace fiberline
