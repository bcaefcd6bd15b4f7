#pragma once

#include "fiberline/extraction.hpp"
#include "fiberline/field.hpp"
#include "fiberline/polygon.hpp"
#include "fiberline/stats.hpp"
#include "fiberline/traversal.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fiberline {

/// SplitMix64 (Steele, Lea, Flood 2014). Trial streams are derived from the
/// run seed and the trial index, so any trial can be regenerated alone.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static SplitMix64 for_trial(std::uint64_t seed, std::uint64_t trial) {
        return SplitMix64(seed ^ (trial * 0x9E3779B97F4A7C15ull));
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

/// Uniform point in `box` for trial `trial` of a run seeded with `seed`.
Point2 placement_point(std::uint64_t seed, std::uint64_t trial, const Aabb& box);

/// Case I: `base` translated so its box center lands on trial `trial`'s point in `codomain`.
ControlPolygon case1_placement(const ControlPolygon& base, std::uint64_t seed, std::uint64_t trial,
                               const Aabb& codomain);

/// Case III: `base` scaled to a quarter of the smaller domain extent, then
/// centered at `positions` random points where it fits inside the domain box.
std::vector<ControlPolygon> case3_placements(const BivariateField& field, const ControlPolygon& base,
                                             std::size_t positions, std::uint64_t seed);

enum class BenchCase { I, II, III };

std::string_view bench_case_name(BenchCase c);

struct BenchRow {
    BenchCase bench_case = BenchCase::I;
    std::string dataset;
    SearchConfig config;
    std::size_t polygon_edges = 0;
    std::size_t placement_index = 0;
    Point2 placement;
    /// Case II: the isoline was empty and nothing ran.
    bool skipped = false;
    QueryStats stats;
};

struct BenchRun {
    BenchCase bench_case = BenchCase::I;
    std::string dataset_id;
    std::vector<SearchConfig> configs;
    std::size_t placements = 0;
    std::uint64_t seed = 0;
    std::vector<BenchRow> rows;
    /// Placements whose fiber lines differed between configs.
    std::size_t mismatched_placements = 0;
};

struct BenchOptions {
    std::string dataset_id = "dataset";
    /// Each trial runs this many times; the fastest repetition is kept.
    std::size_t repeat = 1;
    /// Placements are distributed over this many threads. 1 is fully sequential.
    std::size_t threads = 1;
};

/// Random codomain placements of every polygon, one row per
/// polygon x placement x config.
BenchRun run_case1(const BivariateField& field, std::span<const ControlPolygon> polygons, std::size_t placements,
                   std::uint64_t seed, std::span<const SearchConfig> configs, const BenchOptions& options = {});

/// `count` isovalues spaced uniformly over the component's range, ends included.
std::vector<double> uniform_isovalues(const BivariateField& field, Component component, std::size_t count);

/// One row per isovalue x config; an empty isoline gives skipped rows.
BenchRun run_case2(const BivariateField& field, std::span<const double> isovalues, Component component,
                   std::span<const SearchConfig> configs, const BenchOptions& options = {});

/// Field equivalence at the case3_placements positions.
BenchRun run_case3(const BivariateField& field, std::size_t positions, std::uint64_t seed,
                   const ControlPolygon& base_polygon, std::span<const SearchConfig> configs,
                   const BenchOptions& options = {});

/// Per-config means over the non-skipped rows, in config order. Configs
/// without rows are left out.
struct BenchSummary {
    SearchConfig config;
    std::size_t trials = 0;
    double nit_box_box = 0.0;
    double nit_seg_box = 0.0;
    double nit_total = 0.0;
    double candidates = 0.0;
    double true_positives = 0.0;
    double tpap = 0.0;
    double build_cells_ms = 0.0;
    double build_edges_ms = 0.0;
    double search_ms = 0.0;
    double extract_ms = 0.0;
    double total_ms = 0.0;
};

std::vector<BenchSummary> summarize(const BenchRun& run);

/// Per-trial CSV followed by `#summary` lines.
std::string format_report(const BenchRun& run);
std::vector<BenchSummary> report(const BenchRun& run, const std::filesystem::path& out);

/// Equal as sets of (cell, edge, endpoints) with endpoints matched within `tolerance`.
bool same_fiber_lines(std::span<const DomainSegment> a, std::span<const DomainSegment> b, double tolerance);

} // namespace fiberline
