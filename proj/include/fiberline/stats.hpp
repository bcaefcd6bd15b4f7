#pragma once

#include <cstdint>
#include <string>

namespace fiberline {

/// Search and extraction instrumentation for one query.
struct QueryStats {
    std::uint64_t nit_box_box = 0;
    std::uint64_t nit_seg_box = 0;
    std::uint64_t nit_total = 0;
    std::uint64_t candidates = 0;
    std::uint64_t true_positives = 0;
    double tpap = 1.0;
    double build_cells_ms = 0.0;
    double build_edges_ms = 0.0;
    double search_ms = 0.0;
    double extract_ms = 0.0;
    double total_ms = 0.0;
    std::uint64_t degenerate_cells = 0;

    /// Recomputes nit_total and tpap from the raw counters.
    void finalize() {
        nit_total = nit_box_box + nit_seg_box;
        tpap = candidates > 0 ? static_cast<double>(true_positives) / static_cast<double>(candidates) : 1.0;
    }

    /// nit_total, tpap and true_positives <= candidates all hold.
    bool consistent() const;
};

/// One `key=value` per line, in declaration order.
std::string to_key_value(const QueryStats& stats);

} // namespace fiberline
