#include "fiberline/stats.hpp"

#include "fiberline/text_io.hpp"

namespace fiberline {

bool QueryStats::consistent() const {
    if (nit_total != nit_box_box + nit_seg_box || true_positives > candidates)
        return false;
    const double expected =
        candidates > 0 ? static_cast<double>(true_positives) / static_cast<double>(candidates) : 1.0;
    return tpap == expected && tpap >= 0.0 && tpap <= 1.0;
}

std::string to_key_value(const QueryStats& s) {
    std::string out;
    auto put = [&](const char* key, const std::string& value) { out += std::string(key) + '=' + value + '\n'; };
    put("nit_box_box", std::to_string(s.nit_box_box));
    put("nit_seg_box", std::to_string(s.nit_seg_box));
    put("nit_total", std::to_string(s.nit_total));
    put("candidates", std::to_string(s.candidates));
    put("true_positives", std::to_string(s.true_positives));
    put("tpap", format_real(s.tpap));
    put("build_cells_ms", format_real(s.build_cells_ms));
    put("build_edges_ms", format_real(s.build_edges_ms));
    put("search_ms", format_real(s.search_ms));
    put("extract_ms", format_real(s.extract_ms));
    put("total_ms", format_real(s.total_ms));
    put("degenerate_cells", std::to_string(s.degenerate_cells));
    return out;
}

} // namespace fiberline
