#include "fiberline/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace fiberline::kernels {

namespace {

Isa initial_isa() {
    if (const char* forced = std::getenv("FIBERLINE_ISA"); forced && std::string(forced) == "scalar")
        return Isa::scalar;
    return detected_isa();
}

std::atomic<Isa>& selected() {
    static std::atomic<Isa> isa{initial_isa()};
    return isa;
}

} // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return "scalar";
    case Isa::avx2:
        return "avx2";
    }
    return "unknown";
}

bool isa_supported(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return true;
    case Isa::avx2:
#if defined(__x86_64__) || defined(__i386__)
        return __builtin_cpu_supports("avx2");
#else
        return false;
#endif
    }
    return false;
}

Isa detected_isa() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
    if (!isa_supported(isa))
        throw std::invalid_argument("ISA not supported on this CPU: " + std::string(isa_name(isa)));
    selected().store(isa, std::memory_order_relaxed);
}

void select_straddling(Isa isa, const ImageColumns& cells, const LineFrame& line, double degenerate_tol,
                       std::vector<Index>& out) {
    if (isa == Isa::avx2)
        detail::select_straddling_avx2(cells, line, degenerate_tol, out);
    else
        detail::select_straddling_scalar(cells, line, degenerate_tol, 0, cells.size(), out);
}

void select_straddling(const ImageColumns& cells, const LineFrame& line, double degenerate_tol,
                       std::vector<Index>& out) {
    select_straddling(active_isa(), cells, line, degenerate_tol, out);
}

void image_bounds(Isa isa, const ImageColumns& cells, std::span<Aabb> out) {
    if (out.size() != cells.size())
        throw std::invalid_argument("image_bounds: output size mismatch");
    if (isa == Isa::avx2)
        detail::image_bounds_avx2(cells, out);
    else
        detail::image_bounds_scalar(cells, 0, cells.size(), out);
}

void image_bounds(const ImageColumns& cells, std::span<Aabb> out) { image_bounds(active_isa(), cells, out); }

} // namespace fiberline::kernels
