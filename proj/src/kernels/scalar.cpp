#include "fiberline/kernels.hpp"

#include <cmath>

namespace fiberline::kernels::detail {

void select_straddling_scalar(const ImageColumns& cells, const LineFrame& line, double degenerate_tol,
                              std::size_t begin, std::size_t end, std::vector<Index>& out) {
    const double ox = line.origin.x, oy = line.origin.y;
    const double dx = line.dir.x, dy = line.dir.y;
    for (std::size_t i = begin; i < end; ++i) {
        const double d0 = dx * (cells.y0[i] - oy) - dy * (cells.x0[i] - ox);
        const double d1 = dx * (cells.y1[i] - oy) - dy * (cells.x1[i] - ox);
        const double d2 = dx * (cells.y2[i] - oy) - dy * (cells.x2[i] - ox);
        const bool p0 = d0 > 0.0, p1 = d1 > 0.0, p2 = d2 > 0.0;
        const bool straddle = (p0 || p1 || p2) && !(p0 && p1 && p2);
        const bool degenerate =
            std::fabs(d0) <= degenerate_tol && std::fabs(d1) <= degenerate_tol && std::fabs(d2) <= degenerate_tol;
        if (straddle || degenerate)
            out.push_back(static_cast<Index>(i));
    }
}

void image_bounds_scalar(const ImageColumns& cells, std::size_t begin, std::size_t end, std::span<Aabb> out) {
    for (std::size_t i = begin; i < end; ++i) {
        out[i] = aabb_of_triangle({cells.x0[i], cells.y0[i]}, {cells.x1[i], cells.y1[i]},
                                  {cells.x2[i], cells.y2[i]});
    }
}

} // namespace fiberline::kernels::detail
