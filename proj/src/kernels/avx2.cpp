#include "fiberline/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>
#define FIBERLINE_HAVE_AVX2_KERNELS 1
#endif

namespace fiberline::kernels::detail {

#ifdef FIBERLINE_HAVE_AVX2_KERNELS

namespace {

__attribute__((target("avx2"))) inline __m256d signed_distance4(__m256d x, __m256d y, __m256d ox, __m256d oy,
                                                                __m256d dx, __m256d dy) {
    return _mm256_sub_pd(_mm256_mul_pd(dx, _mm256_sub_pd(y, oy)), _mm256_mul_pd(dy, _mm256_sub_pd(x, ox)));
}

} // namespace

__attribute__((target("avx2"))) void select_straddling_avx2(const ImageColumns& cells, const LineFrame& line,
                                                            double degenerate_tol, std::vector<Index>& out) {
    const std::size_t n = cells.size();
    const std::size_t body = n - n % 4;
    const __m256d ox = _mm256_set1_pd(line.origin.x);
    const __m256d oy = _mm256_set1_pd(line.origin.y);
    const __m256d dx = _mm256_set1_pd(line.dir.x);
    const __m256d dy = _mm256_set1_pd(line.dir.y);
    const __m256d zero = _mm256_setzero_pd();
    const __m256d tol = _mm256_set1_pd(degenerate_tol);
    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));

    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d d0 = signed_distance4(_mm256_loadu_pd(&cells.x0[i]), _mm256_loadu_pd(&cells.y0[i]), ox, oy, dx, dy);
        const __m256d d1 = signed_distance4(_mm256_loadu_pd(&cells.x1[i]), _mm256_loadu_pd(&cells.y1[i]), ox, oy, dx, dy);
        const __m256d d2 = signed_distance4(_mm256_loadu_pd(&cells.x2[i]), _mm256_loadu_pd(&cells.y2[i]), ox, oy, dx, dy);

        const __m256d p0 = _mm256_cmp_pd(d0, zero, _CMP_GT_OQ);
        const __m256d p1 = _mm256_cmp_pd(d1, zero, _CMP_GT_OQ);
        const __m256d p2 = _mm256_cmp_pd(d2, zero, _CMP_GT_OQ);
        const __m256d any = _mm256_or_pd(_mm256_or_pd(p0, p1), p2);
        const __m256d all = _mm256_and_pd(_mm256_and_pd(p0, p1), p2);
        const __m256d straddle = _mm256_andnot_pd(all, any);

        const __m256d s0 = _mm256_cmp_pd(_mm256_and_pd(d0, abs_mask), tol, _CMP_LE_OQ);
        const __m256d s1 = _mm256_cmp_pd(_mm256_and_pd(d1, abs_mask), tol, _CMP_LE_OQ);
        const __m256d s2 = _mm256_cmp_pd(_mm256_and_pd(d2, abs_mask), tol, _CMP_LE_OQ);
        const __m256d degenerate = _mm256_and_pd(_mm256_and_pd(s0, s1), s2);

        int mask = _mm256_movemask_pd(_mm256_or_pd(straddle, degenerate));
        while (mask != 0) {
            const int lane = __builtin_ctz(static_cast<unsigned>(mask));
            out.push_back(static_cast<Index>(i + static_cast<std::size_t>(lane)));
            mask &= mask - 1;
        }
    }
    select_straddling_scalar(cells, line, degenerate_tol, body, n, out);
}

__attribute__((target("avx2"))) void image_bounds_avx2(const ImageColumns& cells, std::span<Aabb> out) {
    const std::size_t n = cells.size();
    const std::size_t body = n - n % 4;
    alignas(32) double lo_x[4], lo_y[4], hi_x[4], hi_y[4];
    for (std::size_t i = 0; i < body; i += 4) {
        const __m256d x0 = _mm256_loadu_pd(&cells.x0[i]);
        const __m256d x1 = _mm256_loadu_pd(&cells.x1[i]);
        const __m256d x2 = _mm256_loadu_pd(&cells.x2[i]);
        const __m256d y0 = _mm256_loadu_pd(&cells.y0[i]);
        const __m256d y1 = _mm256_loadu_pd(&cells.y1[i]);
        const __m256d y2 = _mm256_loadu_pd(&cells.y2[i]);
        _mm256_store_pd(lo_x, _mm256_min_pd(_mm256_min_pd(x0, x1), x2));
        _mm256_store_pd(lo_y, _mm256_min_pd(_mm256_min_pd(y0, y1), y2));
        _mm256_store_pd(hi_x, _mm256_max_pd(_mm256_max_pd(x0, x1), x2));
        _mm256_store_pd(hi_y, _mm256_max_pd(_mm256_max_pd(y0, y1), y2));
        for (int k = 0; k < 4; ++k)
            out[i + static_cast<std::size_t>(k)] = {{lo_x[k], lo_y[k]}, {hi_x[k], hi_y[k]}};
    }
    image_bounds_scalar(cells, body, n, out);
}

#else

void select_straddling_avx2(const ImageColumns& cells, const LineFrame& line, double degenerate_tol,
                            std::vector<Index>& out) {
    select_straddling_scalar(cells, line, degenerate_tol, 0, cells.size(), out);
}

void image_bounds_avx2(const ImageColumns& cells, std::span<Aabb> out) {
    image_bounds_scalar(cells, 0, cells.size(), out);
}

#endif

} // namespace fiberline::kernels::detail
