#pragma once

// Batch kernels over all cell images of a field.
//
// Each kernel has a scalar reference and an AVX2 variant. The variant is chosen
// at runtime from the CPU's capabilities; FIBERLINE_ISA=scalar in the
// environment forces the reference path. Variants perform the same IEEE
// operations in the same order, so their outputs are bit-identical (the build
// disables floating-point contraction to keep it that way).

#include "fiberline/field.hpp"
#include "fiberline/geometry.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace fiberline::kernels {

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Best ISA this CPU supports.
Isa detected_isa();

/// ISA used by the dispatching entry points.
Isa active_isa();

/// Throws std::invalid_argument if the CPU lacks `isa`.
void set_active_isa(Isa isa);

bool isa_supported(Isa isa);

/// Appends the id of every cell that needs exact evaluation against `line`:
/// cells whose signed distances do not all fall strictly on one side
/// (d > 0 versus d <= 0), plus cells whose three |d| are all <= `degenerate_tol`.
/// Ids are appended in increasing order.
void select_straddling(const ImageColumns& cells, const LineFrame& line, double degenerate_tol,
                       std::vector<Index>& out);
void select_straddling(Isa isa, const ImageColumns& cells, const LineFrame& line, double degenerate_tol,
                       std::vector<Index>& out);

/// Componentwise min/max box of every cell image. `out.size()` must equal `cells.size()`.
void image_bounds(const ImageColumns& cells, std::span<Aabb> out);
void image_bounds(Isa isa, const ImageColumns& cells, std::span<Aabb> out);

namespace detail {

void select_straddling_scalar(const ImageColumns& cells, const LineFrame& line, double degenerate_tol,
                              std::size_t begin, std::size_t end, std::vector<Index>& out);
void select_straddling_avx2(const ImageColumns& cells, const LineFrame& line, double degenerate_tol,
                            std::vector<Index>& out);

void image_bounds_scalar(const ImageColumns& cells, std::size_t begin, std::size_t end, std::span<Aabb> out);
void image_bounds_avx2(const ImageColumns& cells, std::span<Aabb> out);

} // namespace detail

} // namespace fiberline::kernels
