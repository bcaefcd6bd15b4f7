#pragma once

#include "fiberline/field.hpp"
#include "fiberline/geometry.hpp"
#include "fiberline/polygon.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace fiberline {

struct BvhNode {
    Aabb box;
    double area = 0.0;
    /// Internal: index of the left child (the right child is `right`).
    /// Leaf: offset of the first primitive in Bvh::primitive_order().
    Index first = 0;
    /// Internal: index of the right child. Leaf: unused.
    Index right = 0;
    /// Primitive count for leaves, 0 for internal nodes.
    Index count = 0;
    std::uint32_t height = 0;

    bool is_leaf() const { return count != 0; }
};

enum class BvhKind { cells, edges };

/// Binary AABB hierarchy in a flat node array, root at index 0.
///
/// Built top-down: each range is split at its median primitive along the
/// longest axis of its centroid bounds (ties by primitive index), until a range
/// holds at most leaf_size primitives.
class Bvh {
  public:
    Bvh() = default;

    /// Throws ValidationError on an empty box list or leaf_size < 1.
    Bvh(std::span<const Aabb> boxes, BvhKind kind, std::size_t leaf_size);

    std::span<const BvhNode> nodes() const { return nodes_; }
    const BvhNode& node(Index i) const { return nodes_[i]; }
    const BvhNode& root() const { return nodes_.front(); }
    static constexpr Index root_index = 0;

    /// Primitive ids in leaf order; a leaf covers [first, first + count).
    std::span<const Index> primitive_order() const { return order_; }
    std::span<const Index> leaf_primitives(const BvhNode& leaf) const {
        return std::span<const Index>(order_).subspan(leaf.first, leaf.count);
    }

    /// Box of primitive `id` as given at construction.
    const Aabb& primitive_box(Index id) const { return boxes_[id]; }

    BvhKind kind() const { return kind_; }
    std::size_t leaf_size() const { return leaf_size_; }
    std::size_t primitive_count() const { return order_.size(); }
    bool empty() const { return nodes_.empty(); }

  private:
    Index build_range(std::vector<Point2>& centroids, Index begin, Index end);

    std::vector<BvhNode> nodes_;
    std::vector<Index> order_;
    std::vector<Aabb> boxes_;
    BvhKind kind_ = BvhKind::cells;
    std::size_t leaf_size_ = 1;
};

/// Hierarchy over the codomain boxes of all cell images.
Bvh build_cells(const BivariateField& field, std::size_t leaf_size);

/// Hierarchy over the domain boxes of all cells.
Bvh build_domain_cells(const BivariateField& field, std::size_t leaf_size);

/// Hierarchy over the polygon's derived edges. Throws InvalidPolygon if it has none.
Bvh build_edges(const ControlPolygon& polygon, std::size_t leaf_size);

/// Hierarchy over arbitrary segments (edge ids are indices into `segments`).
Bvh build_segments(std::span<const Segment> segments, std::size_t leaf_size);

} // namespace fiberline
