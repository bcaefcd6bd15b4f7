#include "fiberline/bvh.hpp"

#include "fiberline/error.hpp"
#include "fiberline/kernels.hpp"

#include <algorithm>
#include <numeric>

namespace fiberline {

Bvh::Bvh(std::span<const Aabb> boxes, BvhKind kind, std::size_t leaf_size)
    : boxes_(boxes.begin(), boxes.end()), kind_(kind), leaf_size_(leaf_size) {
    if (boxes_.empty())
        throw ValidationError("cannot build a hierarchy over zero primitives");
    if (leaf_size_ < 1)
        throw ValidationError("leaf size must be at least 1");

    const auto n = static_cast<Index>(boxes_.size());
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), Index{0});
    std::vector<Point2> centroids(n);
    for (Index i = 0; i < n; ++i)
        centroids[i] = boxes_[i].center();

    nodes_.reserve(2 * static_cast<std::size_t>(n));
    build_range(centroids, 0, n);
}

Index Bvh::build_range(std::vector<Point2>& centroids, Index begin, Index end) {
    const auto self = static_cast<Index>(nodes_.size());
    nodes_.emplace_back();

    Aabb box = Aabb::empty();
    Aabb centroid_box = Aabb::empty();
    for (Index i = begin; i < end; ++i) {
        box = Aabb::unite(box, boxes_[order_[i]]);
        const Point2 c = centroids[order_[i]];
        centroid_box = Aabb::unite(centroid_box, Aabb{c, c});
    }

    const Index count = end - begin;
    if (count <= leaf_size_) {
        BvhNode& leaf = nodes_[self];
        leaf.box = box;
        leaf.area = box.area();
        leaf.first = begin;
        leaf.count = count;
        leaf.height = 0;
        return self;
    }

    // When all centroids coincide the split degenerates to the index order,
    // which still halves the range.
    const bool split_x = centroid_box.width() >= centroid_box.height();
    const Index mid = begin + count / 2;
    auto key_less = [&](Index a, Index b) {
        const double ka = split_x ? centroids[a].x : centroids[a].y;
        const double kb = split_x ? centroids[b].x : centroids[b].y;
        return ka < kb || (ka == kb && a < b);
    };
    std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end, key_less);

    const Index left = build_range(centroids, begin, mid);
    const Index right = build_range(centroids, mid, end);

    BvhNode& node = nodes_[self];
    node.box = Aabb::unite(nodes_[left].box, nodes_[right].box);
    node.area = node.box.area();
    node.first = left;
    node.right = right;
    node.count = 0;
    node.height = 1 + std::max(nodes_[left].height, nodes_[right].height);
    return self;
}

Bvh build_cells(const BivariateField& field, std::size_t leaf_size) {
    if (field.empty())
        throw ValidationError("cannot build a cell hierarchy over an empty field");
    std::vector<Aabb> boxes(field.cell_count());
    kernels::image_bounds(field.image_columns(), boxes);
    return {boxes, BvhKind::cells, leaf_size};
}

Bvh build_domain_cells(const BivariateField& field, std::size_t leaf_size) {
    if (field.empty())
        throw ValidationError("cannot build a cell hierarchy over an empty field");
    std::vector<Aabb> boxes;
    boxes.reserve(field.cell_count());
    const auto verts = field.vertices();
    for (const Triangle& t : field.triangles())
        boxes.push_back(aabb_of_triangle(verts[t[0]], verts[t[1]], verts[t[2]]));
    return {boxes, BvhKind::cells, leaf_size};
}

Bvh build_segments(std::span<const Segment> segments, std::size_t leaf_size) {
    if (segments.empty())
        throw InvalidPolygon("polygon has no edge of positive length");
    std::vector<Aabb> boxes;
    boxes.reserve(segments.size());
    for (const Segment& s : segments)
        boxes.push_back(aabb_of_segment(s));
    return {boxes, BvhKind::edges, leaf_size};
}

Bvh build_edges(const ControlPolygon& polygon, std::size_t leaf_size) {
    return build_segments(polygon.edges(), leaf_size);
}

} // namespace fiberline
