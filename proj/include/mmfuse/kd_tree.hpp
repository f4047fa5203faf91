#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mmfuse/core_types.hpp"

namespace mmfuse {

/// Static 3-D KD-tree for k-nearest-neighbour queries.
///
/// Neighbours are ordered by (squared Euclidean distance, point index), so
/// equidistant points resolve to the lower index and results match a
/// brute-force scan exactly.
class KdTree {
public:
    explicit KdTree(std::span<const Vec3> points);

    std::size_t size() const { return points_.size(); }

    /// Indices of the k nearest points to `query`, nearest first.
    /// k is clamped to size(). `hint` may list any point indices (typically
    /// the previous query's answer); they only tighten the initial search
    /// bound and never change the result.
    void nearest(const Vec3& query, std::size_t k, std::vector<std::size_t>& out,
                 std::span<const std::size_t> hint = {}) const;

private:
    struct Node {
        std::size_t begin = 0, end = 0;  // range in sorted_ / order_
        int axis = -1;                   // -1 for leaves
        double split = 0;
        std::size_t left = 0, right = 0;
    };

    std::size_t build(std::size_t begin, std::size_t end);

    std::vector<Vec3> points_;
    std::vector<std::size_t> order_;  // tree position -> original index
    std::vector<Vec3> sorted_;        // points_ in tree order
    std::vector<Node> nodes_;
    Vec3 lo_ = Vec3::Zero(), hi_ = Vec3::Zero();  // bounding box
};

}  // namespace mmfuse
