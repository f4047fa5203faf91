#include "mmfuse/kd_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

namespace mmfuse {

namespace {

constexpr std::size_t kLeafSize = 12;

using Candidate = std::pair<double, std::size_t>;  // (squared distance, index)

}  // namespace

KdTree::KdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(2 * (points_.size() / kLeafSize + 1));
    if (points_.empty()) return;
    build(0, points_.size());
    sorted_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) sorted_[i] = points_[order_[i]];
    lo_ = hi_ = sorted_[0];
    for (const auto& p : sorted_) {
        lo_ = lo_.cwiseMin(p);
        hi_ = hi_.cwiseMax(p);
    }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
    const std::size_t id = nodes_.size();
    nodes_.push_back({begin, end, -1, 0.0, 0, 0});
    if (end - begin <= kLeafSize) return id;

    Vec3 lo = points_[order_[begin]], hi = lo;
    for (std::size_t i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (hi - lo).maxCoeff(&axis);
    if (hi[axis] == lo[axis]) return id;  // all coincident

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
    // Left holds coordinates <= split, right holds >= split.
    const double split = points_[order_[mid]][axis];
    const std::size_t left = build(begin, mid);
    const std::size_t right = build(mid, end);
    Node& n = nodes_[id];
    n.axis = axis;
    n.split = split;
    n.left = left;
    n.right = right;
    return id;
}

void KdTree::nearest(const Vec3& query, std::size_t k, std::vector<std::size_t>& out,
                     std::span<const std::size_t> hint) const {
    k = std::min(k, points_.size());
    if (k == 0) return;

    // Best k so far, ascending by (d2, index); best[count - 1] is the worst.
    thread_local std::vector<Candidate> best;
    best.resize(k);
    std::size_t count = 0;
    double worst = std::numeric_limits<double>::infinity();  // bound once full

    // Keeps best sorted and duplicate-free.
    const auto offer = [&](const Candidate& c) {
        if (count == k && !(c < best[k - 1])) return;
        std::size_t j = count;
        while (j > 0 && c < best[j - 1]) --j;
        if (j > 0 && best[j - 1] == c) return;
        if (count < k) ++count;
        for (std::size_t m = count - 1; m > j; --m) best[m] = best[m - 1];
        best[j] = c;
        if (count == k) worst = best[k - 1].first;
    };
    for (std::size_t idx : hint) {
        if (idx < points_.size()) offer({(points_[idx] - query).squaredNorm(), idx});
    }
    out.clear();

    // Per-axis offset from the query to the current cell; the squared
    // norm is a lower bound on the distance to anything in the cell.
    Vec3 off;
    for (int a = 0; a < 3; ++a) {
        off[a] = query[a] < lo_[a] ? lo_[a] - query[a] : (query[a] > hi_[a] ? query[a] - hi_[a] : 0.0);
    }

    auto visit = [&](auto&& self, std::size_t id, double cell_d2) -> void {
        const Node& n = nodes_[id];
        if (n.axis < 0) {
            for (std::size_t i = n.begin; i < n.end; ++i) {
                const double d2 = (sorted_[i] - query).squaredNorm();
                if (d2 <= worst) offer({d2, order_[i]});
            }
            return;
        }
        const int axis = n.axis;
        const double delta = query[axis] - n.split;
        const std::size_t near = delta < 0 ? n.left : n.right;
        const std::size_t far = delta < 0 ? n.right : n.left;
        self(self, near, cell_d2);
        // Entering the far cell moves this axis' offset to |delta|.
        const double old = off[axis];
        const double far_d2 = cell_d2 - old * old + delta * delta;
        // <= keeps equidistant points with lower indices reachable.
        if (far_d2 <= worst) {
            off[axis] = std::abs(delta);
            self(self, far, far_d2);
            off[axis] = old;
        }
    };
    visit(visit, 0, off.squaredNorm());

    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(best[i].second);
}

}  // namespace mmfuse
