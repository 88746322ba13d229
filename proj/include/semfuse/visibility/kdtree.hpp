#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <queue>
#include <span>
#include <utility>
#include <vector>

#include "semfuse/core/pose.hpp"

namespace semfuse::visibility {

/// Static 3D k-d tree over a point array it does not own. Neighbours at equal
/// distance are ordered by ascending point index, so results do not depend on
/// the build order.
class KdTree {
public:
    explicit KdTree(std::span<const Vec3> points, std::size_t leaf_size = 8) : points_(points), leaf_size_(leaf_size) {
        order_.resize(points.size());
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        nodes_.reserve(2 * points.size() / std::max<std::size_t>(leaf_size_, 1) + 1);
        if (!points.empty()) build(0, points.size());
    }

    std::size_t size() const { return points_.size(); }

    /// The k nearest points to `query`, nearest first.
    std::vector<std::size_t> knn(const Vec3& query, std::size_t k) const {
        std::vector<std::size_t> out;
        if (k == 0 || nodes_.empty()) return out;
        Heap heap;
        search(0, query, k, heap);
        out.resize(heap.size());
        for (std::size_t i = heap.size(); i-- > 0;) {
            out[i] = heap.top().second;
            heap.pop();
        }
        return out;
    }

private:
    using Entry = std::pair<double, std::size_t>;  // (squared distance, index), lexicographic
    using Heap = std::priority_queue<Entry>;

    struct Node {
        std::size_t begin = 0, end = 0;  // range in order_
        int axis = -1;                   // -1 for leaves
        double split = 0.0;
        std::uint32_t left = 0, right = 0;
    };

    std::uint32_t build(std::size_t begin, std::size_t end) {
        const auto id = static_cast<std::uint32_t>(nodes_.size());
        nodes_.push_back({begin, end});
        if (end - begin <= leaf_size_) return id;

        Vec3 lo = points_[order_[begin]], hi = lo;
        for (std::size_t i = begin; i < end; ++i) {
            lo = lo.cwiseMin(points_[order_[i]]);
            hi = hi.cwiseMax(points_[order_[i]]);
        }
        int axis = 0;
        (hi - lo).maxCoeff(&axis);
        if (hi[axis] == lo[axis]) return id;  // all coincident

        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
        const double split = points_[order_[mid]][axis];
        const auto left = build(begin, mid);
        const auto right = build(mid, end);
        Node& node = nodes_[id];
        node.axis = axis;
        node.split = split;
        node.left = left;
        node.right = right;
        return id;
    }

    void search(std::uint32_t id, const Vec3& q, std::size_t k, Heap& heap) const {
        const Node& node = nodes_[id];
        if (node.axis < 0) {
            for (std::size_t i = node.begin; i < node.end; ++i) {
                const std::size_t idx = order_[i];
                const Entry e{(points_[idx] - q).squaredNorm(), idx};
                if (heap.size() < k) {
                    heap.push(e);
                } else if (e < heap.top()) {
                    heap.pop();
                    heap.push(e);
                }
            }
            return;
        }
        const double diff = q[node.axis] - node.split;
        const auto near = diff < 0 ? node.left : node.right;
        const auto far = diff < 0 ? node.right : node.left;
        search(near, q, k, heap);
        // Points exactly on the split plane may sit on either side; only prune
        // when the far side is strictly out of reach.
        if (heap.size() < k || diff * diff <= heap.top().first) search(far, q, k, heap);
    }

    std::span<const Vec3> points_;
    std::size_t leaf_size_;
    std::vector<std::size_t> order_;
    std::vector<Node> nodes_;
};

}  // namespace semfuse::visibility
