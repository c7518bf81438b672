#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <numeric>
#include <vector>

namespace occalib {

/// Static k-d tree over Dim-dimensional points. Queries reproduce brute-force
/// results exactly: k-NN orders by (squared distance, insertion index) and a
/// subtree is pruned only when its bound strictly exceeds the current worst,
/// so equal-distance candidates with smaller indices are always found.
template <int Dim>
class KdTree {
 public:
  using Point = Eigen::Matrix<double, Dim, 1>;

  KdTree() = default;

  explicit KdTree(std::vector<Point> pts) : points_(std::move(pts)) {
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!points_.empty()) {
      nodes_.reserve(2 * points_.size() / kLeafSize + 2);
      root_ = build(0, static_cast<int>(points_.size()));
    }
  }

  int size() const { return static_cast<int>(points_.size()); }
  const Point& point(int i) const { return points_[i]; }

  /// Indices of the k nearest points, ascending by (squared distance, index).
  std::vector<int> knn(const Point& q, int k) const {
    std::vector<int> out;
    if (k <= 0 || points_.empty()) return out;
    Best best;
    best.k = std::min<int>(k, size());
    search(root_, q, best);
    std::sort(best.heap.begin(), best.heap.end());
    out.reserve(best.heap.size());
    for (const auto& [d2, idx] : best.heap) out.push_back(idx);
    return out;
  }

  /// Indices of points with distance <= r, ascending by insertion index.
  std::vector<int> radius(const Point& q, double r) const {
    std::vector<int> out;
    if (points_.empty() || r < 0.0) return out;
    radius_search(root_, q, r * r, out);
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  static constexpr int kLeafSize = 16;

  struct Node {
    int begin = 0, end = 0;      // leaf range in order_
    int split_dim = -1;          // -1 marks a leaf
    double split_val = 0.0;
    int left = -1, right = -1;
  };

  struct Best {
    int k = 0;
    std::vector<std::pair<double, int>> heap;  // max-heap by (d2, index)

    double worst_d2() const { return heap.front().first; }
    bool full() const { return static_cast<int>(heap.size()) == k; }

    void offer(double d2, int idx) {
      const std::pair<double, int> cand{d2, idx};
      if (!full()) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end());
      } else if (cand < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end());
      }
    }
  };

  int build(int begin, int end) {
    Node node;
    node.begin = begin;
    node.end = end;
    if (end - begin > kLeafSize) {
      // Split the widest dimension at its median.
      Point lo = points_[order_[begin]];
      Point hi = lo;
      for (int i = begin + 1; i < end; ++i) {
        lo = lo.cwiseMin(points_[order_[i]]);
        hi = hi.cwiseMax(points_[order_[i]]);
      }
      int dim = 0;
      (hi - lo).maxCoeff(&dim);
      if (hi[dim] > lo[dim]) {
        const int mid = (begin + end) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid,
                         order_.begin() + end, [&](int a, int b) {
                           return points_[a][dim] < points_[b][dim];
                         });
        node.split_dim = dim;
        node.split_val = points_[order_[mid]][dim];
        const int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int left = build(begin, mid);
        const int right = build(mid, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
      }
      // All points identical along every axis: keep as one leaf.
    }
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    return self;
  }

  void search(int node_id, const Point& q, Best& best) const {
    const Node& node = nodes_[node_id];
    if (node.split_dim < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        best.offer((points_[idx] - q).squaredNorm(), idx);
      }
      return;
    }
    const double delta = q[node.split_dim] - node.split_val;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, q, best);
    if (!best.full() || delta * delta <= best.worst_d2()) {
      search(far, q, best);
    }
  }

  void radius_search(int node_id, const Point& q, double r2,
                     std::vector<int>& out) const {
    const Node& node = nodes_[node_id];
    if (node.split_dim < 0) {
      for (int i = node.begin; i < node.end; ++i) {
        const int idx = order_[i];
        if ((points_[idx] - q).squaredNorm() <= r2) out.push_back(idx);
      }
      return;
    }
    const double delta = q[node.split_dim] - node.split_val;
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    radius_search(near, q, r2, out);
    if (delta * delta <= r2) radius_search(far, q, r2, out);
  }

  std::vector<Point> points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

using KdTree2d = KdTree<2>;
using KdTree3d = KdTree<3>;

}  // namespace occalib
