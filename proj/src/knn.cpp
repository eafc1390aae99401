#include "alphaforge/knn.hpp"

#include <algorithm>
#include <limits>

namespace alphaforge {

namespace {

constexpr std::uint32_t kLeafSize = 8;
constexpr std::size_t kBruteForceBelow = 64;

bool closer(const Neighbor& a, const Neighbor& b) {
  return a.squared_distance < b.squared_distance ||
         (a.squared_distance == b.squared_distance && a.index < b.index);
}

}  // namespace

KdTree::KdTree(std::span<const Point3> points) : points_(points) {
  order_.resize(points.size());
  for (std::uint32_t i = 0; i < order_.size(); ++i) order_[i] = i;
  if (points.size() >= kBruteForceBelow) {
    nodes_.reserve(2 * points.size() / kLeafSize + 2);
    build(0, static_cast<std::uint32_t>(points.size()), 0);
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end, int depth) {
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  // Split the widest axis of the range's bounding box at the median.
  Point3 lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin; i < end; ++i) {
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], points_[order_[i]][k]);
      hi[k] = std::max(hi[k], points_[order_[i]][k]);
    }
  }
  int axis = 0;
  for (int k = 1; k < 3; ++k) {
    if (hi[k] - lo[k] > hi[axis] - lo[axis]) axis = k;
  }
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa < pb || (pa == pb && a < b);
                   });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid, depth + 1);
  const std::int32_t right = build(mid, end, depth + 1);
  Node& node = nodes_[id];
  node.axis = axis;
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

void KdTree::search(std::int32_t id, const Point3& q, Neighbor& best) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{order_[i], squared_distance(q, points_[order_[i]])};
      if (closer(cand, best)) best = cand;
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff < 0 ? node.left : node.right;
  const std::int32_t far = diff < 0 ? node.right : node.left;
  search(near, q, best);
  // <= keeps equal-distance candidates with lower indices reachable.
  if (diff * diff <= best.squared_distance) search(far, q, best);
}

Neighbor KdTree::nearest(const Point3& q) const {
  Neighbor best{std::numeric_limits<std::uint32_t>::max(), std::numeric_limits<double>::infinity()};
  if (nodes_.empty()) {
    for (std::uint32_t i = 0; i < points_.size(); ++i) {
      const Neighbor cand{i, squared_distance(q, points_[i])};
      if (closer(cand, best)) best = cand;
    }
    return best;
  }
  search(0, q, best);
  return best;
}

void KdTree::search_k(std::int32_t id, const Point3& q, std::size_t k, std::vector<Neighbor>& heap) const {
  const Node& node = nodes_[id];
  auto worst = [&] {
    return heap.size() < k ? std::numeric_limits<double>::infinity() : heap.front().squared_distance;
  };
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const Neighbor cand{order_[i], squared_distance(q, points_[order_[i]])};
      if (heap.size() < k) {
        heap.push_back(cand);
        std::push_heap(heap.begin(), heap.end(), closer);
      } else if (closer(cand, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), closer);
        heap.back() = cand;
        std::push_heap(heap.begin(), heap.end(), closer);
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::int32_t near = diff < 0 ? node.left : node.right;
  const std::int32_t far = diff < 0 ? node.right : node.left;
  search_k(near, q, k, heap);
  if (diff * diff <= worst()) search_k(far, q, k, heap);
}

std::vector<Neighbor> KdTree::k_nearest(const Point3& q, std::size_t k) const {
  k = std::min(k, points_.size());
  std::vector<Neighbor> heap;
  if (k == 0) return heap;
  heap.reserve(k + 1);
  if (nodes_.empty()) {
    std::vector<Neighbor> all(points_.size());
    for (std::uint32_t i = 0; i < points_.size(); ++i) all[i] = {i, squared_distance(q, points_[i])};
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), closer);
    all.resize(k);
    return all;
  }
  search_k(0, q, k, heap);
  std::sort_heap(heap.begin(), heap.end(), closer);
  return heap;
}

std::vector<Neighbor> nearest_neighbors(std::span<const Point3> source, const KdTree& target) {
  std::vector<Neighbor> out(source.size());
  for (std::size_t i = 0; i < source.size(); ++i) out[i] = target.nearest(source[i]);
  return out;
}

}  // namespace alphaforge
