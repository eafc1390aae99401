#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "alphaforge/geometry.hpp"

namespace alphaforge {

struct Neighbor {
  std::uint32_t index = 0;
  double squared_distance = 0.0;
};

/// Exact nearest-neighbor index over a fixed point set. Ties in distance
/// resolve to the lowest index. Below 64 points queries are a linear scan.
class KdTree {
 public:
  explicit KdTree(std::span<const Point3> points);

  Neighbor nearest(const Point3& q) const;

  /// The k nearest points sorted by (distance, index). k is clamped to size().
  std::vector<Neighbor> k_nearest(const Point3& q, std::size_t k) const;

  std::size_t size() const noexcept { return points_.size(); }

 private:
  struct Node {
    std::uint32_t begin = 0, end = 0;  // leaf range in order_
    std::int32_t left = -1, right = -1;
    int axis = -1;
    double split = 0.0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end, int depth);
  void search(std::int32_t node, const Point3& q, Neighbor& best) const;
  void search_k(std::int32_t node, const Point3& q, std::size_t k, std::vector<Neighbor>& heap) const;

  std::span<const Point3> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

/// Nearest neighbor in `target` for every point of `source`.
std::vector<Neighbor> nearest_neighbors(std::span<const Point3> source, const KdTree& target);

}  // namespace alphaforge
