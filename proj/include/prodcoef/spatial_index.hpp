#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "prodcoef/pointcloud_io.hpp"

namespace prodcoef {

// Shared distance predicate so every neighbor search agrees bit-for-bit.
inline bool within_radius(const Point3& p, const Point3& center, double radius_sq) {
  const double dx = p.x - center.x;
  const double dy = p.y - center.y;
  const double dz = p.z - center.z;
  return dx * dx + dy * dy + dz * dz <= radius_sq;
}

// Balanced kd-tree over a fixed point set. Holds a reference to the points,
// which must outlive the index.
class KdTree {
 public:
  explicit KdTree(std::span<const Point3> points, std::size_t leaf_size = 16);

  std::size_t size() const { return points_.size(); }
  std::span<const Point3> points() const { return points_; }

  // Calls visit(id) for every point with |p - center| <= radius, in no
  // particular order.
  template <typename Visit>
  void for_each_in_radius(const Point3& center, double radius, Visit&& visit) const;

  // Ids within radius, ascending.
  std::vector<std::size_t> radius_neighbors(const Point3& center, double radius) const;
  std::size_t count_in_radius(const Point3& center, double radius) const;

 private:
  struct Node {
    std::array<double, 3> lo;
    std::array<double, 3> hi;
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);

  std::span<const Point3> points_;
  std::size_t leaf_size_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

// O(n) reference search over the same predicate.
class LinearScan {
 public:
  explicit LinearScan(std::span<const Point3> points) : points_(points) {}

  std::size_t size() const { return points_.size(); }
  std::span<const Point3> points() const { return points_; }

  template <typename Visit>
  void for_each_in_radius(const Point3& center, double radius, Visit&& visit) const {
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (within_radius(points_[i], center, r2)) visit(i);
    }
  }

  std::vector<std::size_t> radius_neighbors(const Point3& center, double radius) const;

 private:
  std::span<const Point3> points_;
};

template <typename Index>
std::vector<std::size_t> radius_neighbors(const Index& index, const Point3& center,
                                          double radius) {
  return index.radius_neighbors(center, radius);
}

template <typename Visit>
void KdTree::for_each_in_radius(const Point3& center, double radius, Visit&& visit) const {
  if (nodes_.empty()) return;
  const double r2 = radius * radius;
  std::int32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[static_cast<std::size_t>(stack[--top])];
    double d2 = 0.0;
    for (int axis = 0; axis < 3; ++axis) {
      const double c = center[axis];
      double d = 0.0;
      if (c < node.lo[axis]) {
        d = node.lo[axis] - c;
      } else if (c > node.hi[axis]) {
        d = c - node.hi[axis];
      }
      d2 += d * d;
    }
    if (d2 > r2) continue;
    if (node.left < 0) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const std::uint32_t id = order_[i];
        if (within_radius(points_[id], center, r2)) visit(static_cast<std::size_t>(id));
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.left;
    }
  }
}

}  // namespace prodcoef
