#include "prodcoef/spatial_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "prodcoef/error.hpp"

namespace prodcoef {

KdTree::KdTree(std::span<const Point3> points, std::size_t leaf_size)
    : points_(points), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (points.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kConfiguration, "too many points for the spatial index");
  }
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), 0u);
  if (!points.empty()) {
    nodes_.reserve(2 * points.size() / leaf_size_ + 1);
    build(0, static_cast<std::uint32_t>(points.size()));
  }
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  Node node;
  node.begin = begin;
  node.end = end;
  node.lo.fill(std::numeric_limits<double>::infinity());
  node.hi.fill(-std::numeric_limits<double>::infinity());
  for (std::uint32_t i = begin; i < end; ++i) {
    const Point3& p = points_[order_[i]];
    for (int axis = 0; axis < 3; ++axis) {
      node.lo[axis] = std::min(node.lo[axis], p[axis]);
      node.hi[axis] = std::max(node.hi[axis], p[axis]);
    }
  }
  const auto id = static_cast<std::int32_t>(nodes_.size());
  nodes_.push_back(node);
  if (end - begin <= leaf_size_) return id;

  int axis = 0;
  for (int a = 1; a < 3; ++a) {
    if (node.hi[a] - node.lo[a] > node.hi[axis] - node.lo[axis]) axis = a;
  }
  if (node.hi[axis] == node.lo[axis]) return id;  // all coincident

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double va = points_[a][axis];
                     const double vb = points_[b][axis];
                     return va < vb || (va == vb && a < b);
                   });
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[static_cast<std::size_t>(id)].left = left;
  nodes_[static_cast<std::size_t>(id)].right = right;
  return id;
}

std::vector<std::size_t> KdTree::radius_neighbors(const Point3& center, double radius) const {
  std::vector<std::size_t> ids;
  for_each_in_radius(center, radius, [&](std::size_t id) { ids.push_back(id); });
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::size_t KdTree::count_in_radius(const Point3& center, double radius) const {
  std::size_t n = 0;
  for_each_in_radius(center, radius, [&](std::size_t) { ++n; });
  return n;
}

std::vector<std::size_t> LinearScan::radius_neighbors(const Point3& center,
                                                      double radius) const {
  std::vector<std::size_t> ids;
  for_each_in_radius(center, radius, [&](std::size_t id) { ids.push_back(id); });
  return ids;
}

}  // namespace prodcoef
