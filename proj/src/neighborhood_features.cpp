#include "prodcoef/neighborhood_features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "prodcoef/error.hpp"
#include "prodcoef/parallel.hpp"

namespace prodcoef {

void NeighborhoodSpec::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw Error(ErrorCode::kConfiguration, "neighborhood radius must be positive and finite");
  }
}

std::vector<std::string> feature_column_names() {
  std::vector<std::string> names{"x", "y", "z"};
  names.insert(names.end(), kCoefficientNames.begin(), kCoefficientNames.end());
  return names;
}

namespace {

constexpr int kDepth = 3;

dyadic::DyadicTree tree_from_counts(const std::array<double, 8>& counts) {
  return dyadic::DyadicTree::from_leaves(counts);
}

}  // namespace

dyadic::DyadicTree dyadic_measure_from_sphere(std::span<const Point3> neighbors,
                                              const Point3& center) {
  if (neighbors.empty()) {
    throw Error(ErrorCode::kEmptyNeighborhood, "neighborhood contains no points");
  }
  std::array<double, 8> counts{};
  for (const auto& p : neighbors) counts[orthant_leaf(p, center)] += 1.0;
  return tree_from_counts(counts);
}

PcFeatureRow point_product_coefficients(const dyadic::DyadicTree& tree) {
  if (tree.depth() != kDepth) {
    throw Error(ErrorCode::kDimension, "neighborhood trees have depth 3");
  }
  const auto coeffs = dyadic::coefficients_from_measure(tree);
  PcFeatureRow row;
  std::copy(coeffs.level_order().begin(), coeffs.level_order().end(), row.a.begin());
  row.neighbor_count = static_cast<std::size_t>(tree.root_mass());
  return row;
}

namespace {

template <typename Index>
std::vector<PcFeatureRow> compute_with(const Index& index, const PointCloud& cloud,
                                       const NeighborhoodSpec& spec, unsigned threads) {
  std::vector<PcFeatureRow> rows(cloud.size());
  const auto& pts = cloud.points;
  parallel_for(pts.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Point3& center = pts[i];
      std::array<double, 8> counts{};
      index.for_each_in_radius(center, spec.radius, [&](std::size_t id) {
        if (!spec.include_center && id == i) return;
        counts[orthant_leaf(pts[id], center)] += 1.0;
      });
      const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
      if (total == 0.0) {
        throw Error(ErrorCode::kEmptyNeighborhood,
                    "point " + std::to_string(i) + " has no neighbors within radius " +
                        format_double(spec.radius));
      }
      rows[i] = point_product_coefficients(tree_from_counts(counts));
    }
  });
  return rows;
}

}  // namespace

std::vector<PcFeatureRow> compute_point_features(const PointCloud& cloud,
                                                 const NeighborhoodSpec& spec,
                                                 const ExtractOptions& options) {
  spec.validate();
  if (cloud.empty()) throw Error(ErrorCode::kEmptyInput, "point cloud is empty");
  if (!cloud.normalized) {
    throw Error(ErrorCode::kConfiguration, "features require a normalized point cloud");
  }
  if (options.search == NeighborSearch::kLinearScan) {
    return compute_with(LinearScan(cloud.points), cloud, spec, options.threads);
  }
  return compute_with(KdTree(cloud.points, options.leaf_size), cloud, spec, options.threads);
}

FeatureMatrix assemble_feature_matrix(const PointCloud& cloud,
                                      std::span<const PcFeatureRow> rows) {
  if (rows.size() != cloud.size()) {
    throw Error(ErrorCode::kDimension, "one feature row per point is required");
  }
  FeatureMatrix m(cloud.size(), 3 + kCoefficientNames.size(), feature_column_names());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto& p = cloud.points[i];
    auto out = m.row(i);
    out[0] = p.x;
    out[1] = p.y;
    out[2] = p.z;
    std::copy(rows[i].a.begin(), rows[i].a.end(), out.begin() + 3);
  }
  if (cloud.labeled()) {
    m.labels.emplace();
    m.labels->reserve(cloud.size());
    for (const auto& p : cloud.points) m.labels->push_back(*p.label);
  }
  rescale_columns_unit(m);
  return m;
}

FeatureMatrix extract_features(const PointCloud& cloud, const NeighborhoodSpec& spec,
                               const ExtractOptions& options) {
  const auto rows = compute_point_features(cloud, spec, options);
  return assemble_feature_matrix(cloud, rows);
}

double calibrate_radius(const PointCloud& cloud, std::size_t target, std::size_t sample) {
  if (cloud.empty()) throw Error(ErrorCode::kEmptyInput, "point cloud is empty");
  if (target == 0 || target > cloud.size()) {
    throw Error(ErrorCode::kConfiguration, "target neighborhood size must be in [1, cloud size]");
  }
  const KdTree index(cloud.points);
  const std::size_t stride = std::max<std::size_t>(1, cloud.size() / std::max<std::size_t>(1, sample));
  std::vector<std::size_t> centers;
  for (std::size_t i = 0; i < cloud.size(); i += stride) centers.push_back(i);

  const auto median_count = [&](double r) {
    std::vector<std::size_t> counts;
    counts.reserve(centers.size());
    for (const auto i : centers) counts.push_back(index.count_in_radius(cloud.points[i], r));
    const auto mid = counts.begin() + static_cast<std::ptrdiff_t>(counts.size() / 2);
    std::nth_element(counts.begin(), mid, counts.end());
    return *mid;
  };

  const AxisBounds b = compute_bounds(cloud.points);
  double diameter = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    diameter += (b.max[axis] - b.min[axis]) * (b.max[axis] - b.min[axis]);
  }
  double hi = std::sqrt(diameter) + 1e-9;
  double lo = 0.0;
  if (median_count(hi) < target) return hi;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (median_count(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace prodcoef
