#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "prodcoef/dyadic.hpp"
#include "prodcoef/feature_matrix.hpp"
#include "prodcoef/pointcloud_io.hpp"
#include "prodcoef/spatial_index.hpp"

namespace prodcoef {

struct NeighborhoodSpec {
  double radius = 2.0;
  bool include_center = true;

  void validate() const;
};

// The seven product coefficients of a point's depth-3 neighborhood tree, in
// level order: a_S; a_L(S), a_R(S); a_L(L(S)), a_R(L(S)), a_L(R(S)), a_R(R(S)).
struct PcFeatureRow {
  std::array<double, 7> a{};
  std::size_t neighbor_count = 0;
};

inline constexpr std::array<const char*, 7> kCoefficientNames = {
    "a_s", "a_ls", "a_rs", "a_lls", "a_rls", "a_lrs", "a_rrs"};

// x, y, z followed by the coefficient names.
std::vector<std::string> feature_column_names();

// Leaf slot (0..7) of `p` relative to the slicing planes through `center`:
// x first, then y, then z; a coordinate equal to the center's goes left.
inline int orthant_leaf(const Point3& p, const Point3& center) {
  return (p.x > center.x ? 4 : 0) | (p.y > center.y ? 2 : 0) | (p.z > center.z ? 1 : 0);
}

// Depth-3 counting measure of `neighbors` sliced through `center`.
dyadic::DyadicTree dyadic_measure_from_sphere(std::span<const Point3> neighbors,
                                              const Point3& center);

PcFeatureRow point_product_coefficients(const dyadic::DyadicTree& tree);

enum class NeighborSearch { kKdTree, kLinearScan };

struct ExtractOptions {
  NeighborSearch search = NeighborSearch::kKdTree;
  unsigned threads = 1;  // 0 = one per hardware thread
  std::size_t leaf_size = 16;
};

// Raw per-point coefficients, in cloud order. The cloud must be normalized.
std::vector<PcFeatureRow> compute_point_features(const PointCloud& cloud,
                                                 const NeighborhoodSpec& spec,
                                                 const ExtractOptions& options = {});

// Ten-column matrix (x, y, z, seven coefficients), each column min-max
// rescaled onto [0,1]. Labels are carried over when every point has one.
FeatureMatrix extract_features(const PointCloud& cloud, const NeighborhoodSpec& spec,
                               const ExtractOptions& options = {});

// Assembles the rescaled matrix from already computed rows.
FeatureMatrix assemble_feature_matrix(const PointCloud& cloud,
                                      std::span<const PcFeatureRow> rows);

// Smallest radius whose median neighbor count (center included) reaches
// `target`, by bisection. Uses at most `sample` evenly strided centers.
double calibrate_radius(const PointCloud& cloud, std::size_t target, std::size_t sample = 2000);

}  // namespace prodcoef
