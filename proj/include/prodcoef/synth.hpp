#pragma once

#include <cstddef>
#include <cstdint>

#include "json.hpp"
#include "prodcoef/pointcloud_io.hpp"

namespace prodcoef {

// Labeled desk-scale scene over hilly terrain. Every class covers the whole
// footprint; classes differ in height above the local terrain and in vertical
// structure:
//   2 ground           terrain surface plus small noise
//   3 low vegetation   thin layer a little above the terrain
//   5 high vegetation  volumetric canopy with large vertical spread
//   6 building         flat roofs, one per tile of a 4x4 grid
// `separation` scales every class-specific offset; at 0 all classes share one
// distribution.
struct SceneParams {
  std::size_t classes = 4;  // 2..4, taken in the order above
  std::size_t points_per_class = 500;
  double separation = 1.0;
  std::uint64_t seed = 7;
  double extent = 100.0;            // footprint side length
  double terrain_amplitude = 5.0;   // hill height
  double noise = 0.05;              // shared vertical noise

  void validate() const;
};

void to_json(nlohmann::json& j, const SceneParams& p);

// Points are grouped by class, in class order.
PointCloud generate_scene(const SceneParams& params);

// Terrain height used by the generator.
double scene_terrain(const SceneParams& params, double x, double y);

}  // namespace prodcoef
