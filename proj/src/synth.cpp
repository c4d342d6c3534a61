#include "prodcoef/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "prodcoef/error.hpp"
#include "prodcoef/rng.hpp"

namespace prodcoef {

namespace {

constexpr int kClassCodes[] = {2, 3, 5, 6};
constexpr int kTiles = 4;

}  // namespace

void SceneParams::validate() const {
  if (classes < 2 || classes > 4) {
    throw Error(ErrorCode::kConfiguration, "scene class count must be between 2 and 4");
  }
  if (points_per_class < 1) {
    throw Error(ErrorCode::kConfiguration, "scene needs at least one point per class");
  }
  if (!(separation >= 0.0) || !std::isfinite(separation)) {
    throw Error(ErrorCode::kConfiguration, "separation must be finite and non-negative");
  }
  if (!(extent > 0.0) || !(terrain_amplitude >= 0.0) || !(noise >= 0.0)) {
    throw Error(ErrorCode::kConfiguration, "scene extent must be positive, amplitudes non-negative");
  }
}

void to_json(nlohmann::json& j, const SceneParams& p) {
  j = nlohmann::json{{"classes", p.classes},
                     {"points_per_class", p.points_per_class},
                     {"separation", p.separation},
                     {"seed", p.seed},
                     {"extent", p.extent},
                     {"terrain_amplitude", p.terrain_amplitude},
                     {"noise", p.noise}};
}

double scene_terrain(const SceneParams& params, double x, double y) {
  constexpr double pi = std::numbers::pi;
  const double u = x / params.extent;
  const double v = y / params.extent;
  return params.terrain_amplitude *
         (0.5 * std::sin(3.0 * pi * u) * std::cos(2.0 * pi * v) + 0.3 * std::sin(pi * (u + v)) +
          0.4 * u);
}

PointCloud generate_scene(const SceneParams& params) {
  params.validate();
  const double s = params.separation;
  const double tile = params.extent / kTiles;

  // Roof height per tile: highest terrain sample in the tile plus a storey offset.
  auto roof_rng = make_stream(params.seed, 1000);
  double roof[kTiles][kTiles];
  for (int i = 0; i < kTiles; ++i) {
    for (int j = 0; j < kTiles; ++j) {
      double top = -1e300;
      for (int a = 0; a <= 8; ++a) {
        for (int b = 0; b <= 8; ++b) {
          top = std::max(top, scene_terrain(params, (i + a / 8.0) * tile, (j + b / 8.0) * tile));
        }
      }
      roof[i][j] = top + uniform_real(roof_rng, 3.0, 8.0);
    }
  }

  std::vector<Point3> points;
  points.reserve(params.classes * params.points_per_class);
  for (std::size_t c = 0; c < params.classes; ++c) {
    const int code = kClassCodes[c];
    auto rng = make_stream(params.seed, c);
    for (std::size_t k = 0; k < params.points_per_class; ++k) {
      Point3 p;
      p.x = uniform_real(rng, 0.0, params.extent);
      p.y = uniform_real(rng, 0.0, params.extent);
      const double ground = scene_terrain(params, p.x, p.y);
      const double jitter = params.noise * standard_normal(rng);
      double above = 0.0;
      switch (code) {
        case 2:
          break;
        case 3:
          above = 0.6 + 0.15 * standard_normal(rng);
          break;
        case 5:
          above = uniform_real(rng, 4.0, 12.0);
          break;
        case 6: {
          const int ti = std::min(kTiles - 1, static_cast<int>(p.x / tile));
          const int tj = std::min(kTiles - 1, static_cast<int>(p.y / tile));
          above = roof[ti][tj] - ground;
          break;
        }
        default:
          break;
      }
      p.z = ground + s * above + jitter;
      p.label = code;
      points.push_back(p);
    }
  }
  return make_cloud(std::move(points), "synthetic-scene");
}

}  // namespace prodcoef
