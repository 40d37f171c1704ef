#pragma once

#include <cstdint>
#include <vector>

#include "ptroad/core.hpp"

namespace ptroad::synth {

/// Fronto-parallel rectangle at constant disparity. Its base row v0 + h must
/// not lie in front of the road there: disparity >= f(v0 + h).
struct Obstacle {
  int u0 = 0;
  int v0 = 0;
  int w = 0;
  int h = 0;
  double disparity = 0.0;
};

struct SceneParams {
  int width = 1242;
  int height = 375;
  double alpha0 = -20.0;
  double alpha1 = 0.25;
  std::uint64_t texture_seed = 1;
  std::vector<Obstacle> obstacles;
  double noise_sigma = 0.0;

  /// Throws Parameter on illegal values (alpha1 <= 0, horizon outside the
  /// frame, noise outside [0, 0.1], obstacles off-frame) and Geometry for an
  /// obstacle that sits below the ground.
  void validate() const;
};

struct Scene {
  Image left;
  Image right;
  DisparityMap disp;
  BinaryMask road_mask;
  RoadModel model;
};

/// Deterministic in `params`: rows with f(v) > 0 are road at disparity f(v),
/// the rest is sky (textured, invalid disparity). Obstacles are painted far to
/// near in both views.
Scene generate(const SceneParams& params);

/// Band-limited fractal value noise in [0, 1]; continuous in (x, y).
class ValueNoise {
 public:
  explicit ValueNoise(std::uint64_t seed, double base_period = 48.0, int octaves = 3);
  double operator()(double x, double y) const noexcept;

 private:
  double lattice(std::int64_t ix, std::int64_t iy) const noexcept;
  double octave(double x, double y) const noexcept;

  std::uint64_t seed_;
  double base_period_;
  int octaves_;
};

struct DrawOptions {
  int width = 1242;
  int height = 375;
  double alpha1_min = 0.1;
  double alpha1_max = 0.6;
  double horizon_min = 0.15;  // as a fraction of height
  double horizon_max = 0.5;
  int obstacles = 0;
  double max_obstacle_coverage = 0.15;  // fraction of all pixels
  double noise_sigma = 0.0;
};

/// Random scene parameters from a seed: uniform alpha1 and horizon row within
/// the option ranges, and obstacles standing on the road.
SceneParams draw_scene_params(std::uint64_t seed, const DrawOptions& options);

}  // namespace ptroad::synth
