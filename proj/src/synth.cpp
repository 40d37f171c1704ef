#include "ptroad/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "ptroad/road_fit.hpp"

namespace ptroad::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double quintic(double t) noexcept { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

}  // namespace

ValueNoise::ValueNoise(std::uint64_t seed, double base_period, int octaves)
    : seed_(splitmix64(seed)), base_period_(base_period), octaves_(octaves) {}

double ValueNoise::lattice(std::int64_t ix, std::int64_t iy) const noexcept {
  std::uint64_t h = splitmix64(seed_ ^ static_cast<std::uint64_t>(ix));
  h = splitmix64(h ^ (static_cast<std::uint64_t>(iy) * 0xd6e8feb86659fd93ull));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double ValueNoise::octave(double x, double y) const noexcept {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double tx = quintic(x - fx);
  const double ty = quintic(y - fy);
  const double a = lattice(ix, iy);
  const double b = lattice(ix + 1, iy);
  const double c = lattice(ix, iy + 1);
  const double d = lattice(ix + 1, iy + 1);
  const double top = a + tx * (b - a);
  const double bottom = c + tx * (d - c);
  return top + ty * (bottom - top);
}

double ValueNoise::operator()(double x, double y) const noexcept {
  double sum = 0.0;
  double norm = 0.0;
  double amplitude = 1.0;
  double period = base_period_;
  for (int o = 0; o < octaves_; ++o) {
    // Offset each octave so lattice points do not line up.
    sum += amplitude * octave(x / period + 17.31 * o, y / period + 5.77 * o);
    norm += amplitude;
    amplitude *= 0.5;
    period *= 0.5;
  }
  return sum / norm;
}

void SceneParams::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::Parameter, "scene: " + what); };
  if (width < 2 || height < 2) fail("width and height must be >= 2");
  if (!(alpha1 > 0.0)) fail("alpha1 must be > 0");
  const double horizon = -alpha0 / alpha1;
  if (!(horizon > 0.0 && horizon < height - 1)) {
    fail("horizon row " + std::to_string(horizon) + " must lie inside (0, height - 1)");
  }
  if (!(alpha0 + alpha1 * (height - 1) < width)) fail("road disparity reaches the image width");
  if (!(noise_sigma >= 0.0 && noise_sigma <= 0.1)) fail("noise_sigma must lie in [0, 0.1]");
  for (const Obstacle& o : obstacles) {
    if (o.w < 1 || o.h < 1 || o.u0 < 0 || o.v0 < 0 || o.u0 + o.w > width || o.v0 + o.h > height) {
      fail("obstacle rectangle must lie inside the frame");
    }
    if (!(o.disparity >= 0.0 && o.disparity < width)) fail("obstacle disparity out of range");
    const double ground = alpha0 + alpha1 * (o.v0 + o.h);
    if (o.disparity < ground) {
      throw Error(ErrorKind::Geometry,
                  "obstacle disparity " + std::to_string(o.disparity) +
                      " is below the road disparity " + std::to_string(ground) + " at its base");
    }
  }
}

Scene generate(const SceneParams& params) {
  params.validate();
  const int W = params.width;
  const int H = params.height;

  const ValueNoise background[3] = {ValueNoise(params.texture_seed * 8 + 0),
                                    ValueNoise(params.texture_seed * 8 + 1),
                                    ValueNoise(params.texture_seed * 8 + 2)};

  std::vector<std::size_t> order(params.obstacles.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return params.obstacles[a].disparity < params.obstacles[b].disparity;
  });
  std::vector<std::array<ValueNoise, 3>> obstacle_tex;
  obstacle_tex.reserve(params.obstacles.size());
  for (std::size_t i = 0; i < params.obstacles.size(); ++i) {
    const std::uint64_t base = splitmix64(params.texture_seed ^ (0x51ed27ull + i)) * 4;
    // Finer grain than the road so the two are easy to tell apart.
    obstacle_tex.push_back({ValueNoise(base, 24.0), ValueNoise(base + 1, 24.0),
                            ValueNoise(base + 2, 24.0)});
  }

  std::vector<double> left(static_cast<std::size_t>(W) * H * 3);
  std::vector<double> right(left.size());
  std::vector<double> disp(static_cast<std::size_t>(W) * H, 0.0);
  std::vector<bool> valid(disp.size(), false);
  std::vector<bool> road(disp.size(), false);

  for (int v = 0; v < H; ++v) {
    const double f = params.alpha0 + params.alpha1 * v;
    const bool is_road = f > 0.0;
    const double shift = is_road ? f : 0.0;
    for (int u = 0; u < W; ++u) {
      const std::size_t px = static_cast<std::size_t>(v) * W + u;
      for (int c = 0; c < 3; ++c) {
        left[3 * px + c] = background[c](u, v);
        right[3 * px + c] = background[c](u + shift, v);
      }
      if (is_road) {
        disp[px] = f;
        valid[px] = true;
        road[px] = true;
      }
    }
  }

  for (std::size_t idx : order) {
    const Obstacle& o = params.obstacles[idx];
    const auto& tex = obstacle_tex[idx];
    for (int v = o.v0; v < o.v0 + o.h; ++v) {
      for (int u = o.u0; u < o.u0 + o.w; ++u) {
        const std::size_t px = static_cast<std::size_t>(v) * W + u;
        for (int c = 0; c < 3; ++c) left[3 * px + c] = tex[c](u - o.u0, v - o.v0);
        disp[px] = o.disparity;
        valid[px] = true;
        road[px] = false;
      }
      // Right view: the obstacle point at left column x appears at x - d.
      for (int u = 0; u < W; ++u) {
        const double x = u + o.disparity;
        if (x < o.u0 || x >= o.u0 + o.w) continue;
        const std::size_t px = static_cast<std::size_t>(v) * W + u;
        for (int c = 0; c < 3; ++c) right[3 * px + c] = tex[c](x - o.u0, v - o.v0);
      }
    }
  }

  if (params.noise_sigma > 0.0) {
    std::mt19937_64 rng(splitmix64(params.texture_seed ^ 0x6e6f697365ull));
    std::normal_distribution<double> noise(0.0, params.noise_sigma);
    for (double& s : left) s = std::clamp(s + noise(rng), 0.0, 1.0);
    for (double& s : right) s = std::clamp(s + noise(rng), 0.0, 1.0);
  }

  Scene scene;
  scene.left = Image(W, H, 3, std::move(left));
  scene.right = Image(W, H, 3, std::move(right));
  scene.disp = DisparityMap(W, H, std::move(disp), std::move(valid));
  scene.road_mask = BinaryMask(W, H, std::move(road));
  scene.model.alpha0 = params.alpha0;
  scene.model.alpha1 = params.alpha1;
  scene.model.v_py = vanishing_row(params.alpha0, params.alpha1, H);
  return scene;
}

SceneParams draw_scene_params(std::uint64_t seed, const DrawOptions& opt) {
  std::mt19937_64 rng(splitmix64(seed));
  auto uniform = [&rng](double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  };

  SceneParams p;
  p.width = opt.width;
  p.height = opt.height;
  p.texture_seed = seed;
  p.noise_sigma = opt.noise_sigma;
  const double horizon = uniform(opt.horizon_min, opt.horizon_max) * opt.height;
  // Keep the bottom-row disparity below the width.
  const double slope_cap = 0.9 * opt.width / (opt.height - 1 - horizon);
  p.alpha1 = std::min(uniform(opt.alpha1_min, opt.alpha1_max), slope_cap);
  p.alpha0 = -p.alpha1 * horizon;

  const double budget = opt.max_obstacle_coverage * opt.width * opt.height;
  const double per_obstacle = opt.obstacles > 0 ? budget / opt.obstacles : 0.0;
  for (int i = 0; i < opt.obstacles; ++i) {
    // Base somewhere on the lower 70% of the road, standing on the ground.
    const double road_rows = opt.height - 1 - horizon;
    const int base = static_cast<int>(std::ceil(horizon + road_rows * uniform(0.3, 1.0)));
    const double ground = p.alpha0 + p.alpha1 * base;
    Obstacle o;
    o.disparity = ground + uniform(0.0, 1.5);
    // Metric size scales with disparity: roughly car-shaped in pixels.
    int h = static_cast<int>(std::lround(o.disparity * uniform(1.0, 2.0)));
    int w = static_cast<int>(std::lround(o.disparity * uniform(2.0, 4.0)));
    h = std::clamp(h, 4, base);
    w = std::clamp(w, 4, opt.width);
    while (static_cast<double>(w) * h > per_obstacle && (w > 4 || h > 4)) {
      w = std::max(4, static_cast<int>(w * 0.9));
      h = std::max(4, static_cast<int>(h * 0.9));
    }
    o.h = h;
    o.w = w;
    o.v0 = base - h;
    o.u0 = static_cast<int>(uniform(0.0, static_cast<double>(opt.width - w)));
    p.obstacles.push_back(o);
  }
  return p;
}

}  // namespace ptroad::synth
