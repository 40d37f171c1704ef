#include <doctest.h>

#include <cmath>
#include <random>

#include "ptroad/road_fit.hpp"
#include "ptroad/synth.hpp"
#include "ptroad/vdisparity.hpp"
#include "ptroad/warp.hpp"

using namespace ptroad;
using namespace ptroad::synth;

TEST_CASE("default scene: road rows 81..374 at disparity f(v)") {
  const Scene s = generate(SceneParams{});
  CHECK(s.model.alpha0 == -20.0);
  CHECK(s.model.alpha1 == 0.25);
  CHECK(s.model.v_py == 80);
  for (int u : {0, 600, 1241}) {
    CHECK_FALSE(s.road_mask.at(u, 80));
    CHECK_FALSE(s.disp.valid(u, 80));
    CHECK(s.disp.value(u, 80) == 0.0);
    CHECK(s.road_mask.at(u, 81));
    CHECK(s.road_mask.at(u, 374));
    CHECK(s.disp.value(u, 200) == 30.0);
  }
  CHECK(s.road_mask.count() == static_cast<std::size_t>(1242) * (374 - 81 + 1));
}

TEST_CASE("v-disparity of a clean scene puts each road row in bin round(f(v))") {
  SceneParams p;
  p.width = 300;
  p.height = 200;
  p.alpha0 = -13.3;
  p.alpha1 = 0.37;
  const Scene s = generate(p);
  const VDisparityMap vd = build_vdisparity(s.disp, std::nullopt, false);
  for (int v = 0; v < p.height; ++v) {
    const double f = p.alpha0 + p.alpha1 * v;
    if (f <= 0.0) {
      CHECK(vd.row_sum(v) == 0.0);
      continue;
    }
    const int bin = static_cast<int>(std::floor(f + 0.5));
    CHECK(vd.at(bin, v) == p.width);
    CHECK(vd.row_sum(v) == p.width);
  }
}

TEST_CASE("warped right equals left on road pixels within the adjacent-pixel bound") {
  SceneParams p;
  p.width = 400;
  p.height = 150;
  p.alpha0 = -9.0;
  p.alpha1 = 0.21;
  const Scene s = generate(p);
  const WarpedImage w = transform_right_to_left(s.right, s.model);
  for (int v = 0; v < p.height; ++v) {
    double bound[3] = {0, 0, 0};
    for (int u = 1; u < p.width; ++u) {
      for (int c = 0; c < 3; ++c) {
        bound[c] = std::max(bound[c], std::abs(s.right.at(u, v, c) - s.right.at(u - 1, v, c)));
      }
    }
    for (int u = 0; u < p.width; ++u) {
      if (!s.road_mask.at(u, v) || !w.valid.at(u, v)) continue;
      for (int c = 0; c < 3; ++c) {
        CHECK(std::abs(w.image.at(u, v, c) - s.left.at(u, v, c)) <= bound[c] + 1e-12);
      }
    }
  }
}

TEST_CASE("an obstacle at integer disparity appears shifted by that disparity in the right view") {
  SceneParams p;
  p.obstacles.push_back({500, 170, 233, 200, 73.0});
  const Scene s = generate(p);
  CHECK_FALSE(s.road_mask.at(600, 250));
  CHECK(s.disp.value(600, 250) == 73.0);
  for (int v : {170, 250, 369}) {
    for (int u = 500; u < 733; u += 17) {
      for (int c = 0; c < 3; ++c) CHECK(s.right.at(u - 73, v, c) == s.left.at(u, v, c));
    }
  }
  // Road still visible below the obstacle.
  CHECK(s.road_mask.at(600, 372));
}

TEST_CASE("nearer obstacles are painted over farther ones") {
  SceneParams p;
  p.obstacles.push_back({600, 250, 100, 100, 80.0});  // near
  p.obstacles.push_back({550, 200, 200, 120, 70.0});  // far, overlaps
  const Scene s = generate(p);
  CHECK(s.disp.value(650, 300) == 80.0);
  CHECK(s.disp.value(560, 210) == 70.0);
}

TEST_CASE("identical parameters give identical scenes") {
  SceneParams p;
  p.width = 256;
  p.height = 128;
  p.alpha0 = -5;
  p.alpha1 = 0.2;
  p.noise_sigma = 0.01;
  p.texture_seed = 42;
  p.obstacles.push_back({10, 60, 30, 40, 17.0});
  const Scene a = generate(p);
  const Scene b = generate(p);
  CHECK(a.left == b.left);
  CHECK(a.right == b.right);
  CHECK(a.disp == b.disp);
  CHECK(a.road_mask == b.road_mask);
  CHECK(a.model == b.model);
  p.texture_seed = 43;
  CHECK_FALSE(generate(p).left == a.left);
}

TEST_CASE("noise keeps samples in [0, 1] and changes the image") {
  SceneParams p;
  p.width = 64;
  p.height = 64;
  p.alpha0 = -3;
  p.alpha1 = 0.2;
  const Scene clean = generate(p);
  p.noise_sigma = 0.1;
  const Scene noisy = generate(p);
  CHECK_FALSE(clean.left == noisy.left);
  for (double x : noisy.right.samples()) {
    CHECK(x >= 0.0);
    CHECK(x <= 1.0);
  }
}

TEST_CASE("parameter and geometry errors") {
  auto kind = [](const SceneParams& p) {
    try {
      generate(p);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Io;
  };
  SceneParams below;
  below.obstacles.push_back({100, 200, 50, 100, 50.0});  // f(300) = 55
  CHECK(kind(below) == ErrorKind::Geometry);
  SceneParams flat;
  flat.alpha1 = 0.0;
  CHECK(kind(flat) == ErrorKind::Parameter);
  SceneParams no_horizon;
  no_horizon.alpha0 = 5.0;
  CHECK(kind(no_horizon) == ErrorKind::Parameter);
  SceneParams loud;
  loud.noise_sigma = 0.2;
  CHECK(kind(loud) == ErrorKind::Parameter);
  SceneParams off_frame;
  off_frame.obstacles.push_back({1200, 200, 100, 100, 80.0});
  CHECK(kind(off_frame) == ErrorKind::Parameter);
}

TEST_CASE("value noise is bounded and continuous") {
  const ValueNoise n(9);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> uni(-500.0, 500.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = uni(rng), y = uni(rng);
    const double a = n(x, y);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
    CHECK(std::abs(n(x + 1e-6, y) - a) < 1e-5);
    CHECK(std::abs(n(x, y + 1e-6) - a) < 1e-5);
  }
  CHECK(ValueNoise(9)(3.5, 7.25) == n(3.5, 7.25));
  CHECK(ValueNoise(10)(3.5, 7.25) != n(3.5, 7.25));
}

TEST_CASE("drawn parameters respect the option ranges and obstacle budget") {
  DrawOptions opt;
  opt.obstacles = 2;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SceneParams p = draw_scene_params(seed, opt);
    CHECK_NOTHROW(p.validate());
    CHECK(p.alpha1 >= 0.1);
    CHECK(p.alpha1 <= 0.6);
    const double horizon = -p.alpha0 / p.alpha1;
    CHECK(horizon >= 0.15 * 375 - 1e-9);
    CHECK(horizon <= 0.5 * 375 + 1e-9);
    double area = 0.0;
    for (const Obstacle& o : p.obstacles) area += static_cast<double>(o.w) * o.h;
    CHECK(area <= 0.15 * 1242 * 375);
    CHECK(p.obstacles.size() == 2);
  }
  CHECK(draw_scene_params(5, opt).alpha1 == draw_scene_params(5, opt).alpha1);
}

TEST_CASE("property: 50 clean drawn scenes recover alpha1 within 2% and v_py within 2 rows") {
  const DrawOptions opt;
  int ok = 0;
  for (std::uint64_t seed = 1000; seed < 1050; ++seed) {
    const SceneParams p = draw_scene_params(seed, opt);
    const Scene s = generate(p);
    const RoadModel m = fit_road(s.disp, DPConfig{});
    const bool alpha_ok = std::abs(m.alpha1 - p.alpha1) <= 0.02 * p.alpha1;
    const bool row_ok = std::abs(m.v_py - s.model.v_py) <= 2;
    CHECK(alpha_ok);
    CHECK(row_ok);
    ok += alpha_ok && row_ok;
  }
  CHECK(ok == 50);
}
