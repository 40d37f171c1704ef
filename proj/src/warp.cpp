#include "ptroad/warp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ptroad {

WarpedImage shift_rows(const Image& src, const std::vector<double>& shift) {
  const int width = src.width();
  const int height = src.height();
  const int channels = src.channels();
  if (shift.size() != static_cast<std::size_t>(height)) {
    throw Error(ErrorKind::Shape, "shift_rows: need one shift per row");
  }

  Image out(width, height, channels);
  BinaryMask valid(width, height, false);
  for (int v = 0; v < height; ++v) {
    for (int u = 0; u < width; ++u) {
      const double us = u - shift[v];
      if (!(us >= 0.0 && us <= width - 1)) continue;
      const int u0 = static_cast<int>(std::floor(us));
      const double t = us - u0;
      valid.set(u, v, true);
      for (int c = 0; c < channels; ++c) {
        const double a = src.at(u0, v, c);
        out.at(u, v, c) = t > 0.0 ? a + t * (src.at(u0 + 1, v, c) - a) : a;
      }
    }
  }
  return {std::move(out), std::move(valid)};
}

WarpedImage transform_right_to_left(const Image& right, const RoadModel& model) {
  if (!(model.alpha1 > 0.0)) {
    throw Error(ErrorKind::Parameter, "transform_right_to_left requires alpha1 > 0");
  }
  std::vector<double> shift(right.height());
  for (int v = 0; v < right.height(); ++v) {
    shift[v] = std::max(0.0, model.disparity_at(v));
  }
  return shift_rows(right, shift);
}

namespace {

void check_row(int v_py, int height) {
  if (v_py < 0 || v_py >= height) {
    throw Error(ErrorKind::Parameter, "crop row " + std::to_string(v_py) +
                                          " outside [0, " + std::to_string(height) + ")");
  }
}

}  // namespace

Image crop_above_horizon(const Image& img, int v_py) {
  check_row(v_py, img.height());
  const auto s = img.samples();
  const std::size_t skip = static_cast<std::size_t>(v_py) * img.width() * img.channels();
  return Image(img.width(), img.height() - v_py, img.channels(),
               std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(skip), s.end()));
}

DisparityMap crop_above_horizon(const DisparityMap& disp, int v_py) {
  check_row(v_py, disp.height());
  const int height = disp.height() - v_py;
  std::vector<double> values;
  std::vector<bool> valid;
  values.reserve(static_cast<std::size_t>(height) * disp.width());
  valid.reserve(values.capacity());
  for (int v = v_py; v < disp.height(); ++v) {
    for (int u = 0; u < disp.width(); ++u) {
      values.push_back(disp.value(u, v));
      valid.push_back(disp.valid(u, v));
    }
  }
  return DisparityMap(disp.width(), height, std::move(values), std::move(valid));
}

BinaryMask crop_above_horizon(const BinaryMask& mask, int v_py) {
  check_row(v_py, mask.height());
  BinaryMask out(mask.width(), mask.height() - v_py);
  for (int v = v_py; v < mask.height(); ++v) {
    for (int u = 0; u < mask.width(); ++u) out.set(u, v - v_py, mask.at(u, v));
  }
  return out;
}

WarpedImage crop_above_horizon(const WarpedImage& img, int v_py) {
  return {crop_above_horizon(img.image, v_py), crop_above_horizon(img.valid, v_py)};
}

ProbabilityMap crop_above_horizon(const ProbabilityMap& prob, int v_py) {
  check_row(v_py, prob.height());
  const auto p = prob.probs();
  const std::size_t skip = static_cast<std::size_t>(v_py) * prob.width();
  return ProbabilityMap(prob.width(), prob.height() - v_py,
                        std::vector<double>(p.begin() + static_cast<std::ptrdiff_t>(skip), p.end()));
}

}  // namespace ptroad
