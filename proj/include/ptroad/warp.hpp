#pragma once

#include <vector>

#include "ptroad/core.hpp"

namespace ptroad {

/// Right image rendered from the left viewpoint. `valid` is false where the
/// source column fell outside the right image; such pixels hold 0.
struct WarpedImage {
  Image image;
  BinaryMask valid;
};

/// out(u, v) = right(u - f(v), v) with f(v) = max(0, alpha0 + alpha1 * v),
/// horizontally interpolated. Throws Parameter when alpha1 <= 0.
WarpedImage transform_right_to_left(const Image& right, const RoadModel& model);

/// Same resampling with an arbitrary per-row shift (one entry per row, may be
/// negative). Exposed for inverse-warp checks.
WarpedImage shift_rows(const Image& src, const std::vector<double>& shift);

// Keep rows v_py .. height - 1. Throws Parameter unless 0 <= v_py < height.
Image crop_above_horizon(const Image& img, int v_py);
DisparityMap crop_above_horizon(const DisparityMap& disp, int v_py);
WarpedImage crop_above_horizon(const WarpedImage& img, int v_py);
BinaryMask crop_above_horizon(const BinaryMask& mask, int v_py);
ProbabilityMap crop_above_horizon(const ProbabilityMap& prob, int v_py);

}  // namespace ptroad
