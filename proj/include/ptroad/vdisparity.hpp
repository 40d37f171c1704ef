#pragma once

#include <optional>
#include <vector>

#include "ptroad/core.hpp"

namespace ptroad {

/// Row-wise disparity histogram p(d, v). Entry (d, v) counts the valid pixels
/// of row v whose disparity rounds to bin d; when normalized every entry is
/// divided by the source width.
class VDisparityMap {
 public:
  VDisparityMap() = default;
  /// `counts` is indexed [v * d_bins + d]. Validates non-negativity, and the
  /// [0, 1] range when `normalized`.
  VDisparityMap(int height, int d_bins, std::vector<double> counts, bool normalized);

  int height() const noexcept { return height_; }
  int d_bins() const noexcept { return d_bins_; }
  int d_max() const noexcept { return d_bins_ - 1; }
  bool normalized() const noexcept { return normalized_; }

  double at(int d, int v) const noexcept {
    return counts_[static_cast<std::size_t>(v) * d_bins_ + d];
  }
  double row_sum(int v) const noexcept;
  /// Largest entry (0 for an empty map).
  double max_value() const noexcept;

  const std::vector<double>& counts() const noexcept { return counts_; }

  bool operator==(const VDisparityMap&) const = default;

 private:
  int height_ = 0;
  int d_bins_ = 0;
  std::vector<double> counts_;
  bool normalized_ = false;
};

/// Histograms every row of `disp`. Disparities are binned by
/// round-half-away-from-zero; bins above `d_max` are discarded. Without
/// `d_max` the bin range is ceil(max valid disparity).
VDisparityMap build_vdisparity(const DisparityMap& disp, std::optional<int> d_max = std::nullopt,
                               bool normalize = true);

}  // namespace ptroad
