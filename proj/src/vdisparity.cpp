#include "ptroad/vdisparity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ptroad {

VDisparityMap::VDisparityMap(int height, int d_bins, std::vector<double> counts,
                             bool normalized)
    : height_(height), d_bins_(d_bins), counts_(std::move(counts)), normalized_(normalized) {
  if (height < 0 || d_bins < 0) {
    throw Error(ErrorKind::Shape, "v-disparity: negative dimensions");
  }
  if (counts_.size() != static_cast<std::size_t>(height) * d_bins) {
    throw Error(ErrorKind::Shape, "v-disparity: count buffer does not match dimensions");
  }
  for (double c : counts_) {
    if (!(c >= 0.0)) throw Error(ErrorKind::Parameter, "v-disparity: negative entry");
    if (normalized_ && c > 1.0) {
      throw Error(ErrorKind::Parameter, "v-disparity: normalized entry above 1");
    }
  }
}

double VDisparityMap::row_sum(int v) const noexcept {
  const auto first = counts_.begin() + static_cast<std::ptrdiff_t>(v) * d_bins_;
  return std::accumulate(first, first + d_bins_, 0.0);
}

double VDisparityMap::max_value() const noexcept {
  return counts_.empty() ? 0.0 : *std::max_element(counts_.begin(), counts_.end());
}

VDisparityMap build_vdisparity(const DisparityMap& disp, std::optional<int> d_max,
                               bool normalize) {
  if (d_max && *d_max < 0) {
    throw Error(ErrorKind::Parameter, "d_max must be >= 0, got " + std::to_string(*d_max));
  }
  int top = 0;
  if (d_max) {
    top = *d_max;
  } else {
    const double max_disp = disp.max_valid();
    if (max_disp < 0.0) {
      throw Error(ErrorKind::EmptyInput,
                  "disparity map has no valid pixels and no d_max was given");
    }
    top = static_cast<int>(std::ceil(max_disp));
  }

  const int bins = top + 1;
  std::vector<double> counts(static_cast<std::size_t>(disp.height()) * bins, 0.0);
  for (int v = 0; v < disp.height(); ++v) {
    double* row = counts.data() + static_cast<std::size_t>(v) * bins;
    for (int u = 0; u < disp.width(); ++u) {
      if (!disp.valid(u, v)) continue;
      // std::round rounds halfway cases away from zero.
      const double bin = std::round(disp.value(u, v));
      if (bin > top) continue;
      row[static_cast<int>(bin)] += 1.0;
    }
  }
  if (normalize && disp.width() > 0) {
    const double w = disp.width();
    for (double& c : counts) c /= w;
  }
  return VDisparityMap(disp.height(), bins, std::move(counts), normalize);
}

}  // namespace ptroad
