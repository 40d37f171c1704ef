#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ptroad/error.hpp"

namespace ptroad {

// Coordinates: u is the column (left to right), v the row (top to bottom,
// row 0 at the top). Every raster below is stored row-major.

/// Intensity image with samples normalized to [0, 1], channels interleaved.
class Image {
 public:
  Image() = default;
  /// Zero-filled image.
  Image(int width, int height, int channels);
  /// Takes ownership of `samples`; validates size and range.
  Image(int width, int height, int channels, std::vector<double> samples);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  bool empty() const noexcept { return samples_.empty(); }

  double at(int u, int v, int c = 0) const noexcept {
    return samples_[index(u, v, c)];
  }
  double& at(int u, int v, int c = 0) noexcept { return samples_[index(u, v, c)]; }

  std::span<const double> samples() const noexcept { return samples_; }
  std::span<const double> row(int v) const noexcept {
    return {samples_.data() + static_cast<std::size_t>(v) * width_ * channels_,
            static_cast<std::size_t>(width_) * channels_};
  }

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int u, int v, int c) const noexcept {
    return (static_cast<std::size_t>(v) * width_ + u) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> samples_;
};

/// Left-referenced subpixel disparity: a left pixel at u matches the right
/// pixel at u - d. Invalid pixels carry value 0 and never enter statistics.
class DisparityMap {
 public:
  DisparityMap() = default;
  /// All-invalid map.
  DisparityMap(int width, int height);
  /// Validates: finite non-negative values, max valid value < width.
  DisparityMap(int width, int height, std::vector<double> values, std::vector<bool> valid);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  double value(int u, int v) const noexcept { return values_[index(u, v)]; }
  bool valid(int u, int v) const noexcept { return valid_[index(u, v)]; }

  /// Largest valid value, or a negative number if there is none.
  double max_valid() const noexcept;
  std::size_t valid_count() const noexcept;

  bool operator==(const DisparityMap&) const = default;

 private:
  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
  std::vector<bool> valid_;
};

/// Per-pixel boolean raster; true marks road (or, for validity masks, a pixel
/// that takes part in evaluation).
class BinaryMask {
 public:
  BinaryMask() = default;
  BinaryMask(int width, int height, bool fill = false);
  BinaryMask(int width, int height, std::vector<bool> bits);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  bool at(int u, int v) const { return bits_[index(u, v)]; }
  void set(int u, int v, bool value) { bits_[index(u, v)] = value; }
  bool at_index(std::size_t i) const { return bits_[i]; }
  std::size_t size() const noexcept { return bits_.size(); }
  std::size_t count() const noexcept;

  bool operator==(const BinaryMask&) const = default;

 private:
  std::size_t index(int u, int v) const noexcept {
    return static_cast<std::size_t>(v) * width_ + u;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<bool> bits_;
};

class ProbabilityMap {
 public:
  ProbabilityMap() = default;
  ProbabilityMap(int width, int height, std::vector<double> probs);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double at(int u, int v) const noexcept {
    return probs_[static_cast<std::size_t>(v) * width_ + u];
  }
  std::span<const double> probs() const noexcept { return probs_; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> probs_;
};

/// Linear road disparity profile f(v) = alpha0 + alpha1 * v, the row where it
/// crosses zero, and the DP settings it was produced with.
struct RoadModel {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  int v_py = 0;
  double fit_residual = 0.0;

  double lambda = 0.0;
  int tau_max = 0;
  int smoothness_sign = 1;

  double disparity_at(double v) const noexcept { return alpha0 + alpha1 * v; }

  bool operator==(const RoadModel&) const = default;
};

}  // namespace ptroad
