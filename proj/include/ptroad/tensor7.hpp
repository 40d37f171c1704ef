#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ptroad/core.hpp"
#include "ptroad/png_io.hpp"
#include "ptroad/warp.hpp"

namespace ptroad {

enum class Plane : int {
  LeftR = 0,
  LeftG,
  LeftB,
  RightR,
  RightG,
  RightB,
  Disparity,
};

/// Seven planes, channel-major, row-major within a plane: left RGB and warped
/// right RGB in [0, 1], then raw disparity in pixels.
class Tensor7 {
 public:
  static constexpr int kChannels = 7;

  Tensor7() = default;
  Tensor7(int width, int height);
  Tensor7(int width, int height, std::vector<float> data);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  float at(Plane plane, int u, int v) const noexcept { return data_[index(plane, u, v)]; }
  float& at(Plane plane, int u, int v) noexcept { return data_[index(plane, u, v)]; }

  std::span<const float> plane(Plane p) const noexcept {
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    return {data_.data() + static_cast<std::size_t>(p) * n, n};
  }
  const std::vector<float>& data() const noexcept { return data_; }

  /// Bitwise comparison, so NaN payloads and signed zeros count.
  bool bit_equal(const Tensor7& other) const noexcept;

 private:
  std::size_t index(Plane plane, int u, int v) const noexcept {
    return (static_cast<std::size_t>(plane) * height_ + v) * width_ + u;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

/// Inputs must already share dimensions (crop them with the same v_py).
/// Invalid disparity and invalid warped pixels are stored as 0.
Tensor7 assemble(const Image& left, const WarpedImage& right_t, const DisparityMap& disp);

inline constexpr std::size_t kPt7HeaderBytes = 24;
inline constexpr std::uint32_t kPt7Version = 1;

/// Header (magic "PT7T", version, height, width, channels, reserved; u32 LE),
/// float32 LE payload, u32 LE JSON length, RoadModel JSON.
Bytes write_pt7(const Tensor7& tensor, const RoadModel& meta);
/// Throws Format naming the byte offset on bad magic, version, channel count,
/// truncation, trailing data or unreadable metadata.
std::pair<Tensor7, RoadModel> read_pt7(std::span<const std::uint8_t> bytes);

}  // namespace ptroad
