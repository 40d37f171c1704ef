#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "ptroad/core.hpp"

namespace ptroad {

using Bytes = std::vector<std::uint8_t>;

/// Decoded PNG in its native sample depth, before any semantic scaling.
struct RawPng {
  int width = 0;
  int height = 0;
  int channels = 0;   // 1 (gray) or 3 (RGB); palette and alpha are rejected
  int bit_depth = 0;  // 8 or 16; sub-byte grayscale is expanded to 8
  std::vector<std::uint16_t> samples;  // interleaved, row-major
};

RawPng decode_png(std::span<const std::uint8_t> bytes);
/// Deterministic encoder (no timestamps, fixed zlib settings). `bit_depth`
/// may be 1, 8 or 16; 1 is only accepted for single-channel data with samples
/// in {0, 1}.
Bytes encode_png(const RawPng& png);

// KITTI disparity convention: 16-bit gray, value = raw / 256, raw 0 = invalid.
DisparityMap load_disparity_png16(std::span<const std::uint8_t> bytes);
/// Inverse of load_disparity_png16. Throws Parameter if a valid value is not
/// representable as raw / 256 with raw in [1, 65535].
Bytes encode_disparity_png16(const DisparityMap& disp);
/// Rounds to the nearest 1/256 instead of requiring exact representability.
Bytes encode_disparity_png16_quantized(const DisparityMap& disp);
/// Raw 16-bit samples of a disparity PNG, for bit-exact comparisons.
std::vector<std::uint16_t> disparity_raw(const DisparityMap& disp);

Image load_image(std::span<const std::uint8_t> bytes);
/// 8-bit gray or RGB encoding with samples rounded to the nearest raw/255.
Bytes encode_image_png8(const Image& img);

/// 8-bit or 1-bit gray mask; nonzero = true.
BinaryMask load_mask(std::span<const std::uint8_t> bytes);
Bytes encode_mask_png8(const BinaryMask& mask);
Bytes encode_mask_png1(const BinaryMask& mask);

/// KITTI road ground truth in RGB: road iff red > 127 and blue > 127, valid
/// iff red > 127.
struct KittiGroundTruth {
  BinaryMask road;
  BinaryMask valid;
};
KittiGroundTruth load_kitti_gt(std::span<const std::uint8_t> bytes);

/// 8-bit (raw / 255) or 16-bit (raw / 65535) grayscale probability map.
ProbabilityMap load_probability(std::span<const std::uint8_t> bytes);

Bytes read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace ptroad
