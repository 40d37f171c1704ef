#include "ptroad/tensor7.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <string>

#include "ptroad/road_fit.hpp"

namespace ptroad {

Tensor7::Tensor7(int width, int height)
    : Tensor7(width, height,
              std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) *
                                 std::max(height, 0) * kChannels, 0.0f)) {}

Tensor7::Tensor7(int width, int height, std::vector<float> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 0 || height < 0) throw Error(ErrorKind::Shape, "tensor: negative dimensions");
  if (data_.size() != static_cast<std::size_t>(width) * height * kChannels) {
    throw Error(ErrorKind::Shape, "tensor: payload does not match 7 x height x width");
  }
}

bool Tensor7::bit_equal(const Tensor7& other) const noexcept {
  return width_ == other.width_ && height_ == other.height_ &&
         data_.size() == other.data_.size() &&
         (data_.empty() ||
          std::memcmp(data_.data(), other.data_.data(), data_.size() * sizeof(float)) == 0);
}

Tensor7 assemble(const Image& left, const WarpedImage& right_t, const DisparityMap& disp) {
  const Image& right = right_t.image;
  if (left.channels() != 3 || right.channels() != 3) {
    throw Error(ErrorKind::Format, "assemble: left and warped right images must be RGB");
  }
  const int w = left.width();
  const int h = left.height();
  if (right.width() != w || right.height() != h || disp.width() != w || disp.height() != h ||
      right_t.valid.width() != w || right_t.valid.height() != h) {
    throw Error(ErrorKind::Shape, "assemble: inputs must share dimensions (left " +
                                      std::to_string(w) + "x" + std::to_string(h) + ")");
  }

  Tensor7 t(w, h);
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      for (int c = 0; c < 3; ++c) {
        t.at(static_cast<Plane>(c), u, v) = static_cast<float>(left.at(u, v, c));
        t.at(static_cast<Plane>(3 + c), u, v) =
            right_t.valid.at(u, v) ? static_cast<float>(right.at(u, v, c)) : 0.0f;
      }
      t.at(Plane::Disparity, u, v) = disp.valid(u, v) ? static_cast<float>(disp.value(u, v)) : 0.0f;
    }
  }
  return t;
}

namespace {

void put_u32(Bytes& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(x >> (8 * i)));
}

std::uint32_t get_u32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint32_t x = 0;
  for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(bytes[offset + i]) << (8 * i);
  return x;
}

[[noreturn]] void fail(std::size_t offset, const std::string& what) {
  throw Error(ErrorKind::Format, "pt7: " + what + " at byte offset " + std::to_string(offset));
}

void need(std::span<const std::uint8_t> bytes, std::size_t offset, std::size_t count,
          const char* what) {
  if (bytes.size() < offset || bytes.size() - offset < count) {
    fail(bytes.size(), std::string("truncated ") + what + " (needed " + std::to_string(count) +
                           " bytes from offset " + std::to_string(offset) + ")");
  }
}

}  // namespace

Bytes write_pt7(const Tensor7& tensor, const RoadModel& meta) {
  const std::string json = road_model_to_json(meta);
  Bytes out;
  out.reserve(kPt7HeaderBytes + tensor.data().size() * 4 + 4 + json.size());
  for (char c : {'P', 'T', '7', 'T'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, kPt7Version);
  put_u32(out, static_cast<std::uint32_t>(tensor.height()));
  put_u32(out, static_cast<std::uint32_t>(tensor.width()));
  put_u32(out, Tensor7::kChannels);
  put_u32(out, 0);
  for (float f : tensor.data()) put_u32(out, std::bit_cast<std::uint32_t>(f));
  put_u32(out, static_cast<std::uint32_t>(json.size()));
  out.insert(out.end(), json.begin(), json.end());
  return out;
}

std::pair<Tensor7, RoadModel> read_pt7(std::span<const std::uint8_t> bytes) {
  need(bytes, 0, kPt7HeaderBytes, "header");
  if (std::memcmp(bytes.data(), "PT7T", 4) != 0) fail(0, "bad magic");
  if (get_u32(bytes, 4) != kPt7Version) {
    fail(4, "unsupported version " + std::to_string(get_u32(bytes, 4)));
  }
  const std::uint32_t height = get_u32(bytes, 8);
  const std::uint32_t width = get_u32(bytes, 12);
  if (get_u32(bytes, 16) != Tensor7::kChannels) {
    fail(16, "channel count " + std::to_string(get_u32(bytes, 16)) + " is not 7");
  }
  if (get_u32(bytes, 20) != 0) fail(20, "reserved field is not zero");
  if (height > 0x7fffffffu || width > 0x7fffffffu) fail(8, "dimensions out of range");

  const std::size_t values = static_cast<std::size_t>(height) * width * Tensor7::kChannels;
  std::size_t offset = kPt7HeaderBytes;
  if (values > (bytes.size() - offset) / 4) {
    fail(bytes.size(), "truncated payload (expected " + std::to_string(values * 4) +
                           " bytes from offset " + std::to_string(offset) + ")");
  }
  std::vector<float> data(values);
  for (std::size_t i = 0; i < values; ++i, offset += 4) {
    data[i] = std::bit_cast<float>(get_u32(bytes, offset));
  }

  need(bytes, offset, 4, "metadata length");
  const std::uint32_t json_len = get_u32(bytes, offset);
  offset += 4;
  need(bytes, offset, json_len, "metadata");
  const std::string json(reinterpret_cast<const char*>(bytes.data() + offset), json_len);
  RoadModel meta;
  try {
    meta = road_model_from_json(json);
  } catch (const Error& e) {
    fail(offset, e.what());
  }
  offset += json_len;
  if (offset != bytes.size()) fail(offset, "trailing bytes after metadata");

  return {Tensor7(static_cast<int>(width), static_cast<int>(height), std::move(data)), meta};
}

}  // namespace ptroad
