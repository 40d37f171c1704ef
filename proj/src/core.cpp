#include "ptroad/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ptroad {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Parameter: return "parameter error";
    case ErrorKind::EmptyInput: return "empty input";
    case ErrorKind::Decode: return "decode error";
    case ErrorKind::Format: return "format error";
    case ErrorKind::Shape: return "shape error";
    case ErrorKind::DegenerateFit: return "degenerate fit";
    case ErrorKind::NonRoadGeometry: return "non-road geometry";
    case ErrorKind::UndefinedRecall: return "undefined recall";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Io: return "io error";
  }
  return "error";
}

namespace {

void check_extent(int width, int height, const char* what) {
  if (width < 0 || height < 0) {
    throw Error(ErrorKind::Shape, std::string(what) + ": negative dimensions");
  }
}

std::size_t area(int width, int height) {
  return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace

Image::Image(int width, int height, int channels)
    : Image(width, height, channels,
            std::vector<double>(area(std::max(width, 0), std::max(height, 0)) *
                                static_cast<std::size_t>(std::max(channels, 0)))) {}

Image::Image(int width, int height, int channels, std::vector<double> samples)
    : width_(width), height_(height), channels_(channels), samples_(std::move(samples)) {
  check_extent(width, height, "image");
  if (channels != 1 && channels != 3) {
    throw Error(ErrorKind::Format, "image: channels must be 1 or 3, got " +
                                       std::to_string(channels));
  }
  if (samples_.size() != area(width, height) * static_cast<std::size_t>(channels)) {
    throw Error(ErrorKind::Shape, "image: sample count does not match dimensions");
  }
  for (double s : samples_) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorKind::Parameter, "image: sample outside [0, 1]");
    }
  }
}

DisparityMap::DisparityMap(int width, int height)
    : DisparityMap(width, height,
                   std::vector<double>(area(std::max(width, 0), std::max(height, 0)), 0.0),
                   std::vector<bool>(area(std::max(width, 0), std::max(height, 0)), false)) {}

DisparityMap::DisparityMap(int width, int height, std::vector<double> values,
                           std::vector<bool> valid)
    : width_(width), height_(height), values_(std::move(values)), valid_(std::move(valid)) {
  check_extent(width, height, "disparity map");
  if (values_.size() != area(width, height) || valid_.size() != values_.size()) {
    throw Error(ErrorKind::Shape, "disparity map: buffer size does not match dimensions");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!valid_[i]) {
      values_[i] = 0.0;
      continue;
    }
    const double d = values_[i];
    if (!std::isfinite(d) || d < 0.0) {
      throw Error(ErrorKind::Format, "disparity map: valid disparity must be finite and >= 0");
    }
    if (d >= width) {
      throw Error(ErrorKind::Format, "disparity map: disparity " + std::to_string(d) +
                                         " is not below the image width " +
                                         std::to_string(width));
    }
  }
}

double DisparityMap::max_valid() const noexcept {
  double best = -1.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (valid_[i]) best = std::max(best, values_[i]);
  }
  return best;
}

std::size_t DisparityMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), true));
}

BinaryMask::BinaryMask(int width, int height, bool fill)
    : BinaryMask(width, height,
                 std::vector<bool>(area(std::max(width, 0), std::max(height, 0)), fill)) {}

BinaryMask::BinaryMask(int width, int height, std::vector<bool> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  check_extent(width, height, "mask");
  if (bits_.size() != area(width, height)) {
    throw Error(ErrorKind::Shape, "mask: bit count does not match dimensions");
  }
}

std::size_t BinaryMask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

ProbabilityMap::ProbabilityMap(int width, int height, std::vector<double> probs)
    : width_(width), height_(height), probs_(std::move(probs)) {
  check_extent(width, height, "probability map");
  if (probs_.size() != area(width, height)) {
    throw Error(ErrorKind::Shape, "probability map: value count does not match dimensions");
  }
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw Error(ErrorKind::Parameter, "probability map: value outside [0, 1]");
    }
  }
}

}  // namespace ptroad
