#include "ptroad/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstring>
#include <fstream>
#include <string>
#include <system_error>

namespace ptroad {

namespace {

struct ErrorSink {
  std::string message;
};

[[noreturn]] void on_png_error(png_structp png, png_const_charp msg) {
  if (auto* sink = static_cast<ErrorSink*>(png_get_error_ptr(png))) {
    sink->message = msg ? msg : "unknown libpng error";
  }
  png_longjmp(png, 1);
}

void on_png_warning(png_structp, png_const_charp) {}

struct ReadCursor {
  std::span<const std::uint8_t> bytes;
  std::size_t offset = 0;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + count > cursor->bytes.size()) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, cursor->bytes.data() + cursor->offset, count);
  cursor->offset += count;
}

void write_to_memory(png_structp png, png_bytep data, png_size_t count) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + count);
}

void flush_memory(png_structp) {}

}  // namespace

RawPng decode_png(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorKind::Decode, "not a PNG stream (bad signature)");
  }

  ErrorSink sink;
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, &sink, on_png_error, on_png_warning);
  if (!png) throw Error(ErrorKind::Decode, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::Decode, "png_create_info_struct failed");
  }

  ReadCursor cursor{bytes, 0};
  RawPng out;
  std::vector<std::uint8_t> buffer;
  std::vector<png_bytep> rows;
  volatile bool format_ok = true;
  std::string format_message;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::Decode, "PNG decode failed: " + sink.message);
  }

  png_set_read_fn(png, &cursor, read_from_memory);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_GRAY) {
    out.channels = 1;
  } else if (color_type == PNG_COLOR_TYPE_RGB) {
    out.channels = 3;
  } else {
    format_ok = false;
    format_message = "unsupported PNG color type " + std::to_string(color_type) +
                     " (only gray and RGB are accepted)";
  }

  if (format_ok) {
    if (bit_depth < 8) {
      png_set_expand_gray_1_2_4_to_8(png);
      bit_depth = 8;
    }
    if (bit_depth == 16) png_set_swap(png);
    png_set_interlace_handling(png);
    png_read_update_info(png, info);

    const std::size_t row_bytes = png_get_rowbytes(png, info);
    buffer.resize(row_bytes * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) rows[y] = buffer.data() + y * row_bytes;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);

    out.width = static_cast<int>(width);
    out.height = static_cast<int>(height);
    out.bit_depth = bit_depth;
    const std::size_t count = static_cast<std::size_t>(width) * height * out.channels;
    out.samples.resize(count);
    if (bit_depth == 16) {
      for (std::size_t i = 0; i < count; ++i) {
        std::uint16_t s;
        std::memcpy(&s, buffer.data() + 2 * i, 2);
        out.samples[i] = s;
      }
    } else {
      for (std::size_t i = 0; i < count; ++i) out.samples[i] = buffer[i];
    }
  }

  png_destroy_read_struct(&png, &info, nullptr);
  if (!format_ok) throw Error(ErrorKind::Format, format_message);
  return out;
}

Bytes encode_png(const RawPng& raw) {
  if (raw.channels != 1 && raw.channels != 3) {
    throw Error(ErrorKind::Parameter, "encode_png: channels must be 1 or 3");
  }
  if (raw.bit_depth != 1 && raw.bit_depth != 8 && raw.bit_depth != 16) {
    throw Error(ErrorKind::Parameter, "encode_png: bit depth must be 1, 8 or 16");
  }
  if (raw.bit_depth == 1 && raw.channels != 1) {
    throw Error(ErrorKind::Parameter, "encode_png: 1-bit output must be single-channel");
  }
  if (raw.width <= 0 || raw.height <= 0) {
    throw Error(ErrorKind::Shape, "encode_png: PNG dimensions must be positive");
  }
  const std::size_t per_row = static_cast<std::size_t>(raw.width) * raw.channels;
  if (raw.samples.size() != per_row * raw.height) {
    throw Error(ErrorKind::Shape, "encode_png: sample count does not match dimensions");
  }
  const unsigned max_sample = raw.bit_depth == 16 ? 65535u : (raw.bit_depth == 8 ? 255u : 1u);

  // Pack rows up front so nothing below the setjmp allocates.
  std::size_t row_bytes = 0;
  if (raw.bit_depth == 16) {
    row_bytes = per_row * 2;
  } else if (raw.bit_depth == 8) {
    row_bytes = per_row;
  } else {
    row_bytes = (per_row + 7) / 8;
  }
  std::vector<std::uint8_t> buffer(row_bytes * raw.height, 0);
  for (int y = 0; y < raw.height; ++y) {
    std::uint8_t* row = buffer.data() + static_cast<std::size_t>(y) * row_bytes;
    for (std::size_t i = 0; i < per_row; ++i) {
      const unsigned s = raw.samples[static_cast<std::size_t>(y) * per_row + i];
      if (s > max_sample) {
        throw Error(ErrorKind::Parameter, "encode_png: sample exceeds bit depth");
      }
      if (raw.bit_depth == 16) {
        row[2 * i] = static_cast<std::uint8_t>(s >> 8);  // PNG is big-endian
        row[2 * i + 1] = static_cast<std::uint8_t>(s & 0xff);
      } else if (raw.bit_depth == 8) {
        row[i] = static_cast<std::uint8_t>(s);
      } else if (s) {
        row[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
      }
    }
  }
  std::vector<png_bytep> rows(raw.height);
  for (int y = 0; y < raw.height; ++y) {
    rows[y] = buffer.data() + static_cast<std::size_t>(y) * row_bytes;
  }

  Bytes out;
  out.reserve(buffer.size() / 2 + 64);

  ErrorSink sink;
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, &sink, on_png_error, on_png_warning);
  if (!png) throw Error(ErrorKind::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::Io, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::Io, "PNG encode failed: " + sink.message);
  }

  png_set_write_fn(png, &out, write_to_memory, flush_memory);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, static_cast<png_uint_32>(raw.width),
               static_cast<png_uint_32>(raw.height), raw.bit_depth,
               raw.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return out;
}

DisparityMap load_disparity_png16(std::span<const std::uint8_t> bytes) {
  RawPng raw = decode_png(bytes);
  if (raw.channels != 1) {
    throw Error(ErrorKind::Format, "disparity PNG must be single-channel, got " +
                                       std::to_string(raw.channels) + " channels");
  }
  if (raw.bit_depth != 16) {
    throw Error(ErrorKind::Format, "disparity PNG must be 16-bit, got " +
                                       std::to_string(raw.bit_depth) + "-bit");
  }
  std::vector<double> values(raw.samples.size());
  std::vector<bool> valid(raw.samples.size());
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    valid[i] = raw.samples[i] != 0;
    values[i] = raw.samples[i] / 256.0;
  }
  return DisparityMap(raw.width, raw.height, std::move(values), std::move(valid));
}

std::vector<std::uint16_t> disparity_raw(const DisparityMap& disp) {
  std::vector<std::uint16_t> raw(static_cast<std::size_t>(disp.width()) * disp.height(), 0);
  for (int v = 0; v < disp.height(); ++v) {
    for (int u = 0; u < disp.width(); ++u) {
      if (!disp.valid(u, v)) continue;
      const double scaled = disp.value(u, v) * 256.0;
      if (scaled != std::floor(scaled) || scaled < 1.0 || scaled > 65535.0) {
        throw Error(ErrorKind::Parameter,
                    "disparity " + std::to_string(disp.value(u, v)) +
                        " is not representable as raw/256 with raw in [1, 65535]");
      }
      raw[static_cast<std::size_t>(v) * disp.width() + u] = static_cast<std::uint16_t>(scaled);
    }
  }
  return raw;
}

Bytes encode_disparity_png16(const DisparityMap& disp) {
  return encode_png({disp.width(), disp.height(), 1, 16, disparity_raw(disp)});
}

Bytes encode_disparity_png16_quantized(const DisparityMap& disp) {
  RawPng raw{disp.width(), disp.height(), 1, 16, {}};
  raw.samples.assign(static_cast<std::size_t>(disp.width()) * disp.height(), 0);
  for (int v = 0; v < disp.height(); ++v) {
    for (int u = 0; u < disp.width(); ++u) {
      if (!disp.valid(u, v)) continue;
      const double scaled = std::round(disp.value(u, v) * 256.0);
      raw.samples[static_cast<std::size_t>(v) * disp.width() + u] =
          static_cast<std::uint16_t>(std::clamp(scaled, 1.0, 65535.0));
    }
  }
  return encode_png(raw);
}

Image load_image(std::span<const std::uint8_t> bytes) {
  RawPng raw = decode_png(bytes);
  if (raw.bit_depth != 8) {
    throw Error(ErrorKind::Format, "image PNG must be 8-bit, got " +
                                       std::to_string(raw.bit_depth) + "-bit");
  }
  std::vector<double> samples(raw.samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = raw.samples[i] / 255.0;
  return Image(raw.width, raw.height, raw.channels, std::move(samples));
}

Bytes encode_image_png8(const Image& img) {
  RawPng raw{img.width(), img.height(), img.channels(), 8, {}};
  raw.samples.reserve(img.samples().size());
  for (double s : img.samples()) {
    raw.samples.push_back(static_cast<std::uint16_t>(std::lround(s * 255.0)));
  }
  return encode_png(raw);
}

BinaryMask load_mask(std::span<const std::uint8_t> bytes) {
  RawPng raw = decode_png(bytes);
  if (raw.channels != 1) {
    throw Error(ErrorKind::Format, "mask PNG must be single-channel");
  }
  std::vector<bool> bits(raw.samples.size());
  for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = raw.samples[i] != 0;
  return BinaryMask(raw.width, raw.height, std::move(bits));
}

namespace {

RawPng mask_raw(const BinaryMask& mask, int bit_depth, std::uint16_t on) {
  RawPng raw{mask.width(), mask.height(), 1, bit_depth, {}};
  raw.samples.resize(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) raw.samples[i] = mask.at_index(i) ? on : 0;
  return raw;
}

}  // namespace

Bytes encode_mask_png8(const BinaryMask& mask) { return encode_png(mask_raw(mask, 8, 255)); }

Bytes encode_mask_png1(const BinaryMask& mask) { return encode_png(mask_raw(mask, 1, 1)); }

KittiGroundTruth load_kitti_gt(std::span<const std::uint8_t> bytes) {
  RawPng raw = decode_png(bytes);
  if (raw.channels != 3 || raw.bit_depth != 8) {
    throw Error(ErrorKind::Format, "KITTI ground truth must be 8-bit RGB");
  }
  const std::size_t n = static_cast<std::size_t>(raw.width) * raw.height;
  std::vector<bool> road(n), valid(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto red = raw.samples[3 * i];
    const auto blue = raw.samples[3 * i + 2];
    valid[i] = red > 127;
    road[i] = red > 127 && blue > 127;
  }
  return {BinaryMask(raw.width, raw.height, std::move(road)),
          BinaryMask(raw.width, raw.height, std::move(valid))};
}

ProbabilityMap load_probability(std::span<const std::uint8_t> bytes) {
  RawPng raw = decode_png(bytes);
  if (raw.channels != 1) {
    throw Error(ErrorKind::Format, "probability PNG must be single-channel");
  }
  const double scale = raw.bit_depth == 16 ? 65535.0 : 255.0;
  std::vector<double> probs(raw.samples.size());
  for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = raw.samples[i] / scale;
  return ProbabilityMap(raw.width, raw.height, std::move(probs));
}

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorKind::Io, "failed reading " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string() + " for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Io, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot rename onto " + path.string() + ": " + ec.message());
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                                    text.size()));
}

}  // namespace ptroad
