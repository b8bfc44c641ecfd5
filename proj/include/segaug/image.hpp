/*
 * Copyright 2026 The segaug Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file image.hpp
 * @brief RGB8 raster images with lossless PNG / binary PPM (P6) I/O.
 */

#ifndef SEGAUG_IMAGE_HPP
#define SEGAUG_IMAGE_HPP

#include <png.h>

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace segaug {

struct Color {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr auto operator<=>(const Color&, const Color&) = default;
};

inline constexpr Color kWhite{255, 255, 255};
inline constexpr Color kBlack{0, 0, 0};

enum class ImageErrorKind {
  kUnreadable,
  kUnsupportedFormat,
  kCorruptStream,
  kUnwritable,
  kInvalidImage,
};

class ImageError : public std::runtime_error {
 public:
  ImageError(ImageErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ImageErrorKind kind() const noexcept { return kind_; }

 private:
  ImageErrorKind kind_;
};

/// Row-major W x H grid of RGB8 pixels. Dimensions are at least 1x1.
class RasterImage {
 public:
  RasterImage(int width, int height, Color fill = kWhite)
      : width_(width), height_(height) {
    check_dimensions(width, height);
    pixels_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  RasterImage(int width, int height, std::vector<Color> pixels)
      : width_(width), height_(height), pixels_(std::move(pixels)) {
    check_dimensions(width, height);
    if (pixels_.size() != static_cast<std::size_t>(width) * height) {
      throw ImageError(ImageErrorKind::kInvalidImage,
                       "pixel count does not match width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  bool contains(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  Color& at(int x, int y) { return pixels_[index(x, y)]; }
  const Color& at(int x, int y) const { return pixels_[index(x, y)]; }
  Color& operator[](std::size_t i) { return pixels_[i]; }
  const Color& operator[](std::size_t i) const { return pixels_[i]; }

  std::span<Color> pixels() noexcept { return pixels_; }
  std::span<const Color> pixels() const noexcept { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  static void check_dimensions(int width, int height) {
    if (width < 1 || height < 1) {
      throw ImageError(ImageErrorKind::kInvalidImage,
                       "image dimensions must be at least 1x1");
    }
  }

  int width_;
  int height_;
  std::vector<Color> pixels_;
};

enum class ImageFormat { kPng, kPpm };

namespace detail {

inline constexpr std::uint8_t kPngSignature[8] = {0x89, 'P', 'N', 'G',
                                                  '\r', '\n', 0x1a, '\n'};

inline std::uint8_t composite_over_white(std::uint8_t c, std::uint8_t a) {
  const unsigned v = static_cast<unsigned>(c) * a + 255u * (255u - a) + 127u;
  return static_cast<std::uint8_t>(v / 255u);
}

// Reads one whitespace/comment separated unsigned token of a PPM header.
inline bool read_ppm_token(std::span<const std::uint8_t> data, std::size_t& pos,
                           unsigned long& value) {
  while (pos < data.size()) {
    if (data[pos] == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(data[pos])) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= data.size() || !std::isdigit(data[pos])) return false;
  value = 0;
  while (pos < data.size() && std::isdigit(data[pos])) {
    value = value * 10 + (data[pos] - '0');
    if (value > (1ul << 24)) return false;
    ++pos;
  }
  return true;
}

}  // namespace detail

/// Detects the container from magic bytes. Throws kUnsupportedFormat.
inline ImageFormat sniff_format(std::span<const std::uint8_t> data) {
  if (data.size() >= 8 &&
      std::equal(std::begin(detail::kPngSignature),
                 std::end(detail::kPngSignature), data.begin())) {
    return ImageFormat::kPng;
  }
  if (data.size() >= 2 && data[0] == 'P' && data[1] == '6') {
    return ImageFormat::kPpm;
  }
  throw ImageError(ImageErrorKind::kUnsupportedFormat,
                   "not a PNG or binary PPM (P6) stream");
}

inline RasterImage decode_ppm(std::span<const std::uint8_t> data) {
  if (data.size() < 2 || data[0] != 'P' || data[1] != '6') {
    throw ImageError(ImageErrorKind::kUnsupportedFormat, "missing P6 magic");
  }
  std::size_t pos = 2;
  unsigned long width = 0, height = 0, maxval = 0;
  if (!detail::read_ppm_token(data, pos, width) ||
      !detail::read_ppm_token(data, pos, height) ||
      !detail::read_ppm_token(data, pos, maxval)) {
    throw ImageError(ImageErrorKind::kCorruptStream, "truncated PPM header");
  }
  if (maxval != 255) {
    throw ImageError(ImageErrorKind::kUnsupportedFormat,
                     "PPM maxval must be 255, got " + std::to_string(maxval));
  }
  if (width == 0 || height == 0) {
    throw ImageError(ImageErrorKind::kCorruptStream, "PPM has zero dimension");
  }
  if (pos >= data.size() || !std::isspace(data[pos])) {
    throw ImageError(ImageErrorKind::kCorruptStream, "truncated PPM header");
  }
  ++pos;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (data.size() - pos < count * 3) {
    throw ImageError(ImageErrorKind::kCorruptStream, "truncated PPM raster");
  }
  std::vector<Color> pixels(count);
  for (std::size_t i = 0; i < count; ++i, pos += 3) {
    pixels[i] = Color{data[pos], data[pos + 1], data[pos + 2]};
  }
  return RasterImage(static_cast<int>(width), static_cast<int>(height),
                     std::move(pixels));
}

inline std::vector<std::uint8_t> encode_ppm(const RasterImage& image) {
  const std::string header = "P6\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + image.size() * 3);
  for (const Color& c : image.pixels()) {
    out.push_back(c.r);
    out.push_back(c.g);
    out.push_back(c.b);
  }
  return out;
}

/// Decodes any PNG libpng understands to RGB8; alpha is composited over
/// opaque white.
inline RasterImage decode_png(std::span<const std::uint8_t> data) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, data.data(), data.size())) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ImageError(ImageErrorKind::kCorruptStream, "PNG header: " + msg);
  }
  img.format = PNG_FORMAT_RGBA;
  if (img.width < 1 || img.height < 1 || img.width > (1u << 24) ||
      img.height > (1u << 24)) {
    png_image_free(&img);
    throw ImageError(ImageErrorKind::kCorruptStream, "PNG dimensions invalid");
  }
  std::vector<std::uint8_t> rgba(PNG_IMAGE_SIZE(img));
  if (!png_image_finish_read(&img, nullptr, rgba.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ImageError(ImageErrorKind::kCorruptStream, "PNG data: " + msg);
  }
  const int width = static_cast<int>(img.width);
  const int height = static_cast<int>(img.height);
  std::vector<Color> pixels(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const std::uint8_t* p = &rgba[i * 4];
    pixels[i] = Color{detail::composite_over_white(p[0], p[3]),
                      detail::composite_over_white(p[1], p[3]),
                      detail::composite_over_white(p[2], p[3])};
  }
  return RasterImage(width, height, std::move(pixels));
}

inline std::vector<std::uint8_t> encode_png(const RasterImage& image) {
  std::vector<std::uint8_t> rgb;
  rgb.reserve(image.size() * 3);
  for (const Color& c : image.pixels()) {
    rgb.push_back(c.r);
    rgb.push_back(c.g);
    rgb.push_back(c.b);
  }
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width());
  img.height = static_cast<png_uint_32>(image.height());
  img.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(img, size, 0, rgb.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ImageError(ImageErrorKind::kUnwritable, "PNG encode: " + msg);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, rgb.data(), 0,
                                 nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw ImageError(ImageErrorKind::kUnwritable, "PNG encode: " + msg);
  }
  out.resize(size);
  return out;
}

inline RasterImage decode_image(std::span<const std::uint8_t> data) {
  switch (sniff_format(data)) {
    case ImageFormat::kPng:
      return decode_png(data);
    case ImageFormat::kPpm:
      return decode_ppm(data);
  }
  throw ImageError(ImageErrorKind::kUnsupportedFormat, "unknown format");
}

/// PPM for `.ppm`/`.pnm` extensions, PNG otherwise.
inline ImageFormat format_for_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return (ext == ".ppm" || ext == ".pnm") ? ImageFormat::kPpm
                                          : ImageFormat::kPng;
}

inline std::vector<std::uint8_t> read_file_bytes(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in || std::filesystem::is_directory(path)) {
    throw ImageError(ImageErrorKind::kUnreadable,
                     "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw ImageError(ImageErrorKind::kUnreadable,
                     "read failed for " + path.string());
  }
  return bytes;
}

inline RasterImage load_image(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  if (bytes.empty()) {
    throw ImageError(ImageErrorKind::kCorruptStream,
                     "empty file " + path.string());
  }
  return decode_image(bytes);
}

inline void save_image(const RasterImage& image,
                       const std::filesystem::path& path) {
  if (path.empty() || path.filename().empty()) {
    throw ImageError(ImageErrorKind::kUnwritable, "empty output path");
  }
  const std::vector<std::uint8_t> bytes =
      format_for_path(path) == ImageFormat::kPpm ? encode_ppm(image)
                                                 : encode_png(image);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw ImageError(ImageErrorKind::kUnwritable,
                     "cannot open " + path.string() + " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw ImageError(ImageErrorKind::kUnwritable,
                     "write failed for " + path.string());
  }
}

}  // namespace segaug

#endif  // SEGAUG_IMAGE_HPP
