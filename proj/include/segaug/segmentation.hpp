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
 * @file segmentation.hpp
 * @brief Colour quantisation and connected-component labelling of logo
 *        images into segments with per-segment statistics.
 */

#ifndef SEGAUG_SEGMENTATION_HPP
#define SEGAUG_SEGMENTATION_HPP

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "segaug/image.hpp"

namespace segaug {

enum class Connectivity { kFour, kEight };

inline constexpr int kDefaultDropBits = 3;
inline constexpr Connectivity kDefaultConnectivity = Connectivity::kEight;
inline constexpr int kDefaultMinArea = 4;

struct BoundingBox {
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;  // inclusive
  int max_y = 0;  // inclusive

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct SegmentInfo {
  int id = 0;
  std::size_t area = 0;
  BoundingBox bbox;
  Color mean_color;
  double centroid_x = 0.0;
  double centroid_y = 0.0;
  bool touches_border = false;
};

/// Dense per-pixel labelling. Labels are 0..K-1 in raster-scan
/// first-encounter order.
struct SegmentMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;
  std::vector<SegmentInfo> segments;
  int background_id = 0;

  std::size_t segment_count() const noexcept { return segments.size(); }
  bool has_segment(int id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) < segments.size();
  }
  int label_at(int x, int y) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  const SegmentInfo& background() const { return segments[background_id]; }

  /// Binary mask of segment `id` (1 = member), row-major.
  std::vector<std::uint8_t> mask(int id) const {
    std::vector<std::uint8_t> m(labels.size(), 0);
    for (std::size_t i = 0; i < labels.size(); ++i) m[i] = labels[i] == id;
    return m;
  }
};

/// Keeps the top (8 - drop_bits) bits of every channel.
inline RasterImage quantize(const RasterImage& image, int drop_bits) {
  if (drop_bits < 0 || drop_bits > 7) {
    throw std::invalid_argument("drop_bits must be in [0, 7]");
  }
  RasterImage out = image;
  const auto q = [drop_bits](std::uint8_t v) {
    return static_cast<std::uint8_t>((v >> drop_bits) << drop_bits);
  };
  for (Color& c : out.pixels()) c = Color{q(c.r), q(c.g), q(c.b)};
  return out;
}

/// Largest-area segment among those touching the image border; ties go to
/// the lower id.
inline int identify_background(const std::vector<SegmentInfo>& segments) {
  int best = -1;
  for (const SegmentInfo& s : segments) {
    if (!s.touches_border) continue;
    if (best < 0 || s.area > segments[best].area) best = s.id;
  }
  if (best < 0) {
    throw std::logic_error("no border-touching segment");
  }
  return best;
}

/// Groups pixels of identical colour that are adjacent under
/// `connectivity` and fills in the per-segment statistics.
inline SegmentMap label_components(
    const RasterImage& image,
    Connectivity connectivity = kDefaultConnectivity) {
  const int w = image.width();
  const int h = image.height();
  SegmentMap map;
  map.width = w;
  map.height = h;
  map.labels.assign(image.size(), -1);

  static constexpr int kDx[8] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int kDy[8] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int neighbours = connectivity == Connectivity::kEight ? 8 : 4;

  struct Accum {
    std::uint64_t r = 0, g = 0, b = 0, x = 0, y = 0;
  };
  std::vector<Accum> sums;
  std::vector<int> stack;

  for (int y0 = 0; y0 < h; ++y0) {
    for (int x0 = 0; x0 < w; ++x0) {
      if (map.labels[image.index(x0, y0)] >= 0) continue;
      const int id = static_cast<int>(map.segments.size());
      const Color colour = image.at(x0, y0);
      SegmentInfo info;
      info.id = id;
      info.bbox = {x0, y0, x0, y0};
      Accum acc;

      map.labels[image.index(x0, y0)] = id;
      stack.assign(1, static_cast<int>(image.index(x0, y0)));
      while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int x = p % w;
        const int y = p / w;
        ++info.area;
        acc.r += colour.r;
        acc.g += colour.g;
        acc.b += colour.b;
        acc.x += x;
        acc.y += y;
        info.bbox.min_x = std::min(info.bbox.min_x, x);
        info.bbox.max_x = std::max(info.bbox.max_x, x);
        info.bbox.min_y = std::min(info.bbox.min_y, y);
        info.bbox.max_y = std::max(info.bbox.max_y, y);
        if (x == 0 || y == 0 || x == w - 1 || y == h - 1) {
          info.touches_border = true;
        }
        for (int k = 0; k < neighbours; ++k) {
          const int nx = x + kDx[k];
          const int ny = y + kDy[k];
          if (!image.contains(nx, ny)) continue;
          const std::size_t q = image.index(nx, ny);
          if (map.labels[q] >= 0 || image[q] != colour) continue;
          map.labels[q] = id;
          stack.push_back(static_cast<int>(q));
        }
      }

      const auto mean = [&info](std::uint64_t sum) {
        return static_cast<std::uint8_t>((sum + info.area / 2) / info.area);
      };
      info.mean_color = Color{mean(acc.r), mean(acc.g), mean(acc.b)};
      info.centroid_x = static_cast<double>(acc.x) / info.area;
      info.centroid_y = static_cast<double>(acc.y) / info.area;
      map.segments.push_back(info);
    }
  }
  map.background_id = identify_background(map.segments);
  return map;
}

/// Quantise then label; the pipeline used by augmentation.
inline SegmentMap segment_image(const RasterImage& image,
                                int drop_bits = kDefaultDropBits,
                                Connectivity connectivity =
                                    kDefaultConnectivity) {
  return label_components(quantize(image, drop_bits), connectivity);
}

/// Segments open to augmentation: everything except the background and
/// segments smaller than `min_area`. Ascending id order.
inline std::vector<int> eligible_segments(const SegmentMap& map,
                                          std::size_t min_area) {
  std::vector<int> ids;
  for (const SegmentInfo& s : map.segments) {
    if (s.id != map.background_id && s.area >= min_area) ids.push_back(s.id);
  }
  return ids;
}

/// Largest eligible segment (lowest id on ties), or -1 when none.
inline int largest_eligible_segment(const SegmentMap& map,
                                    std::size_t min_area) {
  int best = -1;
  for (int id : eligible_segments(map, min_area)) {
    if (best < 0 || map.segments[id].area > map.segments[best].area) best = id;
  }
  return best;
}

/// Debug rendering: each label gets a distinct colour ((id + 1) times an odd
/// constant modulo 2^24 is injective).
inline RasterImage render_labels(const SegmentMap& map) {
  RasterImage out(map.width, map.height);
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    const std::uint32_t v =
        (static_cast<std::uint32_t>(map.labels[i] + 1) * 0x9E3779u) & 0xFFFFFFu;
    out[i] = Color{static_cast<std::uint8_t>(v >> 16),
                   static_cast<std::uint8_t>(v >> 8),
                   static_cast<std::uint8_t>(v)};
  }
  return out;
}

/// One line per segment: id, area, bbox, mean colour, background flag.
inline std::string segment_report(const SegmentMap& map) {
  std::string out;
  char line[160];
  for (const SegmentInfo& s : map.segments) {
    std::snprintf(line, sizeof line,
                  "%d area=%zu bbox=%d,%d,%d,%d mean=%u,%u,%u background=%d\n",
                  s.id, s.area, s.bbox.min_x, s.bbox.min_y, s.bbox.max_x,
                  s.bbox.max_y, s.mean_color.r, s.mean_color.g, s.mean_color.b,
                  s.id == map.background_id ? 1 : 0);
    out += line;
  }
  return out;
}

}  // namespace segaug

#endif  // SEGAUG_SEGMENTATION_HPP
