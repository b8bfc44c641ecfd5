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
 * @file augment.hpp
 * @brief Segment-level augmentation: colour change, removal and rotation of
 *        randomly selected segments, applied with probability p under a seed.
 */

#ifndef SEGAUG_AUGMENT_HPP
#define SEGAUG_AUGMENT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "segaug/image.hpp"
#include "segaug/random.hpp"
#include "segaug/segmentation.hpp"

namespace segaug {

enum class AugmentErrorKind {
  kUnknownSegment,
  kBackgroundRefused,
  kLargestSegmentRefused,
  kDimensionMismatch,
  kInvalidConfig,
};

class AugmentError : public std::runtime_error {
 public:
  AugmentError(AugmentErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  AugmentErrorKind kind() const noexcept { return kind_; }

 private:
  AugmentErrorKind kind_;
};

/// Canonical application order is the enumerator order.
enum class Transform { kColorChange = 0, kRotation = 1, kRemoval = 2 };

inline constexpr Transform kAllTransforms[] = {
    Transform::kColorChange, Transform::kRotation, Transform::kRemoval};

inline constexpr std::string_view transform_name(Transform t) {
  switch (t) {
    case Transform::kColorChange:
      return "color_change";
    case Transform::kRotation:
      return "rotation";
    case Transform::kRemoval:
      return "removal";
  }
  return "?";
}

inline std::optional<Transform> parse_transform(std::string_view name) {
  for (Transform t : kAllTransforms) {
    if (transform_name(t) == name) return t;
  }
  return std::nullopt;
}

class TransformSet {
 public:
  TransformSet() = default;
  TransformSet(std::initializer_list<Transform> ts) {
    for (Transform t : ts) insert(t);
  }

  void insert(Transform t) { bits_ |= bit(t); }
  bool contains(Transform t) const { return (bits_ & bit(t)) != 0; }
  bool empty() const { return bits_ == 0; }

  /// Enabled transforms in canonical order.
  std::vector<Transform> list() const {
    std::vector<Transform> out;
    for (Transform t : kAllTransforms) {
      if (contains(t)) out.push_back(t);
    }
    return out;
  }

  friend bool operator==(const TransformSet&, const TransformSet&) = default;

 private:
  static unsigned bit(Transform t) { return 1u << static_cast<unsigned>(t); }
  unsigned bits_ = 0;
};

/// How many segments to pick from the L_e eligible ones.
struct SegmentCountPolicy {
  enum class Kind { kFixed, kThirdOfL, kHalfOfL };
  Kind kind = Kind::kThirdOfL;
  std::size_t k = 1;

  static SegmentCountPolicy fixed(std::size_t k) { return {Kind::kFixed, k}; }
  static SegmentCountPolicy third_of_l() { return {Kind::kThirdOfL, 0}; }
  static SegmentCountPolicy half_of_l() { return {Kind::kHalfOfL, 0}; }

  std::size_t resolve(std::size_t eligible) const {
    switch (kind) {
      case Kind::kFixed:
        return k;
      case Kind::kThirdOfL:
        return std::max<std::size_t>(1, eligible / 3);
      case Kind::kHalfOfL:
        return std::max<std::size_t>(1, eligible / 2);
    }
    return 0;
  }
};

struct AugmentationConfig {
  SegmentCountPolicy n_policy = SegmentCountPolicy::third_of_l();
  double p = 0.5;
  TransformSet transforms{Transform::kColorChange};
  std::uint64_t seed = 0;
  double rotation_min_deg = -90.0;
  double rotation_max_deg = 90.0;
  std::size_t min_area = kDefaultMinArea;
  int drop_bits = kDefaultDropBits;
  Connectivity connectivity = kDefaultConnectivity;

  void validate() const {
    const auto fail = [](const std::string& msg) {
      throw AugmentError(AugmentErrorKind::kInvalidConfig, msg);
    };
    if (!(p >= 0.0 && p <= 1.0)) fail("p must be in [0, 1]");
    if (transforms.empty()) fail("at least one transform must be enabled");
    if (!(rotation_min_deg >= -180.0 && rotation_max_deg <= 180.0 &&
          rotation_min_deg <= rotation_max_deg)) {
      fail("rotation range must be an interval inside [-180, 180]");
    }
    if (drop_bits < 0 || drop_bits > 7) fail("drop_bits must be in [0, 7]");
  }
};

/// The segment was the largest eligible one, so removal was not performed.
struct SkippedLargest {
  friend bool operator==(const SkippedLargest&, const SkippedLargest&) = default;
};

using DecisionParams =
    std::variant<std::monostate, Color, double, SkippedLargest>;

struct Decision {
  int segment_id = 0;
  Transform transform = Transform::kColorChange;
  DecisionParams params;
  bool applied = false;

  friend bool operator==(const Decision&, const Decision&) = default;
};

struct AugmentationRecord {
  std::string source;
  std::uint64_t seed = 0;
  std::vector<Decision> decisions;
};

struct AugmentationResult {
  RasterImage image;
  AugmentationRecord record;
};

namespace detail {

inline void check_target(const RasterImage& image, const SegmentMap& map,
                         int id) {
  if (image.width() != map.width || image.height() != map.height) {
    throw AugmentError(AugmentErrorKind::kDimensionMismatch,
                       "segment map does not match image dimensions");
  }
  if (!map.has_segment(id)) {
    throw AugmentError(AugmentErrorKind::kUnknownSegment,
                       "unknown segment id " + std::to_string(id));
  }
}

inline void fill_segment(RasterImage& image, const SegmentMap& map, int id,
                         Color colour) {
  for (std::size_t i = 0; i < map.labels.size(); ++i) {
    if (map.labels[i] == id) image[i] = colour;
  }
}

// sin/cos with exact values at multiples of 90 degrees.
inline void exact_sin_cos(double angle_deg, double& s, double& c) {
  const double quarter = angle_deg / 90.0;
  if (quarter == std::floor(quarter) && std::abs(quarter) < 1e9) {
    static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    const long long q = static_cast<long long>(quarter);
    const int idx = static_cast<int>(((q % 4) + 4) % 4);
    s = kSin[idx];
    c = kCos[idx];
    return;
  }
  const double rad = angle_deg * std::numbers::pi / 180.0;
  s = std::sin(rad);
  c = std::cos(rad);
}

inline int round_half_up(double v) {
  return static_cast<int>(std::floor(v + 0.5));
}

// Applies `fn(x, y, src_x, src_y)` for every canvas pixel whose inverse
// image under the rotation lands on segment `id`.
template <typename Fn>
void for_each_rotated_pixel(const SegmentMap& map, int id, double angle_deg,
                            Fn&& fn) {
  const SegmentInfo& seg = map.segments[id];
  const double cx = seg.centroid_x;
  const double cy = seg.centroid_y;
  double s = 0.0, c = 1.0;
  exact_sin_cos(angle_deg, s, c);

  // Output region: bbox corners rotated forward, padded by a pixel.
  double lo_x = cx, hi_x = cx, lo_y = cy, hi_y = cy;
  const double xs[2] = {seg.bbox.min_x - 0.5, seg.bbox.max_x + 0.5};
  const double ys[2] = {seg.bbox.min_y - 0.5, seg.bbox.max_y + 0.5};
  for (double px : xs) {
    for (double py : ys) {
      const double dx = px - cx, dy = py - cy;
      const double rx = cx + c * dx - s * dy;
      const double ry = cy + s * dx + c * dy;
      lo_x = std::min(lo_x, rx);
      hi_x = std::max(hi_x, rx);
      lo_y = std::min(lo_y, ry);
      hi_y = std::max(hi_y, ry);
    }
  }
  const int x0 = std::max(0, static_cast<int>(std::floor(lo_x)) - 1);
  const int x1 = std::min(map.width - 1, static_cast<int>(std::ceil(hi_x)) + 1);
  const int y0 = std::max(0, static_cast<int>(std::floor(lo_y)) - 1);
  const int y1 = std::min(map.height - 1, static_cast<int>(std::ceil(hi_y)) + 1);

  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double dx = x - cx, dy = y - cy;
      const int sx = round_half_up(cx + c * dx + s * dy);
      const int sy = round_half_up(cy - s * dx + c * dy);
      if (sx < 0 || sy < 0 || sx >= map.width || sy >= map.height) continue;
      if (map.label_at(sx, sy) != id) continue;
      fn(x, y, sx, sy);
    }
  }
}

}  // namespace detail

/// Picks min(n, L_e) distinct eligible segments uniformly without
/// replacement. Draws nothing when no segment is eligible.
inline std::vector<int> select_segments(const SegmentMap& map,
                                        const AugmentationConfig& config,
                                        Rng& rng) {
  std::vector<int> eligible = eligible_segments(map, config.min_area);
  if (eligible.empty()) return {};
  const std::size_t n = config.n_policy.resolve(eligible.size());
  return rng.sample_without_replacement(std::move(eligible), n);
}

inline void color_change_in_place(RasterImage& image, const SegmentMap& map,
                                  int id, Color new_color) {
  detail::check_target(image, map, id);
  detail::fill_segment(image, map, id, new_color);
}

/// Every pixel of segment `id` becomes `new_color`; nothing else changes.
inline RasterImage color_change(const RasterImage& image,
                                const SegmentMap& map, int id,
                                Color new_color) {
  RasterImage out = image;
  color_change_in_place(out, map, id, new_color);
  return out;
}

inline void remove_segment_in_place(RasterImage& image, const SegmentMap& map,
                                    int id,
                                    std::size_t min_area = kDefaultMinArea) {
  detail::check_target(image, map, id);
  if (id == map.background_id) {
    throw AugmentError(AugmentErrorKind::kBackgroundRefused,
                       "the background segment cannot be removed");
  }
  if (id == largest_eligible_segment(map, min_area)) {
    throw AugmentError(AugmentErrorKind::kLargestSegmentRefused,
                       "the largest eligible segment cannot be removed");
  }
  detail::fill_segment(image, map, id, map.background().mean_color);
}

/// Paints segment `id` with the background's mean colour. Refuses the
/// background itself and the largest eligible segment.
inline RasterImage remove_segment(const RasterImage& image,
                                  const SegmentMap& map, int id,
                                  std::size_t min_area = kDefaultMinArea) {
  RasterImage out = image;
  remove_segment_in_place(out, map, id, min_area);
  return out;
}

/// Canvas pixels covered by segment `id` after rotating it about its
/// centroid by `angle_deg` (nearest-neighbour inverse mapping, clipped to the
/// canvas). Row-major mask.
inline std::vector<std::uint8_t> rotated_footprint(const SegmentMap& map,
                                                   int id, double angle_deg) {
  if (!map.has_segment(id)) {
    throw AugmentError(AugmentErrorKind::kUnknownSegment,
                       "unknown segment id " + std::to_string(id));
  }
  std::vector<std::uint8_t> mask(map.labels.size(), 0);
  detail::for_each_rotated_pixel(
      map, id, angle_deg, [&](int x, int y, int, int) {
        mask[static_cast<std::size_t>(y) * map.width + x] = 1;
      });
  return mask;
}

inline void rotate_segment_in_place(RasterImage& image, const SegmentMap& map,
                                    int id, double angle_deg) {
  detail::check_target(image, map, id);
  if (id == map.background_id) {
    throw AugmentError(AugmentErrorKind::kBackgroundRefused,
                       "the background segment cannot be rotated");
  }
  const RasterImage source = image;
  detail::fill_segment(image, map, id, map.background().mean_color);
  detail::for_each_rotated_pixel(
      map, id, angle_deg,
      [&](int x, int y, int sx, int sy) { image.at(x, y) = source.at(sx, sy); });
}

/// Erases segment `id` with the background colour, rotates its pixels and
/// mask about the centroid (positive angles turn clockwise on screen, since
/// y points down) and overlays the result. Pixels rotated off the canvas are
/// dropped.
inline RasterImage rotate_segment(const RasterImage& image,
                                  const SegmentMap& map, int id,
                                  double angle_deg) {
  RasterImage out = image;
  rotate_segment_in_place(out, map, id, angle_deg);
  return out;
}

/// Full pipeline on one image. The random draw order is: segment selection,
/// then for each selected segment (selection order) and each enabled
/// transform (canonical order) one Bernoulli(p) draw followed, if applied, by
/// the transform's parameter draws (three channel bytes, or one angle).
inline AugmentationResult augment_image(const RasterImage& image,
                                        const AugmentationConfig& config,
                                        Rng& rng, std::string source = {}) {
  config.validate();
  const SegmentMap map =
      segment_image(image, config.drop_bits, config.connectivity);
  const std::vector<int> selected = select_segments(map, config, rng);
  const int largest = largest_eligible_segment(map, config.min_area);
  const std::vector<Transform> enabled = config.transforms.list();

  AugmentationRecord record{std::move(source), config.seed, {}};
  record.decisions.reserve(selected.size() * enabled.size());
  for (int id : selected) {
    for (Transform t : enabled) {
      Decision d{id, t, std::monostate{}, rng.bernoulli(config.p)};
      if (d.applied) {
        switch (t) {
          case Transform::kColorChange: {
            const auto r = static_cast<std::uint8_t>(rng.below(256));
            const auto g = static_cast<std::uint8_t>(rng.below(256));
            const auto b = static_cast<std::uint8_t>(rng.below(256));
            d.params = Color{r, g, b};
            break;
          }
          case Transform::kRotation:
            d.params = rng.uniform(config.rotation_min_deg,
                                   config.rotation_max_deg);
            break;
          case Transform::kRemoval:
            if (id == largest) {
              d.applied = false;
              d.params = SkippedLargest{};
            }
            break;
        }
      }
      record.decisions.push_back(d);
    }
  }

  RasterImage out = image;
  for (Transform t : kAllTransforms) {
    for (const Decision& d : record.decisions) {
      if (d.transform != t || !d.applied) continue;
      switch (t) {
        case Transform::kColorChange:
          color_change_in_place(out, map, d.segment_id,
                                std::get<Color>(d.params));
          break;
        case Transform::kRotation:
          rotate_segment_in_place(out, map, d.segment_id,
                                  std::get<double>(d.params));
          break;
        case Transform::kRemoval:
          remove_segment_in_place(out, map, d.segment_id, config.min_area);
          break;
      }
    }
  }
  return {std::move(out), std::move(record)};
}

inline AugmentationResult augment_image(const RasterImage& image,
                                        const AugmentationConfig& config,
                                        std::string source = {}) {
  Rng rng(config.seed);
  return augment_image(image, config, rng, std::move(source));
}

}  // namespace segaug

#endif  // SEGAUG_AUGMENT_HPP
