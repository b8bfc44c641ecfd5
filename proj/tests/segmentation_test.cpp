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

#include <gtest/gtest.h>

#include <queue>
#include <vector>

#include "segaug/segmentation.hpp"
#include "test_support.hpp"

namespace segaug {
namespace {

RasterImage checkerboard2x2() {
  return RasterImage(2, 2,
                     std::vector<Color>{kBlack, kWhite, kWhite, kBlack});
}

TEST(QuantizeTest, ZeroDropBitsIsIdentity) {
  Rng rng(1);
  const RasterImage img = testing::random_image(rng, 9, 7);
  EXPECT_EQ(quantize(img, 0), img);
}

TEST(QuantizeTest, DropsLowBits) {
  const RasterImage img(1, 1, std::vector<Color>{{255, 128, 7}});
  EXPECT_EQ(quantize(img, 4).at(0, 0), (Color{240, 128, 0}));
}

TEST(QuantizeTest, SevenBitsLeavesTwoLevels) {
  // Every channel value 0..255 appears.
  std::vector<Color> px;
  for (int v = 0; v < 256; ++v) {
    px.push_back(Color{std::uint8_t(v), std::uint8_t(255 - v), std::uint8_t(v)});
  }
  const RasterImage q = quantize(RasterImage(256, 1, px), 7);
  for (const Color& c : q.pixels()) {
    for (int ch : {c.r, c.g, c.b}) EXPECT_TRUE(ch == 0 || ch == 128);
  }
  EXPECT_EQ(q.at(127, 0).r, 0);
  EXPECT_EQ(q.at(128, 0).r, 128);
}

TEST(QuantizeTest, IsIdempotent) {
  Rng rng(2);
  for (int bits = 0; bits <= 7; ++bits) {
    const RasterImage img = testing::random_image(rng, 16, 16);
    EXPECT_EQ(quantize(quantize(img, bits), bits), quantize(img, bits));
  }
}

TEST(QuantizeTest, RejectsOutOfRangeBits) {
  EXPECT_THROW(quantize(RasterImage(1, 1), 8), std::invalid_argument);
  EXPECT_THROW(quantize(RasterImage(1, 1), -1), std::invalid_argument);
}

TEST(LabelTest, UniformImageIsOneSegment) {
  const SegmentMap map = label_components(RasterImage(5, 3, Color{9, 9, 9}));
  ASSERT_EQ(map.segment_count(), 1u);
  EXPECT_EQ(map.segments[0].area, 15u);
  EXPECT_EQ(map.background_id, 0);
  EXPECT_EQ(map.segments[0].bbox, (BoundingBox{0, 0, 4, 2}));
}

TEST(LabelTest, CheckerboardConnectivity) {
  EXPECT_EQ(label_components(checkerboard2x2(), Connectivity::kFour)
                .segment_count(),
            4u);
  const SegmentMap eight =
      label_components(checkerboard2x2(), Connectivity::kEight);
  EXPECT_EQ(eight.segment_count(), 2u);
  EXPECT_EQ(eight.labels, (std::vector<int>{0, 1, 1, 0}));
}

TEST(LabelTest, StatisticsOfDiskOnWhite) {
  RasterImage img(11, 11, kWhite);
  for (int y = 0; y < 11; ++y) {
    for (int x = 0; x < 11; ++x) {
      if ((x - 5) * (x - 5) + (y - 5) * (y - 5) <= 9) img.at(x, y) = kBlack;
    }
  }
  const SegmentMap map = label_components(img);
  ASSERT_EQ(map.segment_count(), 2u);
  EXPECT_EQ(map.background().mean_color, kWhite);
  const SegmentInfo& disk = map.segments[1];
  EXPECT_FALSE(disk.touches_border);
  EXPECT_EQ(disk.mean_color, kBlack);
  EXPECT_DOUBLE_EQ(disk.centroid_x, 5.0);
  EXPECT_DOUBLE_EQ(disk.centroid_y, 5.0);
  EXPECT_EQ(disk.bbox, (BoundingBox{2, 2, 8, 8}));
  EXPECT_EQ(disk.area, 29u);
  EXPECT_EQ(map.background_id, 0);
}

TEST(LabelTest, BackgroundIsLargestBorderSegment) {
  // 25x20 split vertically: left 15 columns (300 px) red, right 10 (200 px)
  // blue.
  RasterImage img(25, 20, Color{200, 0, 0});
  for (int y = 0; y < 20; ++y) {
    for (int x = 15; x < 25; ++x) img.at(x, y) = Color{0, 0, 200};
  }
  const SegmentMap map = label_components(img);
  ASSERT_EQ(map.segment_count(), 2u);
  EXPECT_EQ(map.segments[0].area, 300u);
  EXPECT_EQ(map.segments[1].area, 200u);
  EXPECT_EQ(map.background_id, 0);

  // Same split mirrored: the larger part is encountered second.
  RasterImage mirrored(25, 20, Color{0, 0, 200});
  for (int y = 0; y < 20; ++y) {
    for (int x = 10; x < 25; ++x) mirrored.at(x, y) = Color{200, 0, 0};
  }
  const SegmentMap m2 = label_components(mirrored);
  EXPECT_EQ(m2.segments[m2.background_id].area, 300u);
  EXPECT_EQ(m2.background_id, 1);
}

TEST(LabelTest, InteriorLargeSegmentIsNotBackground) {
  // A thin white frame around a big black interior: the frame is the only
  // border-touching segment even though it is smaller.
  RasterImage img(10, 10, kBlack);
  for (int i = 0; i < 10; ++i) {
    img.at(i, 0) = img.at(i, 9) = img.at(0, i) = img.at(9, i) = kWhite;
  }
  const SegmentMap map = label_components(img);
  EXPECT_EQ(map.background().mean_color, kWhite);
  EXPECT_EQ(map.background().area, 36u);
}

// Same-label relation matches an independent union-find labelling, label
// ids follow first-encounter order, statistics are consistent.
TEST(LabelProperty, MatchesUnionFindReference) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const int w = 1 + static_cast<int>(rng.below(24));
    const int h = 1 + static_cast<int>(rng.below(24));
    const RasterImage img = testing::random_palette_image(
        rng, w, h, 1 + static_cast<int>(rng.below(4)));
    for (Connectivity conn : {Connectivity::kFour, Connectivity::kEight}) {
      const SegmentMap map = label_components(img, conn);
      ASSERT_EQ(map.labels, testing::reference_labels(img, conn));

      std::size_t total = 0;
      for (const SegmentInfo& s : map.segments) {
        total += s.area;
        EXPECT_GE(s.area, 1u);
        EXPECT_GE(s.centroid_x, s.bbox.min_x);
        EXPECT_LE(s.centroid_x, s.bbox.max_x);
        EXPECT_GE(s.centroid_y, s.bbox.min_y);
        EXPECT_LE(s.centroid_y, s.bbox.max_y);
      }
      EXPECT_EQ(total, img.size());
      ASSERT_TRUE(map.has_segment(map.background_id));
      EXPECT_TRUE(map.background().touches_border);
    }
  }
}

TEST(LabelProperty, EachSegmentIsConnected) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const RasterImage img = testing::random_palette_image(rng, 20, 20, 3);
    const SegmentMap map = label_components(img, Connectivity::kFour);
    std::vector<std::size_t> reached(map.segment_count(), 0);
    std::vector<char> seen(img.size(), 0);
    for (const SegmentInfo& s : map.segments) {
      // Flood from the first pixel of s restricted to its label.
      int start = -1;
      for (std::size_t i = 0; i < img.size(); ++i) {
        if (map.labels[i] == s.id) {
          start = static_cast<int>(i);
          break;
        }
      }
      std::queue<int> q;
      q.push(start);
      seen[start] = 1;
      std::size_t count = 0;
      while (!q.empty()) {
        const int p = q.front();
        q.pop();
        ++count;
        const int x = p % 20, y = p / 20;
        const int nbr[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (const auto& n : nbr) {
          if (n[0] < 0 || n[1] < 0 || n[0] >= 20 || n[1] >= 20) continue;
          const int j = n[1] * 20 + n[0];
          if (!seen[j] && map.labels[j] == s.id) {
            seen[j] = 1;
            q.push(j);
          }
        }
      }
      EXPECT_EQ(count, s.area);
    }
  }
}

TEST(LabelProperty, CoarserQuantisationNeverAddsSegments) {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const RasterImage img = testing::random_image(rng, 16, 16);
    std::size_t previous = img.size() + 1;
    for (int bits = 0; bits <= 7; ++bits) {
      const std::size_t k = segment_image(img, bits).segment_count();
      EXPECT_LE(k, previous) << "bits " << bits;
      previous = k;
    }
  }
}

TEST(LabelProperty, Deterministic) {
  Rng rng(6);
  const RasterImage img = testing::random_logo(rng, 64, 64, 8);
  const SegmentMap a = segment_image(img);
  const SegmentMap b = segment_image(img);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.background_id, b.background_id);
}

TEST(SegmentationTest, EligibilityExcludesBackgroundAndSpecks) {
  RasterImage img(20, 20, kWhite);
  for (int y = 2; y < 8; ++y) {
    for (int x = 2; x < 8; ++x) img.at(x, y) = kBlack;
  }
  img.at(15, 15) = Color{200, 0, 0};  // 1 px speck
  const SegmentMap map = label_components(img);
  ASSERT_EQ(map.segment_count(), 3u);
  EXPECT_EQ(eligible_segments(map, kDefaultMinArea), (std::vector<int>{1}));
  EXPECT_EQ(eligible_segments(map, 1), (std::vector<int>{1, 2}));
  EXPECT_EQ(largest_eligible_segment(map, kDefaultMinArea), 1);
}

TEST(SegmentationTest, DebugOutputs) {
  const SegmentMap map =
      label_components(checkerboard2x2(), Connectivity::kFour);
  const RasterImage vis = render_labels(map);
  std::set<Color> colours(vis.pixels().begin(), vis.pixels().end());
  EXPECT_EQ(colours.size(), 4u);
  const std::string report = segment_report(map);
  EXPECT_EQ(std::count(report.begin(), report.end(), '\n'), 4);
  EXPECT_NE(report.find("0 area=1 bbox=0,0,0,0 mean=0,0,0 background=1"),
            std::string::npos);
}

}  // namespace
}  // namespace segaug
