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

#include <string>
#include <vector>

#include "segaug/image.hpp"
#include "test_support.hpp"

namespace segaug {
namespace {

using testing::TempDir;

std::vector<std::uint8_t> bytes_of(const std::string& s) {
  return {s.begin(), s.end()};
}

TEST(ImageTest, DecodesSinglePixelPpm) {
  const auto data = bytes_of(std::string("P6\n1 1\n255\n") + '\0' + '\0' + '\0');
  const RasterImage img = decode_ppm(data);
  EXPECT_EQ(img, RasterImage(1, 1, std::vector<Color>{{0, 0, 0}}));
}

TEST(ImageTest, DecodesPpmInRowMajorOrder) {
  std::string s = "P6\n# fixture\n2 2\n255\n";
  const char raster[] = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100, 110, 120};
  s.append(raster, sizeof raster);
  const RasterImage img = decode_ppm(bytes_of(s));
  ASSERT_EQ(img.width(), 2);
  ASSERT_EQ(img.height(), 2);
  EXPECT_EQ(img.at(0, 0), (Color{10, 20, 30}));
  EXPECT_EQ(img.at(1, 0), (Color{40, 50, 60}));
  EXPECT_EQ(img.at(0, 1), (Color{70, 80, 90}));
  EXPECT_EQ(img.at(1, 1), (Color{100, 110, 120}));
}

TEST(ImageTest, TruncatedPpmHeaderIsCorrupt) {
  try {
    decode_image(bytes_of("P6\n2 "));
    FAIL() << "expected an error";
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kCorruptStream);
  }
}

TEST(ImageTest, TruncatedPpmRasterIsCorrupt) {
  try {
    decode_image(bytes_of("P6\n2 2\n255\nabc"));
    FAIL() << "expected an error";
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kCorruptStream);
  }
}

TEST(ImageTest, ErrorKindsAreDistinct) {
  TempDir dir("image_errors");
  try {
    load_image(dir / "does_not_exist.ppm");
    FAIL();
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kUnreadable);
  }
  testing::write_text(dir / "x.gif", "GIF89a....");
  try {
    load_image(dir / "x.gif");
    FAIL();
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kUnsupportedFormat);
  }
  testing::write_text(dir / "ascii.ppm", "P3\n1 1\n255\n0 0 0\n");
  try {
    load_image(dir / "ascii.ppm");
    FAIL();
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kUnsupportedFormat);
  }
  const RasterImage img(4, 4, Color{1, 2, 3});
  auto png = encode_png(img);
  png.resize(png.size() / 2);
  try {
    decode_image(png);
    FAIL();
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kCorruptStream);
  }
}

TEST(ImageTest, PpmMaxvalOtherThan255IsUnsupported) {
  try {
    decode_image(bytes_of("P6\n1 1\n65535\n\0\0\0\0\0\0"));
    FAIL();
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kUnsupportedFormat);
  }
}

TEST(ImageTest, EmptyOutputPathIsRejected) {
  const RasterImage img(1, 1);
  try {
    save_image(img, "");
    FAIL();
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kUnwritable);
  }
}

TEST(ImageTest, MissingParentDirectoryIsUnwritable) {
  TempDir dir("image_unwritable");
  try {
    save_image(RasterImage(2, 2), dir / "no/such/dir/out.png");
    FAIL();
  } catch (const ImageError& e) {
    EXPECT_EQ(e.kind(), ImageErrorKind::kUnwritable);
  }
}

TEST(ImageTest, InvalidDimensionsRejected) {
  EXPECT_THROW(RasterImage(0, 3), ImageError);
  EXPECT_THROW(RasterImage(2, 2, std::vector<Color>(3)), ImageError);
}

TEST(ImageTest, RandomImagesRoundTripThroughBothFormats) {
  TempDir dir("image_roundtrip");
  Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int w = trial == 0 ? 224 : 1 + static_cast<int>(rng.below(40));
    const int h = trial == 0 ? 224 : 1 + static_cast<int>(rng.below(40));
    const RasterImage img = testing::random_image(rng, w, h);
    for (const char* name : {"a.png", "a.ppm"}) {
      save_image(img, dir / name);
      const RasterImage back = load_image(dir / name);
      ASSERT_EQ(back, img) << name << " " << w << "x" << h;
      EXPECT_EQ(load_image(dir / name), back);
    }
  }
}

TEST(ImageTest, PngAlphaIsCompositedOverWhite) {
  // 2x1 RGBA: opaque red, fully transparent black.
  const std::uint8_t rgba[] = {255, 0, 0, 255, 0, 0, 0, 0};
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = 2;
  img.height = 1;
  img.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  ASSERT_TRUE(png_image_write_get_memory_size(img, size, 0, rgba, 0, nullptr));
  std::vector<std::uint8_t> buf(size);
  ASSERT_TRUE(
      png_image_write_to_memory(&img, buf.data(), &size, 0, rgba, 0, nullptr));
  buf.resize(size);
  const RasterImage decoded = decode_image(buf);
  EXPECT_EQ(decoded.at(0, 0), (Color{255, 0, 0}));
  EXPECT_EQ(decoded.at(1, 0), kWhite);
}

TEST(ImageTest, HalfAlphaBlendsTowardWhite) {
  EXPECT_EQ(detail::composite_over_white(0, 128), 127);
  EXPECT_EQ(detail::composite_over_white(200, 255), 200);
  EXPECT_EQ(detail::composite_over_white(0, 0), 255);
}

}  // namespace
}  // namespace segaug
