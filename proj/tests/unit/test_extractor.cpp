// Copyright 2026 The protood Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include "../support/helpers.hpp"
#include "protood/extractor.hpp"
#include "protood/png_io.hpp"
#include "protood/tensor_io.hpp"

namespace protood {
namespace {

using testing::code_of;

RgbImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  RgbImage img(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      auto* p = img.pixel(y, x);
      p[0] = r;
      p[1] = g;
      p[2] = b;
    }
  }
  return img;
}

std::vector<float> token(const FeatureMap& f, int r, int c) {
  std::vector<float> v(static_cast<std::size_t>(f.dim));
  f.token(r, c, v);
  return v;
}

TEST(MockExtractor, SolidImageGivesIdenticalTokens) {
  const auto f = mock_extract(solid(28, 28, 255, 0, 0), 7);
  ASSERT_EQ(f.dim, kMockDim);
  ASSERT_EQ(f.grid_h, 2);
  ASSERT_EQ(f.grid_w, 2);
  EXPECT_EQ(f.patch_size, 14);
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) EXPECT_EQ(token(f, r, c), token(f, 0, 0));
  }
}

TEST(MockExtractor, TokenIsProjectionOfMeanRgb) {
  MockFeatureExtractor ex(42);
  const auto f = ex.extract(solid(14, 14, 51, 102, 255));
  const double rgb[3] = {0.2, 0.4, 1.0};
  for (int d = 0; d < kMockDim; ++d) {
    double expect = 0.0;
    for (int c = 0; c < 3; ++c) expect += ex.projection()[static_cast<std::size_t>(d * 3 + c)] * rgb[c];
    EXPECT_NEAR(f.at(d, 0, 0), expect, 1e-6);
  }
  for (double p : ex.projection()) {
    EXPECT_GE(p, -1.0);
    EXPECT_LT(p, 1.0);
  }
}

TEST(MockExtractor, Deterministic) {
  const auto img = solid(30, 45, 10, 200, 30);
  EXPECT_EQ(mock_extract(img, 3), mock_extract(img, 3));
  EXPECT_EQ(MockFeatureExtractor(3).projection(), MockFeatureExtractor(3).projection());
}

TEST(MockExtractor, BlackIsZero) {
  for (std::uint64_t seed : {0ull, 1ull, 99ull}) {
    const auto f = mock_extract(solid(14, 28, 0, 0, 0), seed);
    for (float v : f.values) EXPECT_EQ(v, 0.0f);
  }
}

TEST(MockExtractor, DependsOnlyOnMeanRgb) {
  RgbImage img(28, 14);
  for (int y = 0; y < 14; ++y) {
    for (int x = 0; x < 28; ++x) {
      const std::uint8_t v = x < 14 ? ((x + y) % 2 ? 254 : 0) : 127;
      auto* p = img.pixel(y, x);
      p[0] = p[1] = p[2] = v;
    }
  }
  const auto f = mock_extract(img, 5);
  EXPECT_EQ(token(f, 0, 0), token(f, 0, 1));
}

TEST(MockExtractor, SeedsDiffer) {
  const auto img = solid(28, 28, 90, 30, 160);
  EXPECT_NE(mock_extract(img, 1).values, mock_extract(img, 2).values);
}

TEST(MockExtractor, GridFloorsAndRejectsSmallImages) {
  const auto f = mock_extract(solid(45, 30, 1, 1, 1), 0);
  EXPECT_EQ(f.grid_h, 2);
  EXPECT_EQ(f.grid_w, 3);
  EXPECT_EQ(code_of([] { mock_extract(solid(13, 40, 1, 1, 1), 0); }), ErrorCode::kImageTooSmall);
  EXPECT_EQ(code_of([] { mock_extract(solid(40, 13, 1, 1, 1), 0); }), ErrorCode::kImageTooSmall);
}

TEST(MockExtractor, ReadsImageFromRecord) {
  testing::TempDir dir;
  const auto img = solid(28, 14, 5, 6, 7);
  write_rgb(img, dir.path() / "a.png");
  MockFeatureExtractor ex(8);
  ImageRecord rec;
  rec.id = "a";
  rec.image_path = dir.path() / "a.png";
  const auto f = ex.extract(rec);
  EXPECT_EQ(f.image_id, "a");
  EXPECT_EQ(f.extractor_id, "mock:8");
  EXPECT_EQ(f.values, ex.extract(img, "a").values);
}

TEST(FileExtractor, PassesThroughVerbatim) {
  testing::TempDir dir;
  FeatureMap m(3, 2, 2, 14);
  for (std::size_t i = 0; i < m.values.size(); ++i) m.values[i] = static_cast<float>(i) * 0.25f;
  m.image_id = "x";
  m.extractor_id = "dinov2-vits14";
  write_feature_map(m, dir.path() / "x.pft");
  ImageRecord rec;
  rec.id = "x";
  rec.features_path = dir.path() / "x.pft";
  EXPECT_EQ(FileFeatureExtractor().extract(rec), m);
  rec.features_path.reset();
  EXPECT_EQ(code_of([&] { FileFeatureExtractor().extract(rec); }), ErrorCode::kBackendUnavailable);
}

TEST(MakeExtractor, ParsesBackendIds) {
  EXPECT_EQ(make_extractor("file")->id(), "file");
  EXPECT_EQ(make_extractor("mock:17")->id(), "mock:17");
  EXPECT_EQ(code_of([] { make_extractor("dinov2-vits14"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { make_extractor("mock:"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { make_extractor("mock:x1"); }), ErrorCode::kConfigError);
}

}  // namespace
}  // namespace protood
