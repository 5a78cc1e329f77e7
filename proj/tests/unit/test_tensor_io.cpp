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

#include <cstring>
#include <filesystem>

#include "../support/oracles.hpp"
#include "../support/helpers.hpp"
#include "protood/error.hpp"
#include "protood/tensor_io.hpp"

namespace protood {
namespace {

using testing::Rng;

using testing::code_of;

std::uint64_t header_len(const std::vector<std::uint8_t>& bytes) {
  std::uint64_t n = 0;
  for (int i = 0; i < 8; ++i) n |= static_cast<std::uint64_t>(bytes[4 + static_cast<std::size_t>(i)]) << (8 * i);
  return n;
}

TEST(TensorIo, DecodesTwoElementTensor) {
  FeatureMap m(2, 1, 1);
  m.values = {1.0f, 0.5f};
  const auto back = decode_feature_map(encode_feature_map(m));
  EXPECT_EQ(back.dim, 2);
  EXPECT_EQ(back.grid_h, 1);
  EXPECT_EQ(back.grid_w, 1);
  EXPECT_EQ(back.values, (std::vector<float>{1.0f, 0.5f}));
}

TEST(TensorIo, LayoutIsMagicLengthHeaderPayload) {
  FeatureMap m(1, 1, 1);
  m.image_id = "a";
  m.extractor_id = "x";
  const auto bytes = encode_feature_map(m);
  ASSERT_EQ(std::memcmp(bytes.data(), "PFT1", 4), 0);
  const auto n = header_len(bytes);
  ASSERT_EQ(bytes.size(), 12 + n + 4);
  const std::string header(bytes.begin() + 12, bytes.begin() + 12 + static_cast<long>(n));
  EXPECT_EQ(header, R"({"dtype":"f32","extractor_id":"x","image_id":"a","patch_size":1,"shape":[1,1,1]})");
  for (std::size_t i = 12 + n; i < bytes.size(); ++i) EXPECT_EQ(bytes[i], 0);
}

TEST(TensorIo, PayloadIsLittleEndianDOutermost) {
  FeatureMap m(2, 1, 2);
  m.at(0, 0, 0) = 1.0f;
  m.at(1, 0, 1) = -2.0f;
  const auto bytes = encode_feature_map(m);
  const auto off = 12 + header_len(bytes);
  // 1.0f = 0x3f800000, -2.0f = 0xc0000000
  EXPECT_EQ(bytes[off + 3], 0x3f);
  EXPECT_EQ(bytes[off + 2], 0x80);
  EXPECT_EQ(bytes[off + 15], 0xc0);
}

TEST(TensorIo, LargeMapPayloadLength) {
  FeatureMap m(384, 37, 66);
  const auto bytes = encode_feature_map(m);
  EXPECT_EQ(bytes.size() - 12 - header_len(bytes), 4u * 384 * 37 * 66);
}

TEST(TensorIo, RepeatedWritesAreByteIdentical) {
  testing::TempDir dir;
  Rng rng(3);
  auto m = rng.features(3, 4, 5);
  m.image_id = "img";
  write_feature_map(m, dir.path() / "a.pft");
  write_feature_map(m, dir.path() / "b.pft");
  EXPECT_EQ(testing::read_bytes(dir.path() / "a.pft"), testing::read_bytes(dir.path() / "b.pft"));
  EXPECT_EQ(read_feature_map(dir.path() / "a.pft"), m);
}

TEST(TensorIo, RandomRoundTripsAreBitExact) {
  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    auto m = rng.features(rng.integer(1, 8), rng.integer(1, 16), rng.integer(1, 16), -1e6, 1e6);
    m.patch_size = rng.integer(1, 32);
    m.image_id = "i" + std::to_string(i);
    const auto back = decode_feature_map(encode_feature_map(m));
    ASSERT_EQ(back, m);
    ASSERT_EQ(std::memcmp(back.values.data(), m.values.data(), m.values.size() * 4), 0);
  }
}

TEST(TensorIo, SpecialFiniteValuesSurvive) {
  FeatureMap m(4, 1, 1);
  m.values = {-0.0f, std::numeric_limits<float>::denorm_min(), std::numeric_limits<float>::max(),
              std::numeric_limits<float>::lowest()};
  const auto back = decode_feature_map(encode_feature_map(m));
  EXPECT_TRUE(std::signbit(back.values[0]));
  EXPECT_EQ(back.values, m.values);
}

TEST(TensorIo, Errors) {
  FeatureMap m(2, 2, 2);
  const auto good = encode_feature_map(m);

  auto bad_magic = good;
  bad_magic[3] = '2';
  EXPECT_EQ(code_of([&] { decode_feature_map(bad_magic); }), ErrorCode::kBadMagic);

  auto truncated = good;
  truncated.resize(truncated.size() - 3);
  EXPECT_EQ(code_of([&] { decode_feature_map(truncated); }), ErrorCode::kPayloadSizeMismatch);

  auto extra = good;
  extra.push_back(0);
  EXPECT_EQ(code_of([&] { decode_feature_map(extra); }), ErrorCode::kPayloadSizeMismatch);

  auto nan = good;
  const float q = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(nan.data() + nan.size() - 4, &q, 4);
  EXPECT_EQ(code_of([&] { decode_feature_map(nan); }), ErrorCode::kPayloadInvalid);

  std::vector<std::uint8_t> short_file = {'P', 'F', 'T', '1', 1};
  EXPECT_EQ(code_of([&] { decode_feature_map(short_file); }), ErrorCode::kHeaderParse);

  auto bad_json = good;
  bad_json[12] = '[';
  EXPECT_EQ(code_of([&] { decode_feature_map(bad_json); }), ErrorCode::kHeaderParse);

  EXPECT_EQ(code_of([] { read_feature_map("/nonexistent/x.pft"); }), ErrorCode::kMissingPath);

  FeatureMap inf(1, 1, 1);
  inf.values[0] = std::numeric_limits<float>::infinity();
  EXPECT_EQ(code_of([&] { encode_feature_map(inf); }), ErrorCode::kPayloadInvalid);
}

std::vector<std::uint8_t> with_header(const std::string& header, std::size_t payload_bytes) {
  std::vector<std::uint8_t> out = {'P', 'F', 'T', '1'};
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(header.size() >> (8 * i)));
  out.insert(out.end(), header.begin(), header.end());
  out.resize(out.size() + payload_bytes, 0);
  return out;
}

TEST(TensorIo, HeaderValidation) {
  const auto hdr = [](const std::string& dtype, const std::string& shape) {
    return R"({"dtype":")" + dtype + R"(","extractor_id":"","image_id":"","patch_size":1,"shape":)" + shape + "}";
  };
  EXPECT_NO_THROW(decode_feature_map(with_header(hdr("f32", "[1,1,2]"), 8)));
  EXPECT_EQ(code_of([&] { decode_feature_map(with_header(hdr("f16", "[1,1,2]"), 8)); }), ErrorCode::kHeaderParse);
  EXPECT_EQ(code_of([&] { decode_feature_map(with_header(hdr("f32", "[1,0,2]"), 0)); }), ErrorCode::kHeaderParse);
  EXPECT_EQ(code_of([&] { decode_feature_map(with_header(hdr("f32", "[1,2]"), 8)); }), ErrorCode::kHeaderParse);
  // Shapes whose element count overflows are a size mismatch, entries beyond int range a parse error.
  EXPECT_EQ(code_of([&] { decode_feature_map(with_header(hdr("f32", "[2147483647,2147483647,2147483647]"), 8)); }),
            ErrorCode::kPayloadSizeMismatch);
  EXPECT_EQ(code_of([&] { decode_feature_map(with_header(hdr("f32", "[4294967296,1,1]"), 8)); }),
            ErrorCode::kHeaderParse);
}

}  // namespace
}  // namespace protood
