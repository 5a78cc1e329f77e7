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

#include "protood/extractor.hpp"

#include <charconv>
#include <random>

#include "protood/error.hpp"
#include "protood/png_io.hpp"
#include "protood/tensor_io.hpp"

namespace protood {

FeatureMap FileFeatureExtractor::extract(const ImageRecord& record) const {
  if (!record.features_path) {
    throw Error(ErrorCode::kBackendUnavailable, "image '" + record.id + "' has no features_path");
  }
  return read_feature_map(*record.features_path);
}

MockFeatureExtractor::MockFeatureExtractor(std::uint64_t seed) : id_("mock:" + std::to_string(seed)) {
  // mt19937_64 output is specified by the standard; the distributions are not,
  // so map raw 53-bit draws to [-1, 1) by hand to stay portable.
  std::mt19937_64 engine(seed);
  for (auto& w : projection_) {
    const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
    w = 2.0 * unit - 1.0;
  }
}

FeatureMap MockFeatureExtractor::extract(const RgbImage& image, const std::string& image_id) const {
  if (image.width < kMockPatchSize || image.height < kMockPatchSize) {
    throw Error(ErrorCode::kImageTooSmall, "image '" + image_id + "' is smaller than one " +
                                               std::to_string(kMockPatchSize) + "px patch");
  }
  const int grid_h = image.height / kMockPatchSize;
  const int grid_w = image.width / kMockPatchSize;
  FeatureMap map(kMockDim, grid_h, grid_w, kMockPatchSize);
  map.image_id = image_id;
  map.extractor_id = id_;

  constexpr double kPixels = kMockPatchSize * kMockPatchSize;
  for (int ty = 0; ty < grid_h; ++ty) {
    for (int tx = 0; tx < grid_w; ++tx) {
      std::array<double, 3> mean{};
      for (int y = ty * kMockPatchSize; y < (ty + 1) * kMockPatchSize; ++y) {
        for (int x = tx * kMockPatchSize; x < (tx + 1) * kMockPatchSize; ++x) {
          const auto* px = image.pixel(y, x);
          for (int c = 0; c < 3; ++c) mean[c] += px[c];
        }
      }
      for (auto& m : mean) m /= kPixels * 255.0;
      for (int d = 0; d < kMockDim; ++d) {
        const double v = projection_[d * 3 + 0] * mean[0] + projection_[d * 3 + 1] * mean[1] +
                         projection_[d * 3 + 2] * mean[2];
        map.at(d, ty, tx) = static_cast<float>(v);
      }
    }
  }
  return map;
}

FeatureMap MockFeatureExtractor::extract(const ImageRecord& record) const {
  return extract(read_rgb(record.image_path), record.id);
}

FeatureMap mock_extract(const RgbImage& image, std::uint64_t seed) {
  return MockFeatureExtractor(seed).extract(image);
}

std::unique_ptr<FeatureExtractor> make_extractor(std::string_view backend_id) {
  if (backend_id == "file") return std::make_unique<FileFeatureExtractor>();
  constexpr std::string_view kMockPrefix = "mock:";
  if (backend_id.starts_with(kMockPrefix)) {
    const auto digits = backend_id.substr(kMockPrefix.size());
    std::uint64_t seed = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec == std::errc() && end == digits.data() + digits.size() && !digits.empty()) {
      return std::make_unique<MockFeatureExtractor>(seed);
    }
  }
  throw Error(ErrorCode::kConfigError, "unknown backend '" + std::string(backend_id) +
                                           "' (expected \"file\" or \"mock:<seed>\")");
}

}  // namespace protood
