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

#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "protood/feature_map.hpp"
#include "protood/manifest.hpp"
#include "protood/raster.hpp"

namespace protood {

inline constexpr int kMockDim = 16;
inline constexpr int kMockPatchSize = 14;

// Produces dense token features for a dataset image. Implementations are
// immutable after construction and may be shared between worker threads.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;

  virtual const std::string& id() const = 0;
  virtual FeatureMap extract(const ImageRecord& record) const = 0;
};

// Serves precomputed PFT1 files named by the record's features_path.
class FileFeatureExtractor final : public FeatureExtractor {
 public:
  const std::string& id() const override { return id_; }
  FeatureMap extract(const ImageRecord& record) const override;

 private:
  std::string id_ = "file";
};

// Test double: each token is a fixed seeded linear projection of the patch's
// mean RGB (in [0,1]) onto kMockDim dimensions.
class MockFeatureExtractor final : public FeatureExtractor {
 public:
  explicit MockFeatureExtractor(std::uint64_t seed);

  const std::string& id() const override { return id_; }
  FeatureMap extract(const ImageRecord& record) const override;
  FeatureMap extract(const RgbImage& image, const std::string& image_id = {}) const;

  // Row-major kMockDim x 3.
  const std::array<double, kMockDim * 3>& projection() const { return projection_; }

 private:
  std::string id_;
  std::array<double, kMockDim * 3> projection_{};
};

FeatureMap mock_extract(const RgbImage& image, std::uint64_t seed);

// "file" or "mock:<seed>". Anything else is a ConfigError.
std::unique_ptr<FeatureExtractor> make_extractor(std::string_view backend_id);

}  // namespace protood
