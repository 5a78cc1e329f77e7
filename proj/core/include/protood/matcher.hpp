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

#include <cstddef>
#include <span>
#include <vector>

#include "protood/feature_map.hpp"
#include "protood/prototype_bank.hpp"
#include "protood/raster.hpp"

namespace protood {

// K x H x W similarity maps, one channel per bank class. Used both at token
// resolution and at image resolution.
struct ClassHeatmaps {
  int num_classes = 0;
  int height = 0;
  int width = 0;
  std::vector<float> values;

  ClassHeatmaps() = default;
  ClassHeatmaps(int k, int h, int w)
      : num_classes(k), height(h), width(w),
        values(static_cast<std::size_t>(k) * static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0.0f) {}

  std::size_t plane() const noexcept { return static_cast<std::size_t>(height) * static_cast<std::size_t>(width); }
  float& at(int k, int row, int col) { return values[static_cast<std::size_t>(k) * plane() + static_cast<std::size_t>(row) * width + col]; }
  float at(int k, int row, int col) const { return values[static_cast<std::size_t>(k) * plane() + static_cast<std::size_t>(row) * width + col]; }
  std::span<const float> channel(int k) const {
    return std::span<const float>(values).subspan(static_cast<std::size_t>(k) * plane(), plane());
  }
};

// Per token and class: max over the class's prototypes of the cosine
// similarity. A zero token has similarity 0 with everything.
ClassHeatmaps cosine_heatmaps(const FeatureMap& features, const PrototypeBank& bank);

// Same, over raw per-class prototype lists (count x dim, row-major) that need
// not be normalized.
ClassHeatmaps cosine_heatmaps(const FeatureMap& features, int dim,
                              std::span<const std::vector<float>> class_vectors);

// Bilinear resize with half-pixel alignment: output pixel (y, x) samples the
// source at ((y + 0.5) * h / H - 0.5, (x + 0.5) * w / W - 0.5), clamped to the
// grid. Values stay inside the source channel's [min, max].
ClassHeatmaps upsample(const ClassHeatmaps& tokens, int height, int width);

struct PixelClassification {
  LabelMap labels;   // argmax class, lowest index on ties
  ScoreMap scores;   // the max similarity
};

PixelClassification classify_pixels(const ClassHeatmaps& heatmaps);

// Same result as classify_pixels(upsample(tokens, height, width)) without
// materializing the K x H x W stack.
PixelClassification classify_upsampled(const ClassHeatmaps& tokens, int height, int width);

}  // namespace protood
