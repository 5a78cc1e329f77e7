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

#include "protood/raster.hpp"

namespace protood {

inline constexpr double kDefaultIncsThreshold = 0.55;

struct ScoreRange {
  float min = 0.0f;
  float max = 0.0f;

  // Smallest range covering both.
  ScoreRange merged(const ScoreRange& other) const;
};

ScoreRange score_range(const ScoreMap& scores);

// Inverse normalized cosine similarity: w = 1 - (v - min) / (max - min), with
// min/max taken over `scores` itself. A constant map gives w = 0 everywhere.
ScoreMap incs_map(const ScoreMap& scores);

// Same, normalizing against an externally supplied population range (for
// per-dataset normalization). Values are clamped into [0, 1].
ScoreMap incs_map(const ScoreMap& scores, const ScoreRange& range);

struct OodDecision {
  BinaryMask ood;   // w > threshold
  LabelMap labels;  // class labels, meaningful where ood is false
  double threshold = kDefaultIncsThreshold;
};

// Strict comparison: a pixel is OOD iff w > threshold. threshold must lie in [0, 1].
OodDecision threshold_ood(const ScoreMap& incs, const LabelMap& labels, double threshold);

}  // namespace protood
