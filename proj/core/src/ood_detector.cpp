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

#include "protood/ood_detector.hpp"

#include <algorithm>

#include "protood/error.hpp"

namespace protood {

ScoreRange ScoreRange::merged(const ScoreRange& other) const {
  return {std::min(min, other.min), std::max(max, other.max)};
}

ScoreRange score_range(const ScoreMap& scores) {
  if (scores.empty()) throw Error(ErrorCode::kShapeMismatch, "score map is empty");
  const auto [lo, hi] = std::minmax_element(scores.pixels().begin(), scores.pixels().end());
  return {*lo, *hi};
}

ScoreMap incs_map(const ScoreMap& scores) { return incs_map(scores, score_range(scores)); }

ScoreMap incs_map(const ScoreMap& scores, const ScoreRange& range) {
  ScoreMap out(scores.width(), scores.height(), 0.0f);
  if (!(range.max > range.min)) return out;
  const double lo = range.min;
  const double span = static_cast<double>(range.max) - lo;
  auto src = scores.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double normalized = (static_cast<double>(src[i]) - lo) / span;
    dst[i] = static_cast<float>(std::clamp(1.0 - normalized, 0.0, 1.0));
  }
  return out;
}

OodDecision threshold_ood(const ScoreMap& incs, const LabelMap& labels, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::kThresholdOutOfRange, "INCS threshold must lie in [0, 1]");
  }
  if (!incs.same_shape(labels)) throw Error(ErrorCode::kShapeMismatch, "INCS map and label map differ in size");
  OodDecision out{BinaryMask(incs.width(), incs.height()), labels, threshold};
  auto w = incs.pixels();
  auto ood = out.ood.pixels();
  for (std::size_t i = 0; i < w.size(); ++i) ood[i] = w[i] > threshold ? 1 : 0;
  return out;
}

}  // namespace protood
