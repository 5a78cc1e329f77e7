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
#include <string>
#include <vector>

#include "protood/ood_detector.hpp"
#include "protood/raster.hpp"

namespace protood {

inline constexpr double kDefaultDetectorThreshold = 0.2;
inline constexpr int kOodClass = -1;

// Class-agnostic foreground instance proposal from an external segmenter.
struct Proposal {
  BinaryMask mask;
  double score = 0.0;
  std::string source_id;
};

using ProposalSet = std::vector<Proposal>;

// Keeps proposals with score >= threshold, in their original order.
ProposalSet filter_proposals(const ProposalSet& proposals, double detector_threshold);

struct MaskVerdict {
  bool is_ood = false;
  int assigned_class = kOodClass;
  double ood_fraction = 0.0;
};

// A mask is OOD iff strictly more than half of its pixels are OOD.
// Non-OOD masks take the most frequent label among their in-distribution
// pixels (lowest class index on ties).
MaskVerdict vote_mask(const BinaryMask& mask, const OodDecision& decision);

struct RefinedDecision {
  BinaryMask ood;                   // union of the OOD-voted masks
  std::vector<std::size_t> kept;    // indices of proposals surviving the score filter
  std::vector<MaskVerdict> verdicts;  // parallel to `kept`
};

// Filter, vote every surviving mask, and union the OOD ones. Pixels covered
// by no OOD-voted proposal are never OOD in the result.
RefinedDecision refine_ood(const OodDecision& decision, const ProposalSet& proposals, double detector_threshold);

// Per-pixel level below which the pixel is refined-OOD: refine_ood at INCS
// threshold t marks a pixel iff activation > t. Uncovered pixels get -inf.
// Lets a whole threshold sweep be evaluated from one map.
ScoreMap refinement_activation(const ScoreMap& incs, const ProposalSet& proposals, double detector_threshold);

}  // namespace protood
