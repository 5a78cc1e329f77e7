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

#include "protood/mask_refiner.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "protood/error.hpp"

namespace protood {

ProposalSet filter_proposals(const ProposalSet& proposals, double detector_threshold) {
  if (!(detector_threshold >= 0.0 && detector_threshold <= 1.0)) {
    throw Error(ErrorCode::kThresholdOutOfRange, "detector threshold must lie in [0, 1]");
  }
  ProposalSet out;
  for (const auto& p : proposals) {
    if (p.score >= detector_threshold) out.push_back(p);
  }
  return out;
}

namespace {

int plurality(const std::map<int, std::size_t>& counts) {
  int best = kOodClass;
  std::size_t best_count = 0;
  // std::map iterates ascending, so the first maximum is the lowest index.
  for (const auto& [label, n] : counts) {
    if (n > best_count) {
      best = label;
      best_count = n;
    }
  }
  return best;
}

}  // namespace

MaskVerdict vote_mask(const BinaryMask& mask, const OodDecision& decision) {
  if (!mask.same_shape(decision.ood)) throw Error(ErrorCode::kShapeMismatch, "proposal mask size differs from image");
  auto m = mask.pixels();
  auto ood = decision.ood.pixels();
  auto labels = decision.labels.pixels();
  std::size_t total = 0;
  std::size_t ood_count = 0;
  std::map<int, std::size_t> id_labels;
  std::map<int, std::size_t> all_labels;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (!m[i]) continue;
    ++total;
    ++all_labels[labels[i]];
    if (ood[i]) {
      ++ood_count;
    } else {
      ++id_labels[labels[i]];
    }
  }
  if (total == 0) throw Error(ErrorCode::kEmptyProposalMask, "proposal mask has no pixels");

  MaskVerdict v;
  v.ood_fraction = static_cast<double>(ood_count) / static_cast<double>(total);
  v.is_ood = 2 * ood_count > total;
  if (!v.is_ood) v.assigned_class = id_labels.empty() ? plurality(all_labels) : plurality(id_labels);
  return v;
}

RefinedDecision refine_ood(const OodDecision& decision, const ProposalSet& proposals, double detector_threshold) {
  if (!(detector_threshold >= 0.0 && detector_threshold <= 1.0)) {
    throw Error(ErrorCode::kThresholdOutOfRange, "detector threshold must lie in [0, 1]");
  }
  RefinedDecision out;
  out.ood = BinaryMask(decision.ood.width(), decision.ood.height());
  auto refined = out.ood.pixels();
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    const auto& p = proposals[i];
    if (p.score < detector_threshold) continue;
    const auto verdict = vote_mask(p.mask, decision);
    out.kept.push_back(i);
    out.verdicts.push_back(verdict);
    if (!verdict.is_ood) continue;
    auto m = p.mask.pixels();
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (m[j]) refined[j] = 1;
    }
  }
  return out;
}

ScoreMap refinement_activation(const ScoreMap& incs, const ProposalSet& proposals, double detector_threshold) {
  if (!(detector_threshold >= 0.0 && detector_threshold <= 1.0)) {
    throw Error(ErrorCode::kThresholdOutOfRange, "detector threshold must lie in [0, 1]");
  }
  ScoreMap out(incs.width(), incs.height(), -std::numeric_limits<float>::infinity());
  auto w = incs.pixels();
  auto act = out.pixels();
  std::vector<float> inside;
  for (const auto& p : proposals) {
    if (p.score < detector_threshold) continue;
    if (!p.mask.same_shape(incs)) throw Error(ErrorCode::kShapeMismatch, "proposal mask size differs from image");
    auto m = p.mask.pixels();
    inside.clear();
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i]) inside.push_back(w[i]);
    }
    if (inside.empty()) throw Error(ErrorCode::kEmptyProposalMask, "proposal mask has no pixels");
    // OOD at t  <=>  #{w > t} >= n/2 + 1  <=>  (n/2 + 1)-th largest w > t.
    const std::size_t rank = inside.size() / 2;  // 0-based index of the (n/2+1)-th largest
    std::nth_element(inside.begin(), inside.begin() + static_cast<std::ptrdiff_t>(rank), inside.end(),
                     std::greater<float>());
    const float level = inside[rank];
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m[i]) act[i] = std::max(act[i], level);
    }
  }
  return out;
}

}  // namespace protood
