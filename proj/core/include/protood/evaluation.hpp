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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protood/mask_refiner.hpp"
#include "protood/metrics.hpp"
#include "protood/ood_detector.hpp"
#include "protood/raster.hpp"

namespace protood {

enum class EvalMode { kPixel, kMasked };

std::string_view to_string(EvalMode mode);
EvalMode parse_eval_mode(std::string_view text);

// One evaluated image: its INCS map, OOD ground truth and (masked mode) proposals.
struct EvalSample {
  std::string image_id;
  ScoreMap incs;
  BinaryMask gt;
  std::optional<BinaryMask> ignore;
  ProposalSet proposals;
};

struct EvalOptions {
  EvalMode mode = EvalMode::kPixel;
  double incs_threshold = kDefaultIncsThreshold;
  double detector_threshold = kDefaultDetectorThreshold;
  double tpr_target = 0.95;
  std::size_t uniform_points = kUniformGridPoints;
  std::size_t max_exact_scores = kMaxExactGridScores;
  int jobs = 1;
};

struct ImageEval {
  std::string image_id;
  ConfusionCounts counts;  // at the fixed INCS threshold
  double iou = 0.0;
  double f1 = 0.0;
  std::optional<double> aupr;  // empty when the image has no OOD pixels
  FprAtTpr fpr_at_95;
};

struct EvalReport {
  EvalMode mode = EvalMode::kPixel;
  double incs_threshold = kDefaultIncsThreshold;
  double detector_threshold = kDefaultDetectorThreshold;
  double tpr_target = 0.95;

  std::optional<double> aupr;  // empty when the whole set has no OOD pixels
  FprAtTpr fpr_at_95;
  ConfusionCounts counts;      // pooled at the fixed threshold
  double iou = 0.0;
  double f1 = 0.0;

  ThresholdCurve curve;
  std::vector<ImageEval> per_image;
  std::vector<std::string> warnings;
};

// Pooled (micro-averaged) evaluation.
//
// Pixel mode ranks pixels by INCS (positive iff w >= threshold on the curve)
// and predicts w > incs_threshold at the fixed operating point. Masked mode
// re-runs proposal refinement at every curve threshold and at the fixed one.
EvalReport evaluate(std::span<const EvalSample> samples, const EvalOptions& options);

// JSON report. `config_json`, when non-empty, must be a JSON object and is
// embedded verbatim under "config".
std::string report_to_json(const EvalReport& report, const std::string& config_json = {});

}  // namespace protood
