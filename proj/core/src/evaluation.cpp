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

#include "protood/evaluation.hpp"

#include <json.hpp>

#include "parallel.hpp"
#include "protood/error.hpp"

namespace protood {

using nlohmann::json;

std::string_view to_string(EvalMode mode) { return mode == EvalMode::kPixel ? "pixel" : "masked"; }

EvalMode parse_eval_mode(std::string_view text) {
  if (text == "pixel") return EvalMode::kPixel;
  if (text == "masked") return EvalMode::kMasked;
  throw Error(ErrorCode::kConfigError, "mode must be \"pixel\" or \"masked\", got \"" + std::string(text) + "\"");
}

namespace {

// Binary prediction at the fixed operating point.
BinaryMask fixed_prediction(const EvalSample& s, const EvalOptions& o) {
  const LabelMap labels(s.incs.width(), s.incs.height(), 0);
  auto decision = threshold_ood(s.incs, labels, o.incs_threshold);
  if (o.mode == EvalMode::kPixel) return std::move(decision.ood);
  return refine_ood(decision, s.proposals, o.detector_threshold).ood;
}

}  // namespace

EvalReport evaluate(std::span<const EvalSample> samples, const EvalOptions& options) {
  if (!(options.incs_threshold >= 0.0 && options.incs_threshold <= 1.0)) {
    throw Error(ErrorCode::kThresholdOutOfRange, "INCS threshold must lie in [0, 1]");
  }
  if (!(options.detector_threshold >= 0.0 && options.detector_threshold <= 1.0)) {
    throw Error(ErrorCode::kThresholdOutOfRange, "detector threshold must lie in [0, 1]");
  }
  for (const auto& s : samples) {
    if (!s.incs.same_shape(s.gt) || (s.ignore && !s.ignore->same_shape(s.gt))) {
      throw Error(ErrorCode::kShapeMismatch, "image '" + s.image_id + "': INCS map and ground truth differ in size");
    }
  }

  const std::size_t n = samples.size();
  // The ranking score per pixel: INCS itself, or the refinement activation.
  std::vector<ScoreMap> ranking(n);
  const ScoreRule rule = options.mode == EvalMode::kPixel ? ScoreRule::kAtLeast : ScoreRule::kAbove;
  if (options.mode == EvalMode::kMasked) {
    detail::parallel_for(n, options.jobs, [&](std::size_t i) {
      ranking[i] = refinement_activation(samples[i].incs, samples[i].proposals, options.detector_threshold);
    });
  }
  auto ranking_of = [&](std::size_t i) -> const ScoreMap& {
    return options.mode == EvalMode::kPixel ? samples[i].incs : ranking[i];
  };

  std::vector<std::span<const float>> score_sets;
  for (std::size_t i = 0; i < n; ++i) score_sets.push_back(ranking_of(i).pixels());
  CurveAccumulator acc(make_threshold_grid(score_sets, options.uniform_points, options.max_exact_scores), rule);

  std::vector<std::vector<ConfusionCounts>> per_threshold(n);
  std::vector<ImageEval> per_image(n);
  detail::parallel_for(n, options.jobs, [&](std::size_t i) {
    const auto& s = samples[i];
    const BinaryMask* ignore = s.ignore ? &*s.ignore : nullptr;
    per_threshold[i] = acc.count(ranking_of(i).pixels(), s.gt, ignore);

    auto& e = per_image[i];
    e.image_id = s.image_id;
    e.counts = confusion_counts(fixed_prediction(s, options), s.gt, ignore);
    e.iou = binary_iou(e.counts);
    e.f1 = f1_score(e.counts);
    CurveAccumulator single(acc.grid(), rule);
    single.add(per_threshold[i]);
    const auto curve = single.curve();
    if (e.counts.positives() > 0) e.aupr = aupr(curve);
    if (!curve.points.empty()) e.fpr_at_95 = fpr_at_tpr(curve, options.tpr_target);
  });

  EvalReport report;
  report.mode = options.mode;
  report.incs_threshold = options.incs_threshold;
  report.detector_threshold = options.detector_threshold;
  report.tpr_target = options.tpr_target;
  for (std::size_t i = 0; i < n; ++i) {
    acc.add(per_threshold[i]);
    report.counts += per_image[i].counts;
  }
  report.iou = binary_iou(report.counts);
  report.f1 = f1_score(report.counts);
  report.curve = acc.curve();
  if (report.counts.positives() > 0) {
    report.aupr = aupr(report.curve);
  } else {
    report.warnings.push_back("no OOD pixels in the ground truth; AUPR is undefined");
  }
  if (!report.curve.points.empty()) report.fpr_at_95 = fpr_at_tpr(report.curve, options.tpr_target);
  if (report.fpr_at_95.fallback) {
    report.warnings.push_back("TPR target not reached; FPR reported at the best achieved TPR");
  }
  report.per_image = std::move(per_image);
  return report;
}

namespace {

json counts_json(const ConfusionCounts& c) { return {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}}; }

json fpr_json(const FprAtTpr& f) { return {{"fpr", f.fpr}, {"tpr", f.tpr}, {"fallback", f.fallback}}; }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string report_to_json(const EvalReport& report, const std::string& config_json) {
  json root;
  root["mode"] = to_string(report.mode);
  root["integration"] = "ap-step";
  root["incs_threshold"] = report.incs_threshold;
  root["detector_threshold"] = report.detector_threshold;
  root["tpr_target"] = report.tpr_target;
  root["aupr"] = optional_json(report.aupr);
  root["fpr_at_tpr"] = fpr_json(report.fpr_at_95);
  root["iou"] = report.iou;
  root["f1"] = report.f1;
  root["counts"] = counts_json(report.counts);
  root["thresholds"] = report.curve.points.size();
  root["warnings"] = report.warnings;
  json images = json::array();
  for (const auto& e : report.per_image) {
    images.push_back({{"image_id", e.image_id},
                      {"counts", counts_json(e.counts)},
                      {"iou", e.iou},
                      {"f1", e.f1},
                      {"aupr", optional_json(e.aupr)},
                      {"fpr_at_tpr", fpr_json(e.fpr_at_95)}});
  }
  root["per_image"] = std::move(images);
  if (!config_json.empty()) root["config"] = json::parse(config_json);
  return root.dump(2) + "\n";
}

}  // namespace protood
