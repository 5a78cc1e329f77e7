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

#include "protood/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "protood/error.hpp"

namespace protood {

ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* ignore) {
  if (!pred.same_shape(gt) || (ignore != nullptr && !ignore->same_shape(gt))) {
    throw Error(ErrorCode::kShapeMismatch, "prediction, ground truth and ignore masks must share a size");
  }
  ConfusionCounts c;
  auto p = pred.pixels();
  auto g = gt.pixels();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (ignore != nullptr && ignore->pixels()[i]) continue;
    if (g[i]) {
      (p[i] ? c.tp : c.fn) += 1;
    } else {
      (p[i] ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double binary_iou(const ConfusionCounts& c) {
  const auto denom = c.tp + c.fp + c.fn;
  return denom == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

double f1_score(const ConfusionCounts& c) {
  const auto denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 1.0 : 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

double binary_iou(const BinaryMask& pred, const BinaryMask& gt) { return binary_iou(confusion_counts(pred, gt)); }
double f1_score(const BinaryMask& pred, const BinaryMask& gt) { return f1_score(confusion_counts(pred, gt)); }

std::vector<double> make_threshold_grid(std::span<const std::span<const float>> score_sets,
                                        std::size_t uniform_points, std::size_t max_exact) {
  std::vector<double> grid;
  if (uniform_points == 1) {
    grid.push_back(0.0);
  } else {
    for (std::size_t i = 0; i < uniform_points; ++i) {
      grid.push_back(static_cast<double>(i) / static_cast<double>(uniform_points - 1));
    }
  }
  std::size_t total = 0;
  for (const auto& s : score_sets) total += s.size();
  if (total <= max_exact) {
    for (const auto& s : score_sets) {
      for (float v : s) {
        if (std::isfinite(v)) grid.push_back(v);
      }
    }
  }
  std::sort(grid.begin(), grid.end(), std::greater<double>());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

std::optional<double> CurvePoint::precision() const {
  const auto predicted = counts.tp + counts.fp;
  if (predicted == 0) return std::nullopt;
  return static_cast<double>(counts.tp) / static_cast<double>(predicted);
}

double CurvePoint::recall() const {
  const auto pos = counts.positives();
  return pos == 0 ? 0.0 : static_cast<double>(counts.tp) / static_cast<double>(pos);
}

double CurvePoint::fpr() const {
  const auto neg = counts.negatives();
  return neg == 0 ? 0.0 : static_cast<double>(counts.fp) / static_cast<double>(neg);
}

CurveAccumulator::CurveAccumulator(std::vector<double> descending_grid, ScoreRule rule)
    : grid_(std::move(descending_grid)), rule_(rule), totals_(grid_.size()) {
  if (!std::is_sorted(grid_.begin(), grid_.end(), std::greater<double>())) {
    throw Error(ErrorCode::kConfigError, "threshold grid must be sorted in descending order");
  }
}

std::vector<ConfusionCounts> CurveAccumulator::count(std::span<const float> scores, const BinaryMask& gt,
                                                     const BinaryMask* ignore) const {
  if (scores.size() != gt.size() || (ignore != nullptr && ignore->size() != gt.size())) {
    throw Error(ErrorCode::kShapeMismatch, "scores, ground truth and ignore mask differ in size");
  }
  std::vector<float> pos;
  std::vector<float> neg;
  auto g = gt.pixels();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (ignore != nullptr && ignore->pixels()[i]) continue;
    (g[i] ? pos : neg).push_back(scores[i]);
  }
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());

  // Number of sorted values counted as positive predictions at threshold t.
  auto predicted = [this](const std::vector<float>& sorted, double t) -> std::int64_t {
    const auto it = rule_ == ScoreRule::kAtLeast
                        ? std::lower_bound(sorted.begin(), sorted.end(), t,
                                           [](float v, double th) { return static_cast<double>(v) < th; })
                        : std::upper_bound(sorted.begin(), sorted.end(), t,
                                           [](double th, float v) { return th < static_cast<double>(v); });
    return static_cast<std::int64_t>(sorted.end() - it);
  };

  std::vector<ConfusionCounts> out(grid_.size());
  const auto npos = static_cast<std::int64_t>(pos.size());
  const auto nneg = static_cast<std::int64_t>(neg.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    auto& c = out[i];
    c.tp = predicted(pos, grid_[i]);
    c.fn = npos - c.tp;
    c.fp = predicted(neg, grid_[i]);
    c.tn = nneg - c.fp;
  }
  return out;
}

void CurveAccumulator::add(std::span<const ConfusionCounts> per_threshold) {
  if (per_threshold.size() != totals_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "per-threshold counts do not match the grid");
  }
  for (std::size_t i = 0; i < totals_.size(); ++i) totals_[i] += per_threshold[i];
}

void CurveAccumulator::add(std::span<const float> scores, const BinaryMask& gt, const BinaryMask* ignore) {
  add(count(scores, gt, ignore));
}

ThresholdCurve CurveAccumulator::curve() const {
  ThresholdCurve c;
  c.points.reserve(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) c.points.push_back({grid_[i], totals_[i]});
  return c;
}

ThresholdCurve pr_curve(std::span<const float> scores, const BinaryMask& gt, std::span<const double> grid,
                        ScoreRule rule) {
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  CurveAccumulator acc(std::move(sorted), rule);
  acc.add(scores, gt);
  return acc.curve();
}

double aupr(const ThresholdCurve& curve) {
  if (curve.points.empty() || curve.points.front().counts.positives() == 0) {
    throw Error(ErrorCode::kEmptyGroundTruth, "no positive pixels; AUPR is undefined");
  }
  double ap = 0.0;
  double previous_recall = 0.0;
  for (const auto& p : curve.points) {
    const auto precision = p.precision();
    if (!precision) continue;
    const double r = p.recall();
    ap += (r - previous_recall) * *precision;
    previous_recall = r;
  }
  return ap;
}

FprAtTpr fpr_at_tpr(const ThresholdCurve& curve, double target) {
  if (curve.points.empty()) throw Error(ErrorCode::kShapeMismatch, "empty curve");
  std::optional<FprAtTpr> best;
  for (const auto& p : curve.points) {
    const double tpr = p.recall();
    if (tpr >= target && (!best || p.fpr() < best->fpr)) best = FprAtTpr{p.fpr(), tpr, false};
  }
  if (best) return *best;

  double max_tpr = 0.0;
  for (const auto& p : curve.points) max_tpr = std::max(max_tpr, p.recall());
  FprAtTpr fallback{1.0, max_tpr, true};
  bool found = false;
  for (const auto& p : curve.points) {
    if (p.recall() == max_tpr && (!found || p.fpr() < fallback.fpr)) {
      fallback.fpr = p.fpr();
      found = true;
    }
  }
  return fallback;
}

std::string curve_to_csv(const ThresholdCurve& curve) {
  std::string out = "threshold,tp,fp,fn,tn,precision,recall,fpr\n";
  for (const auto& p : curve.points) {
    const auto precision = p.precision();
    out += fmt::format("{},{},{},{},{},{},{},{}\n", p.threshold, p.counts.tp, p.counts.fp, p.counts.fn,
                       p.counts.tn, precision ? fmt::format("{}", *precision) : std::string(), p.recall(),
                       p.fpr());
  }
  return out;
}

}  // namespace protood
