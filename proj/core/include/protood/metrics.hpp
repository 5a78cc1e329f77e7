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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "protood/raster.hpp"

namespace protood {

// Pixel confusion counts with OOD as the positive class.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t tn = 0;

  std::int64_t positives() const { return tp + fn; }
  std::int64_t negatives() const { return fp + tn; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend ConfusionCounts operator+(ConfusionCounts a, const ConfusionCounts& b) { return a += b; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

// Pixels where `ignore` is nonzero are left out of every count.
ConfusionCounts confusion_counts(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* ignore = nullptr);

// IoU = TP/(TP+FP+FN), F1 = 2TP/(2TP+FP+FN); 1 when prediction and truth are
// both empty.
double binary_iou(const ConfusionCounts& c);
double f1_score(const ConfusionCounts& c);
double binary_iou(const BinaryMask& pred, const BinaryMask& gt);
double f1_score(const BinaryMask& pred, const BinaryMask& gt);

// How a score compares against a curve threshold.
enum class ScoreRule {
  kAtLeast,  // positive iff score >= threshold (ranking scores)
  kAbove,    // positive iff score > threshold (mirrors the OOD decision rule)
};

inline constexpr std::size_t kUniformGridPoints = 512;
inline constexpr std::size_t kMaxExactGridScores = 100000;

// Descending grid: kUniformGridPoints evenly spaced over [0, 1], plus every
// distinct finite score when the pooled score count is at most
// kMaxExactGridScores.
std::vector<double> make_threshold_grid(std::span<const std::span<const float>> score_sets,
                                        std::size_t uniform_points = kUniformGridPoints,
                                        std::size_t max_exact = kMaxExactGridScores);

struct CurvePoint {
  double threshold = 0.0;
  ConfusionCounts counts;

  std::optional<double> precision() const;  // empty when nothing is predicted
  double recall() const;                    // TPR
  double fpr() const;
};

struct ThresholdCurve {
  std::vector<CurvePoint> points;  // descending thresholds
};

// Accumulates pooled confusion counts at a fixed threshold grid. Adding images
// in any order yields the same curve.
class CurveAccumulator {
 public:
  explicit CurveAccumulator(std::vector<double> descending_grid, ScoreRule rule = ScoreRule::kAtLeast);

  // Counts for one image at every grid threshold.
  std::vector<ConfusionCounts> count(std::span<const float> scores, const BinaryMask& gt,
                                     const BinaryMask* ignore = nullptr) const;
  void add(std::span<const ConfusionCounts> per_threshold);
  void add(std::span<const float> scores, const BinaryMask& gt, const BinaryMask* ignore = nullptr);

  ThresholdCurve curve() const;
  const std::vector<double>& grid() const { return grid_; }

 private:
  std::vector<double> grid_;
  ScoreRule rule_;
  std::vector<ConfusionCounts> totals_;
};

// Single-image convenience over CurveAccumulator.
ThresholdCurve pr_curve(std::span<const float> scores, const BinaryMask& gt, std::span<const double> grid,
                        ScoreRule rule = ScoreRule::kAtLeast);

// Step-wise average precision: sum over descending thresholds of
// (R_i - R_{i-1}) * P_i with R_0 = 0, skipping points with no predictions.
// Throws EmptyGroundTruth when the curve has no positive pixels.
double aupr(const ThresholdCurve& curve);

struct FprAtTpr {
  double fpr = 0.0;
  double tpr = 0.0;       // TPR of the chosen point
  bool fallback = false;  // target never reached; best achieved TPR used instead
};

// Minimum FPR among points with TPR >= target; if none reaches the target,
// the minimum FPR among points attaining the highest TPR.
FprAtTpr fpr_at_tpr(const ThresholdCurve& curve, double target = 0.95);

// CSV with header threshold,tp,fp,fn,tn,precision,recall,fpr. Undefined
// precision is written as an empty field.
std::string curve_to_csv(const ThresholdCurve& curve);

}  // namespace protood
