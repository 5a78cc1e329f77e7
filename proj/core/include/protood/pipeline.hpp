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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "protood/evaluation.hpp"
#include "protood/extractor.hpp"
#include "protood/manifest.hpp"
#include "protood/mask_refiner.hpp"
#include "protood/matcher.hpp"
#include "protood/ood_detector.hpp"
#include "protood/prototype_bank.hpp"

namespace protood {

enum class NormScope { kPerImage, kPerDataset };

std::string_view to_string(NormScope scope);
NormScope parse_norm_scope(std::string_view text);

struct RunConfig {
  std::filesystem::path manifest;
  std::filesystem::path bank;
  std::filesystem::path out = "out";
  std::string backend = "file";
  EvalMode mode = EvalMode::kPixel;
  double incs_threshold = kDefaultIncsThreshold;
  double detector_threshold = kDefaultDetectorThreshold;
  NormScope norm_scope = NormScope::kPerImage;
  int per_class_limit = kDefaultPrototypesPerClass;
  int jobs = 1;

  // ConfigError on out-of-range thresholds, jobs < 1, per_class_limit < 1.
  void validate() const;

  // Full resolved configuration except `jobs`, which never changes results.
  std::string to_json() const;
  // Reads a JSON config object; keys absent from the object keep their
  // current values, so flags applied afterwards win.
  void merge_json(const std::string& json_text);
};

// Everything computed for one image up to (and including) refinement.
struct ImageInference {
  std::string image_id;
  ScoreMap scores;  // best cosine similarity per pixel
  ScoreMap incs;
  LabelMap labels;
  OodDecision decision;
  std::optional<RefinedDecision> refined;
  std::vector<std::string> warnings;
};

// Label written for OOD pixels in labels.png.
inline constexpr std::uint16_t kOodLabelId = 255;

ProposalSet load_proposals(const ImageRecord& record);

// Feature extraction, matching and pixel classification at image resolution.
PixelClassification classify_image(const ImageRecord& record, const FeatureExtractor& extractor,
                                   const PrototypeBank& bank);

// Full per-image inference. `range` overrides per-image normalization.
ImageInference infer_image(const ImageRecord& record, const FeatureExtractor& extractor, const PrototypeBank& bank,
                           const RunConfig& config, const std::optional<ScoreRange>& range = std::nullopt);

struct ImageFailure {
  std::string image_id;
  std::string message;
};

struct BankSummary {
  std::filesystem::path path;
  int dim = 0;
  std::vector<std::pair<std::string, std::size_t>> class_counts;

  std::string to_text() const;
};

struct InferSummary {
  std::vector<std::string> processed;
  std::vector<ImageFailure> failures;
  std::vector<std::string> warnings;
  std::optional<ScoreRange> dataset_range;  // set for per-dataset normalization
};

struct EvalSummary {
  EvalReport report;
  std::vector<ImageFailure> failures;
  std::filesystem::path report_path;
  std::filesystem::path curves_path;
};

enum class SweepAxis { kIncs, kDetector, kPrototypes };
SweepAxis parse_sweep_axis(std::string_view text);
std::string_view to_string(SweepAxis axis);

struct SweepRow {
  double value = 0.0;
  double iou = 0.0;
  double f1 = 0.0;
  std::optional<double> aupr;
  double fpr = 0.0;
};

struct SweepSummary {
  SweepAxis axis = SweepAxis::kIncs;
  std::vector<SweepRow> rows;
  std::vector<ImageFailure> failures;
  std::filesystem::path csv_path;

  std::string to_csv() const;
};

// Commands. Whole-run problems throw protood::Error; per-image problems are
// collected in the returned summary and the remaining images still run.
BankSummary cmd_bank_build(const RunConfig& config);
std::string cmd_bank_inspect(const RunConfig& config);
InferSummary cmd_infer(const RunConfig& config, const std::vector<std::string>& image_ids = {});
EvalSummary cmd_eval(const RunConfig& config);
SweepSummary cmd_sweep(const RunConfig& config, SweepAxis axis, const std::vector<double>& grid);
std::filesystem::path cmd_render(const RunConfig& config, const std::string& image_id);

// Alpha-blends red at 0.5 opacity over pixels where `mask` is set.
RgbImage render_overlay(const RgbImage& image, const BinaryMask& mask);

// Parses "0.5,0.55,0.6" style lists.
std::vector<double> parse_grid(std::string_view text);

}  // namespace protood
