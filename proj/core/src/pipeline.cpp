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

#include "protood/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "binary_container.hpp"
#include "parallel.hpp"
#include "protood/error.hpp"
#include "protood/png_io.hpp"
#include "protood/tensor_io.hpp"

namespace protood {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(NormScope scope) { return scope == NormScope::kPerImage ? "per-image" : "per-dataset"; }

NormScope parse_norm_scope(std::string_view text) {
  if (text == "per-image") return NormScope::kPerImage;
  if (text == "per-dataset") return NormScope::kPerDataset;
  throw Error(ErrorCode::kConfigError, "norm scope must be \"per-image\" or \"per-dataset\", got \"" +
                                           std::string(text) + "\"");
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kIncs: return "incs";
    case SweepAxis::kDetector: return "detector";
    case SweepAxis::kPrototypes: return "prototypes";
  }
  return "incs";
}

SweepAxis parse_sweep_axis(std::string_view text) {
  if (text == "incs") return SweepAxis::kIncs;
  if (text == "detector") return SweepAxis::kDetector;
  if (text == "prototypes") return SweepAxis::kPrototypes;
  throw Error(ErrorCode::kConfigError, "sweep axis must be incs, detector or prototypes");
}

void RunConfig::validate() const {
  if (!(incs_threshold >= 0.0 && incs_threshold <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "--threshold must lie in [0, 1]");
  }
  if (!(detector_threshold >= 0.0 && detector_threshold <= 1.0)) {
    throw Error(ErrorCode::kConfigError, "--proposal-threshold must lie in [0, 1]");
  }
  if (jobs < 1) throw Error(ErrorCode::kConfigError, "--jobs must be >= 1");
  if (per_class_limit < 1) throw Error(ErrorCode::kConfigError, "--per-class-limit must be >= 1");
}

std::string RunConfig::to_json() const {
  json j = {
      {"manifest", manifest.generic_string()},
      {"bank", bank.generic_string()},
      {"out", out.generic_string()},
      {"backend", backend},
      {"mode", to_string(mode)},
      {"incs_threshold", incs_threshold},
      {"detector_threshold", detector_threshold},
      {"norm_scope", to_string(norm_scope)},
      {"per_class_limit", per_class_limit},
  };
  return j.dump();
}

void RunConfig::merge_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfigError, "config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "manifest") manifest = value.get<std::string>();
      else if (key == "bank") bank = value.get<std::string>();
      else if (key == "out") out = value.get<std::string>();
      else if (key == "backend") backend = value.get<std::string>();
      else if (key == "mode") mode = parse_eval_mode(value.get<std::string>());
      else if (key == "incs_threshold") incs_threshold = value.get<double>();
      else if (key == "detector_threshold") detector_threshold = value.get<double>();
      else if (key == "norm_scope") norm_scope = parse_norm_scope(value.get<std::string>());
      else if (key == "per_class_limit") per_class_limit = value.get<int>();
      else if (key == "jobs") jobs = value.get<int>();
      else throw Error(ErrorCode::kConfigError, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError, std::string("bad config value: ") + e.what());
  }
}

ProposalSet load_proposals(const ImageRecord& record) {
  ProposalSet out;
  if (!record.proposals) return out;
  for (std::size_t i = 0; i < record.proposals->size(); ++i) {
    const auto& ref = (*record.proposals)[i];
    out.push_back({read_mask(ref.mask_path), ref.score, ref.mask_path.filename().string()});
  }
  return out;
}

PixelClassification classify_image(const ImageRecord& record, const FeatureExtractor& extractor,
                                   const PrototypeBank& bank) {
  const FeatureMap features = extractor.extract(record);
  const PngInfo image = read_png_info(record.image_path);
  if (image.height < features.grid_h || image.width < features.grid_w) {
    throw Error(ErrorCode::kShapeMismatch, "image is smaller than its token grid");
  }
  return classify_upsampled(cosine_heatmaps(features, bank), image.height, image.width);
}

ImageInference infer_image(const ImageRecord& record, const FeatureExtractor& extractor, const PrototypeBank& bank,
                           const RunConfig& config, const std::optional<ScoreRange>& range) {
  auto classified = classify_image(record, extractor, bank);
  ImageInference out;
  out.image_id = record.id;
  out.incs = range ? incs_map(classified.scores, *range) : incs_map(classified.scores);
  out.scores = std::move(classified.scores);
  out.labels = std::move(classified.labels);
  out.decision = threshold_ood(out.incs, out.labels, config.incs_threshold);
  if (config.mode == EvalMode::kMasked) {
    if (!record.proposals || record.proposals->empty()) {
      out.warnings.push_back("image '" + record.id + "': no proposals; refined mask is empty");
    }
    out.refined = refine_ood(out.decision, load_proposals(record), config.detector_threshold);
  }
  return out;
}

namespace {

struct Prepared {
  DatasetManifest manifest;
  std::unique_ptr<FeatureExtractor> extractor;
};

Prepared prepare(const RunConfig& config) {
  config.validate();
  if (config.manifest.empty()) throw Error(ErrorCode::kConfigError, "--manifest is required");
  Prepared p;
  p.manifest = load_manifest(config.manifest);
  p.extractor = make_extractor(config.backend);
  return p;
}

PrototypeBank require_bank(const RunConfig& config) {
  if (config.bank.empty()) throw Error(ErrorCode::kConfigError, "--bank is required");
  return load_bank(config.bank);
}

std::vector<const ImageRecord*> select_images(const DatasetManifest& manifest, const std::vector<std::string>& ids) {
  std::vector<const ImageRecord*> out;
  if (ids.empty()) {
    for (const auto& r : manifest.images) out.push_back(&r);
    return out;
  }
  for (const auto& id : ids) {
    const auto* r = manifest.find_image(id);
    if (r == nullptr) throw Error(ErrorCode::kConfigError, "image '" + id + "' is not in the manifest");
    out.push_back(r);
  }
  return out;
}

std::vector<const ImageRecord*> evaluated_images(const DatasetManifest& manifest, EvalMode mode) {
  std::vector<const ImageRecord*> out;
  for (const auto& r : manifest.images) {
    if (!r.ood_gt_path) continue;
    if (mode == EvalMode::kMasked && !r.proposals) {
      throw Error(ErrorCode::kConfigError, "masked mode needs proposals for image '" + r.id + "'");
    }
    out.push_back(&r);
  }
  if (out.empty()) throw Error(ErrorCode::kConfigError, "no manifest image has an ood_gt_path to evaluate");
  return out;
}

std::string error_text(const std::exception& e) { return e.what(); }

fs::path image_dir(const RunConfig& config, const std::string& id) { return config.out / id; }

// Per-dataset scope needs the score range of every image before any INCS map
// can be produced, so classification runs twice in that mode.
std::optional<ScoreRange> dataset_range(const std::vector<const ImageRecord*>& records,
                                        const FeatureExtractor& extractor, const PrototypeBank& bank, int jobs,
                                        std::vector<std::optional<std::string>>& errors) {
  std::vector<std::optional<ScoreRange>> ranges(records.size());
  detail::parallel_for(records.size(), jobs, [&](std::size_t i) {
    try {
      ranges[i] = score_range(classify_image(*records[i], extractor, bank).scores);
    } catch (const std::exception& e) {
      errors[i] = error_text(e);
    }
  });
  std::optional<ScoreRange> merged;
  for (const auto& r : ranges) {
    if (r) merged = merged ? merged->merged(*r) : *r;
  }
  return merged;
}

Raster<std::uint16_t> label_ids(const ImageInference& inf, int num_classes) {
  const std::uint16_t ood_id = num_classes <= 255 ? kOodLabelId : 65535;
  Raster<std::uint16_t> ids(inf.labels.width(), inf.labels.height());
  auto labels = inf.labels.pixels();
  auto ood = inf.decision.ood.pixels();
  auto out = ids.pixels();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = ood[i] ? ood_id : static_cast<std::uint16_t>(labels[i]);
  return ids;
}

void write_inference(const ImageInference& inf, const RunConfig& config, int num_classes) {
  const auto dir = image_dir(config, inf.image_id);
  fs::create_directories(dir);
  FeatureMap incs(1, inf.incs.height(), inf.incs.width(), 1);
  incs.image_id = inf.image_id;
  incs.extractor_id = "incs:" + std::string(to_string(config.norm_scope));
  std::copy(inf.incs.pixels().begin(), inf.incs.pixels().end(), incs.values.begin());
  write_feature_map(incs, dir / "incs.pft");
  write_mask(inf.decision.ood, dir / "ood.png");
  write_label_png(label_ids(inf, num_classes), dir / "labels.png");
  if (inf.refined) write_mask(inf.refined->ood, dir / "refined.png");
}

void write_text(const fs::path& path, const std::string& text) {
  detail::write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

ScoreMap read_incs(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::kMissingInference, "missing " + path.string() + "; run infer first");
  const auto map = read_feature_map(path);
  if (map.dim != 1) throw Error(ErrorCode::kShapeMismatch, path.string() + " is not a single-channel INCS map");
  ScoreMap incs(map.grid_w, map.grid_h);
  std::copy(map.values.begin(), map.values.end(), incs.pixels().begin());
  return incs;
}

EvalSample load_sample(const ImageRecord& r, ScoreMap incs, EvalMode mode) {
  EvalSample s;
  s.image_id = r.id;
  s.incs = std::move(incs);
  s.gt = read_mask(*r.ood_gt_path);
  if (r.ignore_path) s.ignore = read_mask(*r.ignore_path);
  if (mode == EvalMode::kMasked) s.proposals = load_proposals(r);
  if (!s.gt.same_shape(s.incs)) {
    throw Error(ErrorCode::kShapeMismatch, "ground truth size differs from the INCS map");
  }
  return s;
}

EvalOptions eval_options(const RunConfig& config) {
  EvalOptions o;
  o.mode = config.mode;
  o.incs_threshold = config.incs_threshold;
  o.detector_threshold = config.detector_threshold;
  o.jobs = config.jobs;
  return o;
}

json failures_json(const std::vector<ImageFailure>& failures) {
  json out = json::array();
  for (const auto& f : failures) out.push_back({{"image_id", f.image_id}, {"error", f.message}});
  return out;
}

// Keeps samples that loaded, recording failures in manifest order.
std::vector<EvalSample> collect(std::vector<std::optional<EvalSample>>& loaded,
                                const std::vector<std::optional<std::string>>& errors,
                                const std::vector<const ImageRecord*>& records, std::vector<ImageFailure>& failures) {
  std::vector<EvalSample> samples;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (errors[i]) {
      failures.push_back({records[i]->id, *errors[i]});
    } else if (loaded[i]) {
      samples.push_back(std::move(*loaded[i]));
    }
  }
  return samples;
}

}  // namespace

std::string BankSummary::to_text() const {
  std::string out = fmt::format("bank {} (dim {}, {} classes)\n", path.string(), dim, class_counts.size());
  for (const auto& [name, count] : class_counts) out += fmt::format("  {:<24} {}\n", name, count);
  return out;
}

BankSummary cmd_bank_build(const RunConfig& config) {
  auto p = prepare(config);
  if (config.bank.empty()) throw Error(ErrorCode::kConfigError, "--bank (output path) is required");
  const auto bank = build_bank(p.manifest, *p.extractor, config.per_class_limit);
  if (config.bank.has_parent_path()) fs::create_directories(config.bank.parent_path());
  save_bank(bank, config.bank);
  BankSummary s{config.bank, bank.dim(), {}};
  for (const auto& c : bank.classes()) s.class_counts.emplace_back(c.name, c.count());
  return s;
}

std::string cmd_bank_inspect(const RunConfig& config) {
  const auto bank = require_bank(config);
  json j;
  j["dim"] = bank.dim();
  j["total_vectors"] = bank.total_vectors();
  j["classes"] = json::array();
  for (const auto& c : bank.classes()) {
    json sources = json::array();
    for (const auto& s : c.provenance) sources.push_back({{"image_id", s.image_id}, {"instance", s.instance_index}});
    j["classes"].push_back({{"name", c.name}, {"count", c.count()}, {"provenance", sources}});
  }
  return j.dump(2) + "\n";
}

InferSummary cmd_infer(const RunConfig& config, const std::vector<std::string>& image_ids) {
  auto p = prepare(config);
  const auto bank = require_bank(config);
  const auto records = select_images(p.manifest, image_ids);
  fs::create_directories(config.out);

  InferSummary summary;
  std::vector<std::optional<std::string>> errors(records.size());
  std::optional<ScoreRange> range;
  if (config.norm_scope == NormScope::kPerDataset) {
    range = dataset_range(records, *p.extractor, bank, config.jobs, errors);
    summary.dataset_range = range;
  }

  std::vector<std::vector<std::string>> warnings(records.size());
  detail::parallel_for(records.size(), config.jobs, [&](std::size_t i) {
    if (errors[i]) return;
    try {
      const auto inf = infer_image(*records[i], *p.extractor, bank, config, range);
      write_inference(inf, config, bank.num_classes());
      warnings[i] = inf.warnings;
    } catch (const std::exception& e) {
      errors[i] = error_text(e);
    }
  });

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (errors[i]) {
      summary.failures.push_back({records[i]->id, *errors[i]});
    } else {
      summary.processed.push_back(records[i]->id);
    }
    summary.warnings.insert(summary.warnings.end(), warnings[i].begin(), warnings[i].end());
  }
  return summary;
}

EvalSummary cmd_eval(const RunConfig& config) {
  config.validate();
  if (config.manifest.empty()) throw Error(ErrorCode::kConfigError, "--manifest is required");
  const auto manifest = load_manifest(config.manifest);
  const auto records = evaluated_images(manifest, config.mode);

  std::vector<std::optional<EvalSample>> loaded(records.size());
  std::vector<std::optional<std::string>> errors(records.size());
  detail::parallel_for(records.size(), config.jobs, [&](std::size_t i) {
    try {
      loaded[i] = load_sample(*records[i], read_incs(image_dir(config, records[i]->id) / "incs.pft"), config.mode);
    } catch (const std::exception& e) {
      errors[i] = error_text(e);
    }
  });

  EvalSummary summary;
  const auto samples = collect(loaded, errors, records, summary.failures);
  if (samples.empty()) throw Error(ErrorCode::kMissingInference, "no image could be evaluated");
  summary.report = evaluate(samples, eval_options(config));

  json report = json::parse(report_to_json(summary.report, config.to_json()));
  report["norm_scope"] = to_string(config.norm_scope);
  report["failures"] = failures_json(summary.failures);
  fs::create_directories(config.out);
  summary.report_path = config.out / "report.json";
  summary.curves_path = config.out / "curves.csv";
  write_text(summary.report_path, report.dump(2) + "\n");
  write_text(summary.curves_path, curve_to_csv(summary.report.curve));
  return summary;
}

std::string SweepSummary::to_csv() const {
  std::string out = "value,iou,f1,aupr,fpr\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{}\n", r.value, r.iou, r.f1, r.aupr ? fmt::format("{}", *r.aupr) : std::string(),
                       r.fpr);
  }
  return out;
}

SweepSummary cmd_sweep(const RunConfig& config, SweepAxis axis, const std::vector<double>& grid) {
  auto p = prepare(config);
  if (grid.empty()) throw Error(ErrorCode::kConfigError, "--grid must list at least one value");
  for (double v : grid) {
    if (axis == SweepAxis::kPrototypes) {
      if (!(v >= 1.0) || v != std::floor(v)) throw Error(ErrorCode::kConfigError, "prototype counts must be integers >= 1");
    } else if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::kConfigError, "threshold grid values must lie in [0, 1]");
    }
  }
  const EvalMode mode = axis == SweepAxis::kDetector ? EvalMode::kMasked : config.mode;
  const auto records = evaluated_images(p.manifest, mode);

  SweepSummary summary;
  summary.axis = axis;

  // INCS maps for every evaluated image under one bank.
  auto score_images = [&](const PrototypeBank& bank) {
    std::vector<std::optional<std::string>> errors(records.size());
    std::optional<ScoreRange> range;
    if (config.norm_scope == NormScope::kPerDataset) {
      range = dataset_range(records, *p.extractor, bank, config.jobs, errors);
    }
    std::vector<std::optional<EvalSample>> loaded(records.size());
    detail::parallel_for(records.size(), config.jobs, [&](std::size_t i) {
      if (errors[i]) return;
      try {
        const auto cls = classify_image(*records[i], *p.extractor, bank);
        auto incs = range ? incs_map(cls.scores, *range) : incs_map(cls.scores);
        loaded[i] = load_sample(*records[i], std::move(incs), mode);
      } catch (const std::exception& e) {
        errors[i] = error_text(e);
      }
    });
    std::vector<ImageFailure> failures;
    auto samples = collect(loaded, errors, records, failures);
    if (summary.failures.empty()) summary.failures = failures;
    if (samples.empty()) throw Error(ErrorCode::kMissingInference, "no image could be scored");
    return samples;
  };

  auto row_for = [&](double value, const std::vector<EvalSample>& samples, EvalOptions options) {
    options.mode = mode;
    const auto report = evaluate(samples, options);
    return SweepRow{value, report.iou, report.f1, report.aupr, report.fpr_at_95.fpr};
  };

  if (axis == SweepAxis::kPrototypes) {
    for (double v : grid) {
      const auto bank = build_bank(p.manifest, *p.extractor, static_cast<int>(v));
      summary.rows.push_back(row_for(v, score_images(bank), eval_options(config)));
    }
  } else {
    const auto samples = score_images(require_bank(config));
    for (double v : grid) {
      auto options = eval_options(config);
      (axis == SweepAxis::kIncs ? options.incs_threshold : options.detector_threshold) = v;
      summary.rows.push_back(row_for(v, samples, options));
    }
  }

  fs::create_directories(config.out);
  summary.csv_path = config.out / ("sweep_" + std::string(to_string(axis)) + ".csv");
  write_text(summary.csv_path, summary.to_csv());
  return summary;
}

RgbImage render_overlay(const RgbImage& image, const BinaryMask& mask) {
  if (image.width != mask.width() || image.height != mask.height()) {
    throw Error(ErrorCode::kShapeMismatch, "overlay mask size differs from the image");
  }
  constexpr std::array<int, 3> kRed = {255, 0, 0};
  RgbImage out = image;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (!mask.at(y, x)) continue;
      auto* px = out.pixel(y, x);
      for (int c = 0; c < 3; ++c) px[c] = static_cast<std::uint8_t>((px[c] + kRed[static_cast<std::size_t>(c)] + 1) / 2);
    }
  }
  return out;
}

fs::path cmd_render(const RunConfig& config, const std::string& image_id) {
  config.validate();
  if (config.manifest.empty()) throw Error(ErrorCode::kConfigError, "--manifest is required");
  const auto manifest = load_manifest(config.manifest);
  const auto* record = manifest.find_image(image_id);
  if (record == nullptr) throw Error(ErrorCode::kConfigError, "image '" + image_id + "' is not in the manifest");
  const auto dir = image_dir(config, image_id);
  const auto mask_path = dir / (config.mode == EvalMode::kMasked ? "refined.png" : "ood.png");
  if (!fs::exists(mask_path)) {
    throw Error(ErrorCode::kMissingInference, "missing " + mask_path.string() + "; run infer first");
  }
  const auto overlay = render_overlay(read_rgb(record->image_path), read_mask(mask_path));
  const auto out = dir / "overlay.png";
  write_rgb(overlay, out);
  return out;
}

std::vector<double> parse_grid(std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || end != item.data() + item.size()) {
      throw Error(ErrorCode::kConfigError, "bad grid value '" + std::string(item) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace protood
