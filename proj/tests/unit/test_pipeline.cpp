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

#include <gtest/gtest.h>

#include <json.hpp>

#include "../support/helpers.hpp"
#include "protood/png_io.hpp"
#include "protood/pipeline.hpp"
#include "protood/synthetic_scene.hpp"
#include "protood/tensor_io.hpp"

namespace protood {
namespace {

namespace fs = std::filesystem;
using testing::code_of;
using testing::TempDir;

class PipelineTest : public ::testing::Test {
 protected:
  RunConfig config(const SyntheticSceneOptions& opts = {}) {
    RunConfig c;
    c.manifest = write_synthetic_scene(dir_.path() / "data", opts);
    c.bank = dir_.path() / "bank.pbk";
    c.out = dir_.path() / "out";
    return c;
  }
  TempDir dir_;
};

TEST_F(PipelineTest, BankBuildAndInspect) {
  const auto c = config();
  const auto s = cmd_bank_build(c);
  ASSERT_EQ(s.class_counts.size(), 3u);
  EXPECT_EQ(s.class_counts[0], (std::pair<std::string, std::size_t>{"road", 2}));
  EXPECT_NE(s.to_text().find("vegetation"), std::string::npos);
  const auto j = nlohmann::json::parse(cmd_bank_inspect(c));
  EXPECT_EQ(j["dim"], 8);
  EXPECT_EQ(j["classes"][2]["name"], "sky");
  EXPECT_EQ(j["classes"][2]["provenance"][1]["image_id"], "bank_1");
}

TEST_F(PipelineTest, PixelInferenceRecoversInjectedRegion) {
  SyntheticSceneOptions opts;
  opts.patch_size = 1;
  const auto c = config(opts);
  cmd_bank_build(c);
  const auto s = cmd_infer(c);
  EXPECT_TRUE(s.failures.empty());
  EXPECT_EQ(s.processed.size(), 5u);
  const auto manifest = load_manifest(c.manifest);
  for (const auto& r : manifest.images) {
    const auto dir = c.out / r.id;
    ASSERT_TRUE(fs::exists(dir / "incs.pft"));
    ASSERT_TRUE(fs::exists(dir / "labels.png"));
    ASSERT_FALSE(fs::exists(dir / "refined.png"));
    const auto ood = read_mask(dir / "ood.png");
    if (r.ood_gt_path) {
      EXPECT_EQ(ood, read_mask(*r.ood_gt_path)) << r.id;
    } else {
      EXPECT_EQ(count_true(ood), 0u) << r.id;
    }
    const auto incs = read_feature_map(dir / "incs.pft");
    EXPECT_EQ(incs.dim, 1);
    EXPECT_EQ(incs.grid_h, ood.height());
  }
  const auto labels = read_label_map(c.out / "scene_0" / "labels.png", {{0, "road"}, {1, "vegetation"}, {2, "sky"}});
  EXPECT_EQ(labels.ids.at(0, 0), 2);  // sky on top
  EXPECT_EQ(count_true(label_mask(labels, kOodLabelId)), count_true(read_mask(c.out / "scene_0" / "ood.png")));
}

TEST_F(PipelineTest, MaskedInferenceIsContainedInProposals) {
  const auto c0 = config();
  auto c = c0;
  c.mode = EvalMode::kMasked;
  cmd_bank_build(c);
  const auto s = cmd_infer(c);
  // Bank images carry no proposals.
  EXPECT_EQ(s.warnings.size(), 2u);
  EXPECT_EQ(count_true(read_mask(c.out / "bank_0" / "refined.png")), 0u);
  const auto manifest = load_manifest(c.manifest);
  for (const auto& r : manifest.images) {
    if (!r.ood_gt_path) continue;
    const auto refined = read_mask(c.out / r.id / "refined.png");
    EXPECT_EQ(refined, read_mask(*r.ood_gt_path));
    BinaryMask proposal_union(refined.width(), refined.height());
    for (const auto& p : load_proposals(r)) {
      if (p.score < c.detector_threshold) continue;
      for (std::size_t i = 0; i < p.mask.size(); ++i) proposal_union.pixels()[i] |= p.mask.pixels()[i];
    }
    for (std::size_t i = 0; i < refined.size(); ++i) ASSERT_LE(refined.pixels()[i], proposal_union.pixels()[i]);
  }
}

TEST_F(PipelineTest, EvalWritesReportAndCurves) {
  auto c = config();
  c.mode = EvalMode::kMasked;
  cmd_bank_build(c);
  cmd_infer(c);
  const auto s = cmd_eval(c);
  EXPECT_EQ(s.report.iou, 1.0);
  EXPECT_EQ(s.report.f1, 1.0);
  EXPECT_EQ(s.report.aupr, 1.0);
  EXPECT_EQ(s.report.fpr_at_95.fpr, 0.0);
  const auto j = nlohmann::json::parse(testing::read_bytes(s.report_path));
  EXPECT_EQ(j["config"]["mode"], "masked");
  EXPECT_EQ(j["config"]["incs_threshold"], 0.55);
  EXPECT_EQ(j["config"]["detector_threshold"], 0.2);
  EXPECT_EQ(j["config"]["norm_scope"], "per-image");
  EXPECT_FALSE(j["config"].contains("jobs"));
  EXPECT_EQ(j["per_image"].size(), 3u);
  const auto csv = testing::read_bytes(s.curves_path);
  EXPECT_EQ(std::string(csv.begin(), csv.begin() + 9), "threshold");
}

TEST_F(PipelineTest, PerImageFailuresDoNotStopTheRun) {
  auto c = config();
  cmd_bank_build(c);
  testing::write_text(dir_.path() / "data" / "features" / "scene_1.pft", "PFT1 broken");
  const auto s = cmd_infer(c);
  ASSERT_EQ(s.failures.size(), 1u);
  EXPECT_EQ(s.failures[0].image_id, "scene_1");
  EXPECT_EQ(s.processed.size(), 4u);
  const auto e = cmd_eval(c);
  ASSERT_EQ(e.failures.size(), 1u);
  EXPECT_NE(e.failures[0].message.find("MissingInference"), std::string::npos);
  EXPECT_EQ(e.report.per_image.size(), 2u);
}

TEST_F(PipelineTest, EvalWithoutInferenceFails) {
  const auto c = config();
  EXPECT_EQ(code_of([&] { cmd_eval(c); }), ErrorCode::kMissingInference);
  EXPECT_EQ(code_of([&] { cmd_render(c, "scene_0"); }), ErrorCode::kMissingInference);
  EXPECT_EQ(code_of([&] { cmd_render(c, "nope"); }), ErrorCode::kConfigError);
}

TEST_F(PipelineTest, MaskedModeNeedsProposalsOnEvaluatedImages) {
  auto c = config();
  auto manifest = load_manifest(c.manifest);
  manifest.images.back().proposals.reset();
  testing::write_text(c.manifest, manifest_to_json(manifest, c.manifest.parent_path()));
  c.mode = EvalMode::kMasked;
  EXPECT_EQ(code_of([&] { cmd_eval(c); }), ErrorCode::kConfigError);
}

TEST_F(PipelineTest, EmptyProposalListGivesEmptyRefinedMapWithWarning) {
  auto c = config();
  auto manifest = load_manifest(c.manifest);
  manifest.images.back().proposals = std::vector<ProposalRef>{};
  testing::write_text(c.manifest, manifest_to_json(manifest, c.manifest.parent_path()));
  c.mode = EvalMode::kMasked;
  cmd_bank_build(c);
  const auto s = cmd_infer(c, {"scene_2"});
  ASSERT_EQ(s.warnings.size(), 1u);
  EXPECT_EQ(count_true(read_mask(c.out / "scene_2" / "refined.png")), 0u);
  EXPECT_EQ(code_of([&] { cmd_infer(c, {"missing"}); }), ErrorCode::kConfigError);
}

TEST_F(PipelineTest, PerDatasetScope) {
  SyntheticSceneOptions opts;
  opts.patch_size = 1;
  auto c = config(opts);
  c.norm_scope = NormScope::kPerDataset;
  cmd_bank_build(c);
  const auto s = cmd_infer(c);
  ASSERT_TRUE(s.dataset_range.has_value());
  EXPECT_LT(s.dataset_range->min, s.dataset_range->max);
  const auto e = cmd_eval(c);
  EXPECT_EQ(e.report.iou, 1.0);
  const auto j = nlohmann::json::parse(testing::read_bytes(e.report_path));
  EXPECT_EQ(j["config"]["norm_scope"], "per-dataset");
}

TEST_F(PipelineTest, Sweeps) {
  auto c = config();
  cmd_bank_build(c);
  const auto incs = cmd_sweep(c, SweepAxis::kIncs, {0.5, 0.55, 0.6});
  ASSERT_EQ(incs.rows.size(), 3u);
  EXPECT_EQ(incs.rows[1].value, 0.55);
  EXPECT_EQ(incs.csv_path.filename(), "sweep_incs.csv");
  const auto again = cmd_sweep(c, SweepAxis::kIncs, {0.5, 0.55, 0.6});
  EXPECT_EQ(incs.to_csv(), again.to_csv());
  const auto detector = cmd_sweep(c, SweepAxis::kDetector, {0.2, 0.95});
  EXPECT_EQ(detector.rows[0].iou, 1.0);
  EXPECT_EQ(detector.rows[1].iou, 0.0);
  const auto protos = cmd_sweep(c, SweepAxis::kPrototypes, {1, 2});
  EXPECT_EQ(protos.rows.size(), 2u);
  EXPECT_EQ(code_of([&] { cmd_sweep(c, SweepAxis::kPrototypes, {1.5}); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { cmd_sweep(c, SweepAxis::kIncs, {1.5}); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { cmd_sweep(c, SweepAxis::kIncs, {}); }), ErrorCode::kConfigError);
}

TEST(RenderOverlay, Blending) {
  RgbImage img(3, 2);
  for (std::size_t i = 0; i < img.rgb.size(); ++i) img.rgb[i] = static_cast<std::uint8_t>(i * 40);
  EXPECT_EQ(render_overlay(img, BinaryMask(3, 2)), img);
  const auto all = render_overlay(img, BinaryMask(3, 2, 1));
  for (std::size_t i = 0; i < img.rgb.size(); ++i) {
    const int target = i % 3 == 0 ? 255 : 0;
    EXPECT_EQ(all.rgb[i], (img.rgb[i] + target + 1) / 2);
  }
  EXPECT_EQ(code_of([&] { render_overlay(img, BinaryMask(2, 3)); }), ErrorCode::kShapeMismatch);
}

TEST_F(PipelineTest, RenderIsDeterministic) {
  auto c = config();
  cmd_bank_build(c);
  cmd_infer(c);
  const auto path = cmd_render(c, "scene_0");
  const auto first = testing::read_bytes(path);
  cmd_render(c, "scene_0");
  EXPECT_EQ(testing::read_bytes(path), first);
}

TEST(RunConfig, ValidationAndJson) {
  RunConfig c;
  EXPECT_NO_THROW(c.validate());
  c.incs_threshold = 1.2;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kConfigError);
  c = RunConfig{};
  c.jobs = 0;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kConfigError);

  RunConfig m;
  m.merge_json(R"({"mode":"masked","incs_threshold":0.6,"norm_scope":"per-dataset","jobs":4,"out":"x"})");
  EXPECT_EQ(m.mode, EvalMode::kMasked);
  EXPECT_EQ(m.incs_threshold, 0.6);
  EXPECT_EQ(m.detector_threshold, 0.2);
  EXPECT_EQ(m.norm_scope, NormScope::kPerDataset);
  EXPECT_EQ(m.jobs, 4);
  const auto j = nlohmann::json::parse(m.to_json());
  EXPECT_EQ(j["out"], "x");
  EXPECT_FALSE(j.contains("jobs"));
  EXPECT_EQ(code_of([&] { m.merge_json(R"({"threshold":0.5})"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { m.merge_json(R"({"mode":3})"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([&] { m.merge_json("[1]"); }), ErrorCode::kConfigError);
}

TEST(ParseGrid, Values) {
  EXPECT_EQ(parse_grid("0.5,0.55, 0.6"), (std::vector<double>{0.5, 0.55, 0.6}));
  EXPECT_EQ(parse_grid("5"), (std::vector<double>{5}));
  EXPECT_EQ(code_of([] { parse_grid("0.5,,0.6"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { parse_grid("abc"); }), ErrorCode::kConfigError);
  EXPECT_EQ(code_of([] { parse_grid(""); }), ErrorCode::kConfigError);
}

}  // namespace
}  // namespace protood
