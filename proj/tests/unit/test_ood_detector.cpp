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

#include <algorithm>
#include <cmath>

#include "../support/helpers.hpp"
#include "../support/oracles.hpp"
#include "protood/ood_detector.hpp"

namespace protood {
namespace {

using testing::code_of;
using testing::Rng;

ScoreMap row(std::vector<float> v) {
  ScoreMap m(static_cast<int>(v.size()), 1);
  std::copy(v.begin(), v.end(), m.pixels().begin());
  return m;
}

std::vector<float> values(const ScoreMap& m) { return {m.pixels().begin(), m.pixels().end()}; }

ScoreMap random_scores(Rng& rng, int w, int h) {
  ScoreMap m(w, h);
  for (auto& v : m.pixels()) v = static_cast<float>(rng.uniform(-1, 1));
  return m;
}

TEST(Incs, WorkedExample) {
  const auto w = incs_map(row({0.2f, 0.6f, 1.0f}));
  EXPECT_FLOAT_EQ(w.at(0, 0), 1.0f);
  EXPECT_FLOAT_EQ(w.at(0, 1), 0.5f);
  EXPECT_FLOAT_EQ(w.at(0, 2), 0.0f);
}

TEST(Incs, ConstantMapIsZero) {
  EXPECT_EQ(values(incs_map(row({0.5f, 0.5f}))), (std::vector<float>{0, 0}));
  EXPECT_EQ(values(incs_map(row({-1.0f}))), (std::vector<float>{0}));
}

TEST(Incs, SpansUnitInterval) {
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const auto w = incs_map(random_scores(rng, 9, 7));
    const auto [lo, hi] = std::minmax_element(w.pixels().begin(), w.pixels().end());
    EXPECT_EQ(*lo, 0.0f);
    EXPECT_EQ(*hi, 1.0f);
  }
}

TEST(Incs, AffineInvariance) {
  Rng rng(14);
  for (int i = 0; i < 50; ++i) {
    const auto v = random_scores(rng, 8, 8);
    const double a = rng.uniform(0.01, 50), b = rng.uniform(-5, 5);
    ScoreMap t = v;
    for (auto& x : t.pixels()) x = static_cast<float>(a * x + b);
    const auto w0 = incs_map(v), w1 = incs_map(t);
    for (std::size_t p = 0; p < v.size(); ++p) ASSERT_NEAR(w0.pixels()[p], w1.pixels()[p], 1e-5);
  }
}

TEST(Incs, ComplementReproducesValues) {
  Rng rng(15);
  const auto w = incs_map(random_scores(rng, 10, 6));
  ScoreMap complement = w;
  for (auto& x : complement.pixels()) x = 1.0f - x;
  const auto again = incs_map(complement);
  for (std::size_t p = 0; p < w.size(); ++p) EXPECT_NEAR(again.pixels()[p], w.pixels()[p], 1e-6);
}

TEST(Incs, ExternalRange) {
  const auto w = incs_map(row({0.0f, 0.5f, 2.0f, -1.0f}), ScoreRange{0.0f, 1.0f});
  EXPECT_EQ(values(w), (std::vector<float>{1.0f, 0.5f, 0.0f, 1.0f}));
  EXPECT_EQ(values(incs_map(row({0.3f, 0.9f}), ScoreRange{0.4f, 0.4f})), (std::vector<float>{0, 0}));
  const auto r = score_range(row({0.3f, -0.2f})).merged(score_range(row({0.7f})));
  EXPECT_EQ(r.min, -0.2f);
  EXPECT_EQ(r.max, 0.7f);
}

TEST(ThresholdOod, WorkedExampleAtDefault) {
  const auto d = threshold_ood(row({1.0f, 0.5f, 0.0f}), LabelMap(3, 1, 2), kDefaultIncsThreshold);
  EXPECT_EQ(d.ood.at(0, 0), 1);
  EXPECT_EQ(d.ood.at(0, 1), 0);
  EXPECT_EQ(d.ood.at(0, 2), 0);
  EXPECT_EQ(d.labels.at(0, 1), 2);
  EXPECT_EQ(d.threshold, 0.55);
}

TEST(ThresholdOod, Boundaries) {
  const auto w = row({1.0f, 0.5f, 0.0f});
  const LabelMap labels(3, 1);
  EXPECT_EQ(count_true(threshold_ood(w, labels, 1.0).ood), 0u);
  EXPECT_EQ(count_true(threshold_ood(w, labels, 0.5).ood), 1u);
  EXPECT_EQ(count_true(threshold_ood(w, labels, 0.0).ood), 2u);
  EXPECT_EQ(count_true(threshold_ood(incs_map(row({0.4f, 0.4f})), LabelMap(2, 1), 0.0).ood), 0u);
}

TEST(ThresholdOod, Errors) {
  const auto w = row({0.5f});
  EXPECT_EQ(code_of([&] { threshold_ood(w, LabelMap(1, 1), 1.01); }), ErrorCode::kThresholdOutOfRange);
  EXPECT_EQ(code_of([&] { threshold_ood(w, LabelMap(1, 1), -0.1); }), ErrorCode::kThresholdOutOfRange);
  EXPECT_EQ(code_of([&] { threshold_ood(w, LabelMap(1, 1), std::nan("")); }), ErrorCode::kThresholdOutOfRange);
  EXPECT_EQ(code_of([&] { threshold_ood(w, LabelMap(2, 1), 0.5); }), ErrorCode::kShapeMismatch);
}

TEST(ThresholdOod, MonotoneInThreshold) {
  Rng rng(16);
  const auto w = incs_map(random_scores(rng, 12, 12));
  const LabelMap labels(12, 12);
  BinaryMask prev = threshold_ood(w, labels, 0.0).ood;
  for (int i = 1; i <= 20; ++i) {
    const auto cur = threshold_ood(w, labels, i / 20.0).ood;
    for (std::size_t p = 0; p < cur.size(); ++p) ASSERT_LE(cur.pixels()[p], prev.pixels()[p]);
    prev = cur;
  }
}

TEST(ThresholdOod, ExactnessOfStrictRule) {
  Rng rng(17);
  const auto w = incs_map(random_scores(rng, 20, 20));
  for (double t : {0.0, 0.25, 0.55, 0.9}) {
    const auto d = threshold_ood(w, LabelMap(20, 20), t);
    for (std::size_t p = 0; p < w.size(); ++p) ASSERT_EQ(d.ood.pixels()[p] != 0, w.pixels()[p] > t);
  }
}

}  // namespace
}  // namespace protood
