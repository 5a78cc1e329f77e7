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

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "protood/matcher.hpp"
#include "protood/ood_detector.hpp"

namespace {

using namespace protood;

// ViT-S/14 sized input: D=384 on a 37x66 grid (518x924 pixels), bank of
// 19 classes x 20 prototypes.
constexpr int kDim = 384, kGridH = 37, kGridW = 66, kClasses = 19, kPerClass = 20, kPatch = 14;

FeatureMap random_features() {
  std::mt19937_64 rng(1);
  std::normal_distribution<float> n;
  FeatureMap f(kDim, kGridH, kGridW, kPatch);
  for (auto& v : f.values) v = n(rng);
  return f;
}

PrototypeBank random_bank() {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<PrototypeClass> classes;
  for (int k = 0; k < kClasses; ++k) {
    PrototypeClass c{"c" + std::to_string(k), {}, {}};
    for (int i = 0; i < kPerClass; ++i) {
      std::vector<double> v(kDim);
      double norm = 0.0;
      for (auto& x : v) {
        x = n(rng);
        norm += x * x;
      }
      for (auto x : v) c.vectors.push_back(static_cast<float>(x / std::sqrt(norm)));
      c.provenance.push_back({"img", i});
    }
    classes.push_back(std::move(c));
  }
  return PrototypeBank(kDim, std::move(classes));
}

void BM_CosineHeatmaps(benchmark::State& state) {
  const auto f = random_features();
  const auto bank = random_bank();
  for (auto _ : state) benchmark::DoNotOptimize(cosine_heatmaps(f, bank));
}
BENCHMARK(BM_CosineHeatmaps)->Unit(benchmark::kMillisecond);

void BM_ClassifyUpsampled(benchmark::State& state) {
  const auto heat = cosine_heatmaps(random_features(), random_bank());
  for (auto _ : state) benchmark::DoNotOptimize(classify_upsampled(heat, kGridH * kPatch, kGridW * kPatch));
}
BENCHMARK(BM_ClassifyUpsampled)->Unit(benchmark::kMillisecond);

void BM_UpsampleThenClassify(benchmark::State& state) {
  const auto heat = cosine_heatmaps(random_features(), random_bank());
  for (auto _ : state) benchmark::DoNotOptimize(classify_pixels(upsample(heat, kGridH * kPatch, kGridW * kPatch)));
}
BENCHMARK(BM_UpsampleThenClassify)->Unit(benchmark::kMillisecond);

void BM_IncsAndThreshold(benchmark::State& state) {
  const auto cls = classify_upsampled(cosine_heatmaps(random_features(), random_bank()), kGridH * kPatch,
                                      kGridW * kPatch);
  for (auto _ : state) benchmark::DoNotOptimize(threshold_ood(incs_map(cls.scores), cls.labels, kDefaultIncsThreshold));
}
BENCHMARK(BM_IncsAndThreshold)->Unit(benchmark::kMillisecond);

}  // namespace
