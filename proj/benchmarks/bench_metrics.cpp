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

#include <random>

#include "protood/evaluation.hpp"
#include "protood/metrics.hpp"

namespace {

using namespace protood;

EvalSample random_sample(std::mt19937_64& rng, int w, int h, int proposals) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  EvalSample s;
  s.image_id = "img";
  s.incs = ScoreMap(w, h);
  s.gt = BinaryMask(w, h);
  for (std::size_t i = 0; i < s.incs.size(); ++i) {
    s.gt.pixels()[i] = u(rng) < 0.05f;
    s.incs.pixels()[i] = s.gt.pixels()[i] ? 0.3f + 0.7f * u(rng) : 0.8f * u(rng);
  }
  for (int p = 0; p < proposals; ++p) {
    BinaryMask m(w, h);
    const int x0 = static_cast<int>(u(rng) * (w - 40)), y0 = static_cast<int>(u(rng) * (h - 40));
    for (int y = y0; y < y0 + 40; ++y) {
      for (int x = x0; x < x0 + 40; ++x) m.at(y, x) = 1;
    }
    s.proposals.push_back({std::move(m), u(rng), "p"});
  }
  return s;
}

void BM_CurveCounting(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto s = random_sample(rng, 924, 518, 0);
  const std::span<const float> sets[] = {s.incs.pixels()};
  CurveAccumulator acc(make_threshold_grid(sets));
  for (auto _ : state) benchmark::DoNotOptimize(acc.count(s.incs.pixels(), s.gt));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.incs.size()));
}
BENCHMARK(BM_CurveCounting)->Unit(benchmark::kMillisecond);

void BM_Evaluate(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::vector<EvalSample> samples;
  for (int i = 0; i < 4; ++i) samples.push_back(random_sample(rng, 924, 518, 20));
  EvalOptions opt;
  opt.mode = state.range(0) ? EvalMode::kMasked : EvalMode::kPixel;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(samples, opt));
}
BENCHMARK(BM_Evaluate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
