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

// Brute-force reference implementations used to check the library. They are
// written for clarity, not speed, and share no code with protood itself.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "protood/feature_map.hpp"
#include "protood/metrics.hpp"
#include "protood/prototype_bank.hpp"
#include "protood/raster.hpp"

namespace protood::testing {

struct OracleCounts {
  std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

OracleCounts count_pixels(const BinaryMask& pred, const BinaryMask& gt, const BinaryMask* ignore = nullptr);

// Average precision by enumerating every distinct score as a threshold
// (positive iff score >= threshold), highest first.
double enumerate_ap(std::span<const float> scores, std::span<const std::uint8_t> gt);

// Minimum FPR over distinct-score thresholds whose TPR reaches `target`.
double enumerate_fpr_at_tpr(std::span<const float> scores, std::span<const std::uint8_t> gt, double target);

// Bilinear sample of a row-major h x w grid at output pixel (y, x) of an
// H x W resize with half-pixel centers.
double bilinear_at(std::span<const float> grid, int h, int w, int H, int W, int y, int x);

// Prototype from the literal formula: mean over all h*w positions of the
// features multiplied by the token mask, then L2-normalized.
std::vector<double> literal_prototype(const FeatureMap& features, const TokenMask& mask);

double cosine(std::span<const double> a, std::span<const double> b);

// Deterministic generators for property tests.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  bool coin(double p = 0.5) { return uniform() < p; }

  BinaryMask mask(int w, int h, double p = 0.5);
  FeatureMap features(int d, int h, int w, double lo = -1.0, double hi = 1.0);

 private:
  std::mt19937_64 engine_;
};

}  // namespace protood::testing
