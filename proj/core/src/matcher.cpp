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

#include "protood/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "protood/error.hpp"

namespace protood {

namespace {

// Four independent partial sums let the compiler pipeline the loop while the
// summation order stays fixed.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

ClassHeatmaps cosine_heatmaps(const FeatureMap& features, const PrototypeBank& bank) {
  std::vector<std::vector<float>> class_vectors;
  class_vectors.reserve(static_cast<std::size_t>(bank.num_classes()));
  for (const auto& c : bank.classes()) class_vectors.push_back(c.vectors);
  return cosine_heatmaps(features, bank.dim(), class_vectors);
}

ClassHeatmaps cosine_heatmaps(const FeatureMap& features, int bank_dim,
                              std::span<const std::vector<float>> class_vectors) {
  if (features.dim != bank_dim) {
    throw Error(ErrorCode::kDimMismatch, "feature dim " + std::to_string(features.dim) + " vs bank dim " +
                                             std::to_string(bank_dim));
  }
  if (class_vectors.empty()) throw Error(ErrorCode::kShapeMismatch, "no prototype classes");
  const auto dim = static_cast<std::size_t>(features.dim);
  const std::size_t tokens = features.tokens();

  // Token-major copy so each dot product walks contiguous memory.
  std::vector<double> token_vectors(tokens * dim);
  std::vector<double> token_norms(tokens, 0.0);
  for (std::size_t d = 0; d < dim; ++d) {
    const auto channel = features.channel(static_cast<int>(d));
    for (std::size_t t = 0; t < tokens; ++t) token_vectors[t * dim + d] = channel[t];
  }
  for (std::size_t t = 0; t < tokens; ++t) {
    double n = 0.0;
    for (std::size_t d = 0; d < dim; ++d) n += token_vectors[t * dim + d] * token_vectors[t * dim + d];
    token_norms[t] = std::sqrt(n);
  }

  const int num_classes = static_cast<int>(class_vectors.size());
  std::vector<double> protos;
  std::vector<double> proto_norms;
  std::vector<std::size_t> class_begin = {0};
  for (int k = 0; k < num_classes; ++k) {
    const auto& vectors = class_vectors[static_cast<std::size_t>(k)];
    if (vectors.empty() || vectors.size() % dim != 0) {
      throw Error(ErrorCode::kDimMismatch, "prototype list " + std::to_string(k) + " is not a whole number of vectors");
    }
    for (std::size_t i = 0; i < vectors.size() / dim; ++i) {
      double n = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double v = vectors[i * dim + d];
        protos.push_back(v);
        n += v * v;
      }
      proto_norms.push_back(std::sqrt(n));
    }
    class_begin.push_back(proto_norms.size());
  }

  // Token-outer order keeps the (small) bank in cache while each token is
  // read once.
  ClassHeatmaps out(num_classes, features.grid_h, features.grid_w);
  for (std::size_t t = 0; t < tokens; ++t) {
    const double* z = token_vectors.data() + t * dim;
    for (int k = 0; k < num_classes; ++k) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t i = class_begin[static_cast<std::size_t>(k)]; i < class_begin[static_cast<std::size_t>(k) + 1]; ++i) {
        double cos = 0.0;
        if (token_norms[t] > 0.0 && proto_norms[i] > 0.0) {
          cos = std::clamp(dot(z, protos.data() + i * dim, dim) / (token_norms[t] * proto_norms[i]), -1.0, 1.0);
        }
        best = std::max(best, cos);
      }
      out.values[static_cast<std::size_t>(k) * tokens + t] = static_cast<float>(best);
    }
  }
  return out;
}

namespace {

struct Tap {
  int lo = 0;
  int hi = 0;
  double frac = 0.0;
};

std::vector<Tap> make_taps(int source, int target) {
  std::vector<Tap> taps(static_cast<std::size_t>(target));
  const double scale = static_cast<double>(source) / static_cast<double>(target);
  for (int i = 0; i < target; ++i) {
    double s = (static_cast<double>(i) + 0.5) * scale - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(source - 1));
    Tap t;
    t.lo = static_cast<int>(std::floor(s));
    t.hi = std::min(t.lo + 1, source - 1);
    t.frac = s - t.lo;
    taps[static_cast<std::size_t>(i)] = t;
  }
  return taps;
}

// a + f * (b - a) returns a exactly when a == b, so constant regions stay exact.
float sample(std::span<const float> channel, int width, const Tap& ty, const Tap& tx) {
  const double a = channel[static_cast<std::size_t>(ty.lo) * width + tx.lo];
  const double b = channel[static_cast<std::size_t>(ty.lo) * width + tx.hi];
  const double c = channel[static_cast<std::size_t>(ty.hi) * width + tx.lo];
  const double d = channel[static_cast<std::size_t>(ty.hi) * width + tx.hi];
  const double top = a + tx.frac * (b - a);
  const double bottom = c + tx.frac * (d - c);
  const double v = top + ty.frac * (bottom - top);
  const double lo = std::min(std::min(a, b), std::min(c, d));
  const double hi = std::max(std::max(a, b), std::max(c, d));
  return static_cast<float>(std::clamp(v, lo, hi));
}

void check_target(const ClassHeatmaps& tokens, int height, int width) {
  if (tokens.num_classes < 1 || tokens.height < 1 || tokens.width < 1) {
    throw Error(ErrorCode::kShapeMismatch, "heatmap stack is empty");
  }
  if (height < tokens.height || width < tokens.width) {
    throw Error(ErrorCode::kShapeMismatch, "upsample target is smaller than the token grid");
  }
}

}  // namespace

ClassHeatmaps upsample(const ClassHeatmaps& tokens, int height, int width) {
  check_target(tokens, height, width);
  const auto ytaps = make_taps(tokens.height, height);
  const auto xtaps = make_taps(tokens.width, width);
  ClassHeatmaps out(tokens.num_classes, height, width);
  for (int k = 0; k < tokens.num_classes; ++k) {
    const auto channel = tokens.channel(k);
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        out.at(k, y, x) = sample(channel, tokens.width, ytaps[static_cast<std::size_t>(y)], xtaps[static_cast<std::size_t>(x)]);
      }
    }
  }
  return out;
}

PixelClassification classify_pixels(const ClassHeatmaps& heatmaps) {
  if (heatmaps.num_classes < 1) throw Error(ErrorCode::kShapeMismatch, "heatmap stack has no classes");
  PixelClassification out{LabelMap(heatmaps.width, heatmaps.height), ScoreMap(heatmaps.width, heatmaps.height)};
  auto labels = out.labels.pixels();
  auto scores = out.scores.pixels();
  const std::size_t plane = heatmaps.plane();
  for (std::size_t i = 0; i < plane; ++i) {
    int best_k = 0;
    float best = heatmaps.values[i];
    for (int k = 1; k < heatmaps.num_classes; ++k) {
      const float v = heatmaps.values[static_cast<std::size_t>(k) * plane + i];
      if (v > best) {
        best = v;
        best_k = k;
      }
    }
    labels[i] = best_k;
    scores[i] = best;
  }
  return out;
}

PixelClassification classify_upsampled(const ClassHeatmaps& tokens, int height, int width) {
  check_target(tokens, height, width);
  const auto ytaps = make_taps(tokens.height, height);
  const auto xtaps = make_taps(tokens.width, width);
  PixelClassification out{LabelMap(width, height), ScoreMap(width, height)};
  for (int y = 0; y < height; ++y) {
    const auto& ty = ytaps[static_cast<std::size_t>(y)];
    for (int x = 0; x < width; ++x) {
      const auto& tx = xtaps[static_cast<std::size_t>(x)];
      int best_k = 0;
      float best = sample(tokens.channel(0), tokens.width, ty, tx);
      for (int k = 1; k < tokens.num_classes; ++k) {
        const float v = sample(tokens.channel(k), tokens.width, ty, tx);
        if (v > best) {
          best = v;
          best_k = k;
        }
      }
      out.labels.at(y, x) = best_k;
      out.scores.at(y, x) = best;
    }
  }
  return out;
}

}  // namespace protood
