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
#include <span>
#include <string>
#include <vector>

namespace protood {

// Dense patch-feature tensor for one image, laid out D x h x w with the
// embedding dimension outermost.
struct FeatureMap {
  int dim = 0;
  int grid_h = 0;
  int grid_w = 0;
  int patch_size = 1;
  std::string image_id;
  std::string extractor_id;
  std::vector<float> values;

  FeatureMap() = default;
  FeatureMap(int d, int h, int w, int patch = 1)
      : dim(d), grid_h(h), grid_w(w), patch_size(patch),
        values(static_cast<std::size_t>(d) * static_cast<std::size_t>(h) *
               static_cast<std::size_t>(w), 0.0f) {}

  std::size_t tokens() const noexcept {
    return static_cast<std::size_t>(grid_h) * static_cast<std::size_t>(grid_w);
  }

  float& at(int d, int row, int col) { return values[offset(d, row, col)]; }
  float at(int d, int row, int col) const { return values[offset(d, row, col)]; }

  std::span<const float> channel(int d) const {
    return std::span<const float>(values).subspan(static_cast<std::size_t>(d) * tokens(), tokens());
  }

  // Copies the embedding of one token into `out` (length dim).
  void token(int row, int col, std::span<float> out) const {
    const std::size_t t = static_cast<std::size_t>(row) * static_cast<std::size_t>(grid_w) +
                          static_cast<std::size_t>(col);
    for (int d = 0; d < dim; ++d) out[static_cast<std::size_t>(d)] = values[static_cast<std::size_t>(d) * tokens() + t];
  }

  friend bool operator==(const FeatureMap&, const FeatureMap&) = default;

 private:
  std::size_t offset(int d, int row, int col) const {
    return (static_cast<std::size_t>(d) * static_cast<std::size_t>(grid_h) +
            static_cast<std::size_t>(row)) * static_cast<std::size_t>(grid_w) +
           static_cast<std::size_t>(col);
  }
};

}  // namespace protood
