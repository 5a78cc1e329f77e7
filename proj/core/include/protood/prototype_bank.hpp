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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "protood/extractor.hpp"
#include "protood/feature_map.hpp"
#include "protood/manifest.hpp"
#include "protood/raster.hpp"

namespace protood {

inline constexpr int kDefaultPrototypesPerClass = 20;

// Token-resolution view of an instance mask.
struct TokenMask {
  int grid_h = 0;
  int grid_w = 0;
  std::vector<std::uint8_t> cells;

  std::size_t count() const;
  bool at(int row, int col) const { return cells[static_cast<std::size_t>(row) * grid_w + col] != 0; }
};

// A token is selected when at least half of its patch is covered. If that
// selects nothing although the mask has pixels inside the token-covered
// region, the single token with the most covered pixels is selected instead
// (row-major first on ties), so tiny objects still yield a prototype.
TokenMask downsample_mask(const BinaryMask& mask, int grid_h, int grid_w, int patch_size);

// L2-normalized mean of the selected token embeddings.
std::vector<float> masked_mean_embedding(const FeatureMap& features, const TokenMask& mask);

struct PrototypeSource {
  std::string image_id;
  int instance_index = 0;  // position in the image's instance_masks list

  friend bool operator==(const PrototypeSource&, const PrototypeSource&) = default;
};

struct PrototypeClass {
  std::string name;
  std::vector<float> vectors;  // count x dim, row-major
  std::vector<PrototypeSource> provenance;

  std::size_t count() const { return provenance.size(); }

  friend bool operator==(const PrototypeClass&, const PrototypeClass&) = default;
};

// Per-class lists of unit-norm prototype vectors. Immutable once built.
class PrototypeBank {
 public:
  PrototypeBank() = default;
  // Validates the invariants: K >= 1, every class non-empty, all vectors of
  // length `dim` with unit norm (within 1e-6).
  PrototypeBank(int dim, std::vector<PrototypeClass> classes);

  int dim() const noexcept { return dim_; }
  int num_classes() const noexcept { return static_cast<int>(classes_.size()); }
  const std::vector<PrototypeClass>& classes() const noexcept { return classes_; }
  const PrototypeClass& cls(int k) const { return classes_[static_cast<std::size_t>(k)]; }
  std::span<const float> vector(int k, std::size_t i) const {
    return std::span<const float>(classes_[static_cast<std::size_t>(k)].vectors)
        .subspan(i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_));
  }
  std::size_t total_vectors() const;

  friend bool operator==(const PrototypeBank&, const PrototypeBank&) = default;

 private:
  int dim_ = 0;
  std::vector<PrototypeClass> classes_;
};

// Walks the manifest in order and keeps the first `per_class_limit` usable
// instances of each class. Instances whose mask is empty are skipped; a class
// left without any instance is an error.
PrototypeBank build_bank(const DatasetManifest& manifest, const FeatureExtractor& extractor,
                         int per_class_limit = kDefaultPrototypesPerClass);

// PBK1 container:
//   "PBK1" | u64 LE header length | JSON {classes:[{count,name}], dim, provenance} |
//   vectors as LE f32 in class order.
std::vector<std::uint8_t> encode_bank(const PrototypeBank& bank);
PrototypeBank decode_bank(std::span<const std::uint8_t> bytes);
void save_bank(const PrototypeBank& bank, const std::filesystem::path& path);
PrototypeBank load_bank(const std::filesystem::path& path);

}  // namespace protood
