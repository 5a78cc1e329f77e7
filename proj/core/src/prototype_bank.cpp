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

#include "protood/prototype_bank.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <json.hpp>

#include "binary_container.hpp"
#include "protood/error.hpp"
#include "protood/png_io.hpp"

namespace protood {

using nlohmann::json;

std::size_t TokenMask::count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](auto c) { return c != 0; }));
}

TokenMask downsample_mask(const BinaryMask& mask, int grid_h, int grid_w, int patch_size) {
  if (grid_h < 1 || grid_w < 1 || patch_size < 1) {
    throw Error(ErrorCode::kShapeMismatch, "token grid and patch size must be positive");
  }
  if (count_true(mask) == 0) throw Error(ErrorCode::kEmptySourceMask, "instance mask has no true pixels");

  TokenMask out{grid_h, grid_w, std::vector<std::uint8_t>(static_cast<std::size_t>(grid_h) * grid_w, 0)};
  std::vector<std::size_t> counts(out.cells.size(), 0);
  // Pixels beyond the token-covered region (trailing rows/columns) are dropped.
  const int rows = std::min(mask.height(), grid_h * patch_size);
  const int cols = std::min(mask.width(), grid_w * patch_size);
  for (int y = 0; y < rows; ++y) {
    for (int x = 0; x < cols; ++x) {
      if (mask.at(y, x)) ++counts[static_cast<std::size_t>(y / patch_size) * grid_w + x / patch_size];
    }
  }
  const std::size_t patch_area = static_cast<std::size_t>(patch_size) * patch_size;
  std::size_t best = 0;
  std::size_t best_count = 0;
  bool any = false;
  for (std::size_t t = 0; t < counts.size(); ++t) {
    if (2 * counts[t] >= patch_area) {
      out.cells[t] = 1;
      any = true;
    }
    if (counts[t] > best_count) {
      best_count = counts[t];
      best = t;
    }
  }
  if (!any) {
    if (best_count == 0) {
      throw Error(ErrorCode::kEmptySourceMask, "instance mask has no pixels inside the token-covered region");
    }
    out.cells[best] = 1;
  }
  return out;
}

std::vector<float> masked_mean_embedding(const FeatureMap& features, const TokenMask& mask) {
  if (mask.grid_h != features.grid_h || mask.grid_w != features.grid_w) {
    throw Error(ErrorCode::kShapeMismatch, "token mask grid does not match the feature map");
  }
  const std::size_t selected = mask.count();
  if (selected == 0) throw Error(ErrorCode::kEmptyTokenMask, "token mask selects no tokens");

  std::vector<double> sum(static_cast<std::size_t>(features.dim), 0.0);
  const std::size_t tokens = features.tokens();
  for (int d = 0; d < features.dim; ++d) {
    const auto channel = features.channel(d);
    double acc = 0.0;
    for (std::size_t t = 0; t < tokens; ++t) {
      if (mask.cells[t]) acc += channel[t];
    }
    sum[static_cast<std::size_t>(d)] = acc / static_cast<double>(selected);
  }
  double norm = 0.0;
  for (double v : sum) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-12) throw Error(ErrorCode::kZeroVector, "masked mean embedding has zero norm");

  std::vector<float> out(sum.size());
  for (std::size_t i = 0; i < sum.size(); ++i) out[i] = static_cast<float>(sum[i] / norm);
  return out;
}

PrototypeBank::PrototypeBank(int dim, std::vector<PrototypeClass> classes) : dim_(dim), classes_(std::move(classes)) {
  if (dim_ < 1) throw Error(ErrorCode::kDimMismatch, "prototype dimension must be >= 1");
  if (classes_.empty()) throw Error(ErrorCode::kNoInstancesForClass, "prototype bank needs at least one class");
  for (const auto& c : classes_) {
    if (c.count() == 0) throw Error(ErrorCode::kNoInstancesForClass, "class '" + c.name + "' has no prototypes");
    if (c.vectors.size() != c.count() * static_cast<std::size_t>(dim_)) {
      throw Error(ErrorCode::kDimMismatch, "class '" + c.name + "' vectors do not match dim " + std::to_string(dim_));
    }
    for (std::size_t i = 0; i < c.count(); ++i) {
      double norm = 0.0;
      for (int d = 0; d < dim_; ++d) {
        const double v = c.vectors[i * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(d)];
        norm += v * v;
      }
      if (std::abs(std::sqrt(norm) - 1.0) > 1e-6) {
        throw Error(ErrorCode::kPayloadInvalid, "class '" + c.name + "' holds a prototype that is not unit norm");
      }
    }
  }
}

std::size_t PrototypeBank::total_vectors() const {
  std::size_t n = 0;
  for (const auto& c : classes_) n += c.count();
  return n;
}

PrototypeBank build_bank(const DatasetManifest& manifest, const FeatureExtractor& extractor, int per_class_limit) {
  if (per_class_limit < 1) throw Error(ErrorCode::kConfigError, "per-class prototype limit must be >= 1");
  if (manifest.class_list.empty()) throw Error(ErrorCode::kManifestInvalid, "manifest has an empty class_list");

  std::vector<PrototypeClass> classes(manifest.class_list.size());
  for (std::size_t k = 0; k < classes.size(); ++k) classes[k].name = manifest.class_list[k];
  const auto limit = static_cast<std::size_t>(per_class_limit);
  int dim = 0;

  for (const auto& record : manifest.images) {
    const bool wanted = std::any_of(record.instance_masks.begin(), record.instance_masks.end(), [&](const auto& inst) {
      return classes[static_cast<std::size_t>(manifest.class_index(inst.class_name))].count() < limit;
    });
    if (!wanted) continue;

    try {
      const FeatureMap features = extractor.extract(record);
      if (dim == 0) dim = features.dim;
      if (features.dim != dim) {
        throw Error(ErrorCode::kDimMismatch, "feature dim " + std::to_string(features.dim) +
                                                 " differs from earlier images (" + std::to_string(dim) + ")");
      }
      for (std::size_t i = 0; i < record.instance_masks.size(); ++i) {
        const auto& inst = record.instance_masks[i];
        auto& cls = classes[static_cast<std::size_t>(manifest.class_index(inst.class_name))];
        if (cls.count() >= limit) continue;
        const BinaryMask mask = read_mask(inst.mask_path);
        std::optional<TokenMask> tokens;
        try {
          tokens = downsample_mask(mask, features.grid_h, features.grid_w, features.patch_size);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::kEmptySourceMask) throw;
          continue;  // unusable instance
        }
        const auto embedding = masked_mean_embedding(features, *tokens);
        cls.vectors.insert(cls.vectors.end(), embedding.begin(), embedding.end());
        cls.provenance.push_back({record.id, static_cast<int>(i)});
      }
    } catch (const Error& e) {
      rethrow_with_context(e, "image '" + record.id + "'");
    }
  }

  for (const auto& c : classes) {
    if (c.count() == 0) {
      throw Error(ErrorCode::kNoInstancesForClass, "no usable instance masks for class '" + c.name + "'");
    }
  }
  return PrototypeBank(dim, std::move(classes));
}

namespace {
constexpr std::string_view kBankMagic = "PBK1";
}

std::vector<std::uint8_t> encode_bank(const PrototypeBank& bank) {
  json header;
  header["dim"] = bank.dim();
  header["classes"] = json::array();
  header["provenance"] = json::array();
  for (const auto& c : bank.classes()) {
    header["classes"].push_back({{"name", c.name}, {"count", c.count()}});
    json sources = json::array();
    for (const auto& s : c.provenance) sources.push_back({{"image_id", s.image_id}, {"instance", s.instance_index}});
    header["provenance"].push_back(std::move(sources));
  }
  const std::string text = header.dump();
  auto out = detail::frame(kBankMagic, text, 4 * bank.total_vectors() * static_cast<std::size_t>(bank.dim()));
  for (const auto& c : bank.classes()) {
    for (float v : c.vectors) detail::append_f32_le(out, v);
  }
  return out;
}

PrototypeBank decode_bank(std::span<const std::uint8_t> bytes) {
  const auto container = detail::unframe(bytes, kBankMagic);
  int dim = 0;
  std::vector<PrototypeClass> classes;
  try {
    const auto header = json::parse(container.header);
    dim = header.at("dim").get<int>();
    if (dim < 1) throw Error(ErrorCode::kHeaderParse, "dim must be >= 1");
    const auto& class_list = header.at("classes");
    const auto& provenance = header.at("provenance");
    if (!class_list.is_array() || !provenance.is_array() || provenance.size() != class_list.size()) {
      throw Error(ErrorCode::kHeaderParse, "classes and provenance must be arrays of equal length");
    }
    for (std::size_t k = 0; k < class_list.size(); ++k) {
      PrototypeClass c;
      c.name = class_list[k].at("name").get<std::string>();
      const auto count = class_list[k].at("count").get<std::size_t>();
      if (provenance[k].size() != count) {
        throw Error(ErrorCode::kHeaderParse, "provenance length differs from count for class '" + c.name + "'");
      }
      for (const auto& s : provenance[k]) {
        c.provenance.push_back({s.at("image_id").get<std::string>(), s.at("instance").get<int>()});
      }
      classes.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kHeaderParse, e.what());
  }

  std::size_t total = 0;
  for (const auto& c : classes) total += c.count();
  const std::size_t capacity = container.payload.size() / 4 / static_cast<std::size_t>(dim);
  if (total > capacity || container.payload.size() != 4 * total * static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::kDimMismatch, "payload of " + std::to_string(container.payload.size()) +
                                             " bytes does not hold " + std::to_string(total) + " vectors of dim " +
                                             std::to_string(dim));
  }
  const auto values = detail::decode_f32_payload(container.payload, total * static_cast<std::size_t>(dim));
  std::size_t offset = 0;
  for (auto& c : classes) {
    const std::size_t n = c.count() * static_cast<std::size_t>(dim);
    c.vectors.assign(values.begin() + static_cast<std::ptrdiff_t>(offset),
                     values.begin() + static_cast<std::ptrdiff_t>(offset + n));
    offset += n;
  }
  return PrototypeBank(dim, std::move(classes));
}

void save_bank(const PrototypeBank& bank, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_bank(bank));
}

PrototypeBank load_bank(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  try {
    return decode_bank(bytes);
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

}  // namespace protood
