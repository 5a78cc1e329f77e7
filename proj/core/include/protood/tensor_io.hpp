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

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "protood/feature_map.hpp"

namespace protood {

// PFT1 feature tensor files.
//
//   "PFT1" | u64 LE header length | JSON header | D*h*w little-endian f32
//
// The header is {dtype:"f32", extractor_id, image_id, patch_size, shape:[D,h,w]}
// with keys emitted in sorted order, so identical maps serialize to identical bytes.

std::vector<std::uint8_t> encode_feature_map(const FeatureMap& map);
FeatureMap decode_feature_map(std::span<const std::uint8_t> bytes);

FeatureMap read_feature_map(const std::filesystem::path& path);
void write_feature_map(const FeatureMap& map, const std::filesystem::path& path);

}  // namespace protood
