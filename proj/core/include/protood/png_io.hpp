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
#include <map>
#include <string>

#include "protood/raster.hpp"

namespace protood {

struct PngInfo {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
};

PngInfo read_png_info(const std::filesystem::path& path);

// Any nonzero sample (in any channel) marks the pixel true.
BinaryMask read_mask(const std::filesystem::path& path);
// Writes an 8-bit grayscale PNG with true pixels as 255.
void write_mask(const BinaryMask& mask, const std::filesystem::path& path);

RgbImage read_rgb(const std::filesystem::path& path);
void write_rgb(const RgbImage& image, const std::filesystem::path& path);

inline constexpr std::uint16_t kIgnoreLabelId = 255;

// Per-pixel class ids loaded from an 8- or 16-bit grayscale PNG.
struct LabelMapFile {
  Raster<std::uint16_t> ids;
  std::map<int, std::string> legend;
};

// Fails with UnknownLabelId if a pixel id is neither in the legend nor the ignore id.
LabelMapFile read_label_map(const std::filesystem::path& path, std::map<int, std::string> legend);

// Binary mask of the pixels carrying `id`.
BinaryMask label_mask(const LabelMapFile& labels, int id);

// Writes ids as 8-bit grayscale when every value fits, otherwise 16-bit.
void write_label_png(const Raster<std::uint16_t>& ids, const std::filesystem::path& path);

}  // namespace protood
