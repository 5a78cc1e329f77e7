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

#include "protood/tensor_io.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>

#include <json.hpp>

#include "binary_container.hpp"
#include "protood/error.hpp"

namespace protood {

namespace detail {

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingPath, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoFailure, "read failed: " + path.string());
  return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "write failed: " + path.string());
}

}  // namespace detail

namespace {

constexpr std::string_view kMagic = "PFT1";

void check_shape(const FeatureMap& map) {
  if (map.dim < 1 || map.grid_h < 1 || map.grid_w < 1) {
    throw Error(ErrorCode::kShapeMismatch, "feature map shape entries must be >= 1");
  }
  if (map.values.size() != static_cast<std::size_t>(map.dim) * map.tokens()) {
    throw Error(ErrorCode::kShapeMismatch, "feature map value count does not match shape");
  }
}

}  // namespace

std::vector<std::uint8_t> encode_feature_map(const FeatureMap& map) {
  check_shape(map);
  for (float v : map.values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kPayloadInvalid, "feature map holds a non-finite value");
  }
  nlohmann::json header = {
      {"dtype", "f32"},
      {"shape", {map.dim, map.grid_h, map.grid_w}},
      {"image_id", map.image_id},
      {"extractor_id", map.extractor_id},
      {"patch_size", map.patch_size},
  };
  const std::string text = header.dump();
  auto out = detail::frame(kMagic, text, 4 * map.values.size());
  for (float v : map.values) detail::append_f32_le(out, v);
  return out;
}

FeatureMap decode_feature_map(std::span<const std::uint8_t> bytes) {
  const auto container = detail::unframe(bytes, kMagic);

  FeatureMap map;
  std::uint64_t d = 0, h = 0, w = 0;
  try {
    const auto header = nlohmann::json::parse(container.header);
    if (header.at("dtype").get<std::string>() != "f32") {
      throw Error(ErrorCode::kHeaderParse, "dtype must be \"f32\"");
    }
    const auto& shape = header.at("shape");
    if (!shape.is_array() || shape.size() != 3) {
      throw Error(ErrorCode::kHeaderParse, "shape must have three entries");
    }
    for (const auto& s : shape) {
      if (!s.is_number_integer() || s.get<std::int64_t>() < 1 ||
          s.get<std::int64_t>() > std::numeric_limits<int>::max()) {
        throw Error(ErrorCode::kHeaderParse, "shape entries must be integers >= 1");
      }
    }
    d = shape[0].get<std::uint64_t>();
    h = shape[1].get<std::uint64_t>();
    w = shape[2].get<std::uint64_t>();
    map.image_id = header.at("image_id").get<std::string>();
    map.extractor_id = header.at("extractor_id").get<std::string>();
    map.patch_size = header.at("patch_size").get<int>();
    if (map.patch_size < 1) throw Error(ErrorCode::kHeaderParse, "patch_size must be >= 1");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kHeaderParse, e.what());
  }

  const std::uint64_t max_count = container.payload.size() / 4;
  const bool too_big = d > max_count || h > max_count || w > max_count || d * h > max_count ||
                       w > max_count / (d * h);
  const std::uint64_t count = too_big ? 0 : d * h * w;
  if (too_big || container.payload.size() != 4 * count) {
    throw Error(ErrorCode::kPayloadSizeMismatch,
                "expected " + std::to_string(d) + "x" + std::to_string(h) + "x" + std::to_string(w) +
                    " floats, payload has " + std::to_string(container.payload.size()) + " bytes");
  }
  map.dim = static_cast<int>(d);
  map.grid_h = static_cast<int>(h);
  map.grid_w = static_cast<int>(w);
  map.values = detail::decode_f32_payload(container.payload, count);
  return map;
}

FeatureMap read_feature_map(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  try {
    return decode_feature_map(bytes);
  } catch (const Error& e) {
    rethrow_with_context(e, path.string());
  }
}

void write_feature_map(const FeatureMap& map, const std::filesystem::path& path) {
  detail::write_file_bytes(path, encode_feature_map(map));
}

}  // namespace protood
