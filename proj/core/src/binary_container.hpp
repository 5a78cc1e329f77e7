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

// Shared framing for the PFT1 and PBK1 files:
//   4-byte ASCII magic | u64 little-endian header length | UTF-8 JSON header | payload

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "protood/error.hpp"

namespace protood::detail {

struct Container {
  std::string header;
  std::span<const std::uint8_t> payload;
};

inline void append_u64_le(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

inline std::uint64_t read_u64_le(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

inline void append_f32_le(std::vector<std::uint8_t>& out, float f) {
  const auto bits = std::bit_cast<std::uint32_t>(f);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

inline float read_f32_le(const std::uint8_t* p) {
  std::uint32_t bits = 0;
  for (int i = 0; i < 4; ++i) bits |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return std::bit_cast<float>(bits);
}

inline std::vector<std::uint8_t> frame(std::string_view magic, std::string_view header,
                                       std::size_t payload_bytes) {
  std::vector<std::uint8_t> out;
  out.reserve(4 + 8 + header.size() + payload_bytes);
  out.insert(out.end(), magic.begin(), magic.end());
  append_u64_le(out, header.size());
  out.insert(out.end(), header.begin(), header.end());
  return out;
}

inline Container unframe(std::span<const std::uint8_t> bytes, std::string_view magic) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), magic.data(), 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "expected magic '" + std::string(magic) + "'");
  }
  if (bytes.size() < 12) throw Error(ErrorCode::kHeaderParse, "file too short for header length");
  const std::uint64_t header_len = read_u64_le(bytes.data() + 4);
  if (header_len > bytes.size() - 12) {
    throw Error(ErrorCode::kHeaderParse, "header length exceeds file size");
  }
  Container c;
  c.header.assign(reinterpret_cast<const char*>(bytes.data() + 12), header_len);
  c.payload = bytes.subspan(12 + header_len);
  return c;
}

// Decodes `count` little-endian floats, rejecting NaN and infinities.
inline std::vector<float> decode_f32_payload(std::span<const std::uint8_t> payload, std::size_t count) {
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const float f = read_f32_le(payload.data() + 4 * i);
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kPayloadInvalid, "non-finite value at element " + std::to_string(i));
    }
    values[i] = f;
  }
  return values;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace protood::detail
