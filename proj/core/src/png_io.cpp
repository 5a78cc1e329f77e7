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

#include "protood/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <csetjmp>
#include <cstring>
#include <span>
#include <vector>

#include "binary_container.hpp"
#include "protood/error.hpp"

namespace protood {
namespace {

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;   // after palette expansion, before any stripping
  int bit_depth = 0;  // 8 or 16
  std::vector<std::uint16_t> samples;
};

struct ReadCursor {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t length) {
  auto* cursor = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cursor->offset + length > cursor->size) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, cursor->data + cursor->offset, length);
  cursor->offset += length;
}

void write_to_vector(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void flush_noop(png_structp) {}

void capture_error(png_structp png, png_const_charp message) {
  auto* buffer = static_cast<char*>(png_get_error_ptr(png));
  std::strncpy(buffer, message, 255);
  buffer[255] = '\0';
  png_longjmp(png, 1);
}

void ignore_warning(png_structp, png_const_charp) {}

// libpng reports errors through longjmp. Only trivially destructible locals
// live in this frame; the output vectors belong to the caller.
bool decode_png_raw(const std::uint8_t* data, std::size_t size, bool info_only, DecodedPng* out,
                    std::vector<png_bytep>* rows, char* error) {
  if (size < 8 || png_sig_cmp(data, 0, 8) != 0) {
    std::strcpy(error, "not a PNG file");
    return false;
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, error, capture_error, ignore_warning);
  if (png == nullptr) {
    std::strcpy(error, "png_create_read_struct failed");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    std::strcpy(error, "png_create_info_struct failed");
    return false;
  }
  ReadCursor cursor{data, size, 0};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, &cursor, read_from_memory);
  png_read_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  int bit_depth = png_get_bit_depth(png, info);

  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (bit_depth == 16) png_set_swap(png);  // host little-endian samples
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  out->width = static_cast<int>(width);
  out->height = static_cast<int>(height);
  out->channels = png_get_channels(png, info);
  bit_depth = png_get_bit_depth(png, info);
  out->bit_depth = bit_depth;
  if (info_only) {
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
  }

  const std::size_t row_bytes = png_get_rowbytes(png, info);
  // Decode into the samples buffer reinterpreted as bytes, then widen in place below.
  out->samples.assign((row_bytes * height + 1) / 2 + 1, 0);
  auto* base = reinterpret_cast<png_bytep>(out->samples.data());
  rows->resize(height);
  for (png_uint_32 r = 0; r < height; ++r) (*rows)[r] = base + r * row_bytes;
  png_read_image(png, rows->data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

DecodedPng decode_png(std::span<const std::uint8_t> bytes, const std::filesystem::path& path,
                      bool info_only = false) {
  DecodedPng out;
  std::vector<png_bytep> rows;
  char error[256] = {0};
  if (!decode_png_raw(bytes.data(), bytes.size(), info_only, &out, &rows, error)) {
    throw Error(ErrorCode::kDecodeError, path.string() + ": " + error);
  }
  if (info_only) return out;

  const std::size_t count = static_cast<std::size_t>(out.width) * out.height * out.channels;
  std::vector<std::uint16_t> samples(count);
  const auto* raw = reinterpret_cast<const std::uint8_t*>(out.samples.data());
  if (out.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      samples[i] = static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) samples[i] = raw[i];
  }
  out.samples = std::move(samples);
  return out;
}

DecodedPng load_png(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  return decode_png(bytes, path);
}

bool encode_png_raw(int width, int height, int color_type, int bit_depth, const std::uint8_t* data,
                    std::size_t row_bytes, std::vector<std::uint8_t>* out, std::vector<png_bytep>* rows,
                    char* error) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, error, capture_error, ignore_warning);
  if (png == nullptr) {
    std::strcpy(error, "png_create_write_struct failed");
    return false;
  }
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    std::strcpy(error, "png_create_info_struct failed");
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, out, write_to_vector, flush_noop);
  // Fixed settings so identical pixels always give identical bytes.
  png_set_compression_level(png, 6);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, PNG_FILTER_NONE);
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth,
               color_type, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  rows->resize(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) {
    (*rows)[static_cast<std::size_t>(r)] = const_cast<png_bytep>(data + static_cast<std::size_t>(r) * row_bytes);
  }
  png_write_image(png, rows->data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

void save_png(const std::filesystem::path& path, int width, int height, int color_type, int bit_depth,
              std::span<const std::uint8_t> data) {
  if (width < 1 || height < 1) throw Error(ErrorCode::kShapeMismatch, "cannot write an empty PNG");
  const int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  const std::size_t row_bytes = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  std::vector<std::uint8_t> encoded;
  std::vector<png_bytep> rows;
  char error[256] = {0};
  if (!encode_png_raw(width, height, color_type, bit_depth, data.data(), row_bytes, &encoded, &rows, error)) {
    throw Error(ErrorCode::kIoFailure, path.string() + ": " + error);
  }
  detail::write_file_bytes(path, encoded);
}

}  // namespace

PngInfo read_png_info(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path);
  const auto decoded = decode_png(bytes, path, /*info_only=*/true);
  return {decoded.width, decoded.height, decoded.bit_depth, decoded.channels};
}

BinaryMask read_mask(const std::filesystem::path& path) {
  const auto png = load_png(path);
  BinaryMask mask(png.width, png.height);
  auto out = mask.pixels();
  // Alpha is not evidence of foreground; only colour/gray channels vote.
  const int colour_channels = (png.channels == 2 || png.channels == 4) ? png.channels - 1 : png.channels;
  for (std::size_t i = 0; i < out.size(); ++i) {
    bool on = false;
    for (int c = 0; c < colour_channels; ++c) on = on || png.samples[i * png.channels + c] != 0;
    out[i] = on ? 1 : 0;
  }
  return mask;
}

void write_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<std::uint8_t> gray(mask.size());
  auto px = mask.pixels();
  for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = px[i] ? 255 : 0;
  save_png(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, 8, gray);
}

RgbImage read_rgb(const std::filesystem::path& path) {
  const auto png = load_png(path);
  RgbImage image(png.width, png.height);
  const std::size_t n = static_cast<std::size_t>(png.width) * png.height;
  const int shift = png.bit_depth == 16 ? 8 : 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < 3; ++c) {
      const int src = png.channels >= 3 ? c : 0;
      image.rgb[i * 3 + c] = static_cast<std::uint8_t>(png.samples[i * png.channels + src] >> shift);
    }
  }
  return image;
}

void write_rgb(const RgbImage& image, const std::filesystem::path& path) {
  if (image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw Error(ErrorCode::kShapeMismatch, "RGB buffer does not match image size");
  }
  save_png(path, image.width, image.height, PNG_COLOR_TYPE_RGB, 8, image.rgb);
}

LabelMapFile read_label_map(const std::filesystem::path& path, std::map<int, std::string> legend) {
  const auto png = load_png(path);
  if (png.channels != 1) throw Error(ErrorCode::kDecodeError, path.string() + ": label map must be grayscale");
  LabelMapFile out;
  out.ids = Raster<std::uint16_t>(png.width, png.height);
  auto ids = out.ids.pixels();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const std::uint16_t id = png.samples[i];
    if (id != kIgnoreLabelId && !legend.contains(id)) {
      throw Error(ErrorCode::kUnknownLabelId,
                  path.string() + ": pixel id " + std::to_string(id) + " is not in the legend");
    }
    ids[i] = id;
  }
  out.legend = std::move(legend);
  return out;
}

BinaryMask label_mask(const LabelMapFile& labels, int id) {
  BinaryMask mask(labels.ids.width(), labels.ids.height());
  auto src = labels.ids.pixels();
  auto dst = mask.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] == id ? 1 : 0;
  return mask;
}

void write_label_png(const Raster<std::uint16_t>& ids, const std::filesystem::path& path) {
  std::uint16_t max_id = 0;
  for (auto v : ids.pixels()) max_id = std::max(max_id, v);
  if (max_id <= 255) {
    std::vector<std::uint8_t> gray(ids.size());
    auto px = ids.pixels();
    for (std::size_t i = 0; i < gray.size(); ++i) gray[i] = static_cast<std::uint8_t>(px[i]);
    save_png(path, ids.width(), ids.height(), PNG_COLOR_TYPE_GRAY, 8, gray);
    return;
  }
  std::vector<std::uint8_t> wide(ids.size() * 2);
  auto px = ids.pixels();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    wide[2 * i] = static_cast<std::uint8_t>(px[i] & 0xff);
    wide[2 * i + 1] = static_cast<std::uint8_t>(px[i] >> 8);
  }
  save_png(path, ids.width(), ids.height(), PNG_COLOR_TYPE_GRAY, 16, wide);
}

}  // namespace protood
