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
#include <span>
#include <vector>

namespace protood {

// Row-major 2-D grid of pixels or tokens.
template <typename T>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& at(int row, int col) { return data_[index(row, col)]; }
  const T& at(int row, int col) const { return data_[index(row, col)]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  template <typename U>
  bool same_shape(const Raster<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

// Pixels hold 0 or 1.
using BinaryMask = Raster<std::uint8_t>;
// Class index per pixel.
using LabelMap = Raster<std::int32_t>;
using ScoreMap = Raster<float>;

inline std::size_t count_true(const BinaryMask& mask) {
  std::size_t n = 0;
  for (auto v : mask.pixels()) n += v != 0;
  return n;
}

// 8-bit RGB raster, interleaved.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  RgbImage() = default;
  RgbImage(int w, int h)
      : width(w), height(h),
        rgb(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) * 3, 0) {}

  std::uint8_t* pixel(int row, int col) {
    return rgb.data() + (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                         static_cast<std::size_t>(col)) * 3;
  }
  const std::uint8_t* pixel(int row, int col) const {
    return rgb.data() + (static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
                         static_cast<std::size_t>(col)) * 3;
  }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

}  // namespace protood
