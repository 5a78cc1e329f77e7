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

#include "protood/synthetic_scene.hpp"

#include <array>
#include <fstream>
#include <string>
#include <vector>

#include "protood/error.hpp"
#include "protood/feature_map.hpp"
#include "protood/manifest.hpp"
#include "protood/png_io.hpp"
#include "protood/raster.hpp"
#include "protood/tensor_io.hpp"

namespace protood {

namespace fs = std::filesystem;

namespace {

constexpr int kRoad = 0;
constexpr int kVegetation = 1;
constexpr int kSky = 2;
constexpr int kUnknown = 3;

constexpr std::array<std::array<std::uint8_t, 3>, 4> kColors = {{
    {128, 64, 128},  // road
    {107, 142, 35},  // vegetation
    {70, 130, 180},  // sky
    {255, 200, 0},   // unknown object
}};

struct TokenRect {
  int row0, col0, rows, cols;
  bool contains(int r, int c) const { return r >= row0 && r < row0 + rows && c >= col0 && c < col0 + cols; }
};

class SceneWriter {
 public:
  SceneWriter(fs::path dir, const SyntheticSceneOptions& o) : dir_(std::move(dir)), o_(o) {}

  // Token-level class layout: sky on top, vegetation, then road.
  std::vector<int> base_layout() const {
    std::vector<int> cls(static_cast<std::size_t>(o_.grid_h) * o_.grid_w);
    for (int r = 0; r < o_.grid_h; ++r) {
      const int k = r < o_.grid_h / 4 ? kSky : (r < o_.grid_h / 2 ? kVegetation : kRoad);
      for (int c = 0; c < o_.grid_w; ++c) cls[static_cast<std::size_t>(r) * o_.grid_w + c] = k;
    }
    return cls;
  }

  BinaryMask rect_mask(const TokenRect& rect) const {
    BinaryMask m(o_.grid_w * o_.patch_size, o_.grid_h * o_.patch_size);
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) m.at(y, x) = rect.contains(y / o_.patch_size, x / o_.patch_size) ? 1 : 0;
    }
    return m;
  }

  BinaryMask class_mask(const std::vector<int>& layout, int k) const {
    BinaryMask m(o_.grid_w * o_.patch_size, o_.grid_h * o_.patch_size);
    for (int y = 0; y < m.height(); ++y) {
      for (int x = 0; x < m.width(); ++x) {
        m.at(y, x) = layout[static_cast<std::size_t>(y / o_.patch_size) * o_.grid_w + x / o_.patch_size] == k;
      }
    }
    return m;
  }

  // Writes image + features for a token layout, filling the record paths.
  void write_raster(const std::string& id, const std::vector<int>& layout, ImageRecord& rec) const {
    RgbImage image(o_.grid_w * o_.patch_size, o_.grid_h * o_.patch_size);
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        const auto& color = kColors[static_cast<std::size_t>(
            layout[static_cast<std::size_t>(y / o_.patch_size) * o_.grid_w + x / o_.patch_size])];
        std::copy(color.begin(), color.end(), image.pixel(y, x));
      }
    }
    rec.image_path = dir_ / "images" / (id + ".png");
    write_rgb(image, rec.image_path);

    FeatureMap features(o_.dim, o_.grid_h, o_.grid_w, o_.patch_size);
    features.image_id = id;
    features.extractor_id = "synthetic-orthogonal";
    for (int r = 0; r < o_.grid_h; ++r) {
      for (int c = 0; c < o_.grid_w; ++c) features.at(layout[static_cast<std::size_t>(r) * o_.grid_w + c], r, c) = 1.0f;
    }
    rec.features_path = dir_ / "features" / (id + ".pft");
    write_feature_map(features, *rec.features_path);
  }

  fs::path mask_file(const std::string& name, const BinaryMask& m) const {
    const auto p = dir_ / "masks" / (name + ".png");
    write_mask(m, p);
    return p;
  }

 private:
  fs::path dir_;
  SyntheticSceneOptions o_;
};

}  // namespace

fs::path write_synthetic_scene(const fs::path& dir, const SyntheticSceneOptions& o) {
  if (o.dim < 4) throw Error(ErrorCode::kConfigError, "synthetic scene needs dim >= 4");
  if (o.grid_h < 8 || o.grid_w < 12) throw Error(ErrorCode::kConfigError, "synthetic scene needs a grid of at least 8x12");
  for (const char* sub : {"images", "features", "masks"}) fs::create_directories(dir / sub);

  SceneWriter w(dir, o);
  DatasetManifest m;
  m.class_list = {"road", "vegetation", "sky"};

  for (int b = 0; b < o.bank_images; ++b) {
    ImageRecord rec;
    rec.id = "bank_" + std::to_string(b);
    const auto layout = w.base_layout();
    w.write_raster(rec.id, layout, rec);
    for (int k : {kRoad, kVegetation, kSky}) {
      const auto name = rec.id + "_" + m.class_list[static_cast<std::size_t>(k)];
      rec.instance_masks.push_back({m.class_list[static_cast<std::size_t>(k)], w.mask_file(name, w.class_mask(layout, k))});
    }
    m.images.push_back(std::move(rec));
  }

  const int road_top = o.grid_h / 2;
  for (int e = 0; e < o.eval_images; ++e) {
    ImageRecord rec;
    rec.id = "scene_" + std::to_string(e);
    auto layout = w.base_layout();
    const TokenRect object{road_top + 1, 1 + (3 * e) % (o.grid_w - 4), 2, 3};
    for (int r = 0; r < o.grid_h; ++r) {
      for (int c = 0; c < o.grid_w; ++c) {
        if (object.contains(r, c)) layout[static_cast<std::size_t>(r) * o.grid_w + c] = kUnknown;
      }
    }
    w.write_raster(rec.id, layout, rec);
    rec.ood_gt_path = w.mask_file(rec.id + "_ood_gt", w.rect_mask(object));

    // Proposals: the unknown object; a larger box around it (mostly road, so
    // it votes in-distribution); a vegetation blob; and a low-confidence blob
    // that the default detector threshold drops.
    const TokenRect context{object.row0 - 1, object.col0 > 0 ? object.col0 - 1 : 0, 4, 5};
    const TokenRect vegetation{o.grid_h / 4, o.grid_w - 4, 2, 3};
    const TokenRect faint{o.grid_h - 1, o.grid_w - 2, 1, 2};
    rec.proposals = std::vector<ProposalRef>{
        {w.mask_file(rec.id + "_prop_object", w.rect_mask(object)), 0.9},
        {w.mask_file(rec.id + "_prop_context", w.rect_mask(context)), 0.5},
        {w.mask_file(rec.id + "_prop_vegetation", w.rect_mask(vegetation)), 0.6},
        {w.mask_file(rec.id + "_prop_faint", w.rect_mask(faint)), 0.1},
    };
    m.images.push_back(std::move(rec));
  }

  const auto manifest_path = dir / "manifest.json";
  std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
  out << manifest_to_json(m, dir);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot write " + manifest_path.string());
  return manifest_path;
}

}  // namespace protood
