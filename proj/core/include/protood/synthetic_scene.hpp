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

#include <filesystem>

namespace protood {

// Parameters of the bundled toy dataset: three known classes (road,
// vegetation, sky) and one unknown object, each with its own orthogonal
// feature direction, laid out on token-aligned regions.
struct SyntheticSceneOptions {
  int patch_size = 14;
  int grid_h = 8;
  int grid_w = 12;
  int dim = 8;
  int bank_images = 2;
  int eval_images = 3;
};

// Writes images, PFT1 features, instance masks, OOD ground truth, proposals
// and manifest.json under `dir`. Returns the manifest path. Output bytes
// depend only on the options.
std::filesystem::path write_synthetic_scene(const std::filesystem::path& dir,
                                            const SyntheticSceneOptions& options = {});

}  // namespace protood
