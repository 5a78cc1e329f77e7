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
#include <optional>
#include <string>
#include <vector>

namespace protood {

struct InstanceMaskRef {
  std::string class_name;
  std::filesystem::path mask_path;
};

struct ProposalRef {
  std::filesystem::path mask_path;
  double score = 0.0;
};

struct ImageRecord {
  std::string id;
  std::filesystem::path image_path;
  std::optional<std::filesystem::path> features_path;
  std::vector<InstanceMaskRef> instance_masks;
  std::optional<std::filesystem::path> ood_gt_path;
  // Pixels excluded from evaluation (nonzero = ignored).
  std::optional<std::filesystem::path> ignore_path;
  // Absent when the record carries no "proposals" key; an empty list is a
  // valid "segmenter found nothing" answer.
  std::optional<std::vector<ProposalRef>> proposals;
};

// Dataset description. All paths are resolved against the manifest's directory
// at load time.
struct DatasetManifest {
  std::filesystem::path source;
  std::vector<std::string> class_list;
  std::vector<ImageRecord> images;

  // -1 when the name is not a known class.
  int class_index(const std::string& name) const;
  const ImageRecord* find_image(const std::string& id) const;
};

// Parses and validates a manifest. JSON layout:
//   {"class_list": [...],
//    "images": [{"id", "image_path", "features_path"?, "ood_gt_path"?, "ignore_path"?,
//                "instance_masks": [{"class", "mask_path"}],
//                "proposals"?: [{"mask_path", "score"}]}]}
DatasetManifest load_manifest(const std::filesystem::path& path);
DatasetManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir,
                               bool check_paths = true);

// Serializes with paths relative to `base_dir` where possible.
std::string manifest_to_json(const DatasetManifest& manifest, const std::filesystem::path& base_dir);

}  // namespace protood
