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

#include "protood/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "protood/error.hpp"

namespace protood {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& base_dir, const std::string& rel, bool check, const std::string& where) {
  if (rel.empty()) throw Error(ErrorCode::kManifestInvalid, where + ": empty path");
  fs::path p(rel);
  if (p.is_relative()) p = base_dir / p;
  p = p.lexically_normal();
  if (check && !fs::exists(p)) throw Error(ErrorCode::kMissingPath, where + ": " + p.string());
  return p;
}

std::string required_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_string()) {
    throw Error(ErrorCode::kManifestInvalid, where + ": missing string field '" + key + "'");
  }
  return obj[key].get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  if (!obj[key].is_string()) {
    throw Error(ErrorCode::kManifestInvalid, where + ": field '" + key + "' must be a string");
  }
  return obj[key].get<std::string>();
}

const json& required_array(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj[key].is_array()) {
    throw Error(ErrorCode::kManifestInvalid, where + ": missing array field '" + key + "'");
  }
  return obj[key];
}

}  // namespace

int DatasetManifest::class_index(const std::string& name) const {
  const auto it = std::find(class_list.begin(), class_list.end(), name);
  return it == class_list.end() ? -1 : static_cast<int>(it - class_list.begin());
}

const ImageRecord* DatasetManifest::find_image(const std::string& id) const {
  for (const auto& r : images) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

DatasetManifest parse_manifest(const std::string& json_text, const fs::path& base_dir, bool check_paths) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kManifestInvalid, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error(ErrorCode::kManifestInvalid, "manifest root must be an object");

  DatasetManifest m;
  std::set<std::string> seen_classes;
  for (const auto& c : required_array(root, "class_list", "manifest")) {
    if (!c.is_string()) throw Error(ErrorCode::kManifestInvalid, "class_list entries must be strings");
    auto name = c.get<std::string>();
    if (!seen_classes.insert(name).second) {
      throw Error(ErrorCode::kManifestInvalid, "duplicate class name '" + name + "'");
    }
    m.class_list.push_back(std::move(name));
  }

  std::set<std::string> seen_ids;
  for (const auto& rec : required_array(root, "images", "manifest")) {
    if (!rec.is_object()) throw Error(ErrorCode::kManifestInvalid, "image records must be objects");
    ImageRecord r;
    r.id = required_string(rec, "id", "image record");
    const std::string where = "image '" + r.id + "'";
    if (r.id.empty() || r.id.find('/') != std::string::npos || r.id == "." || r.id == "..") {
      throw Error(ErrorCode::kManifestInvalid, where + ": id must be a non-empty single path component");
    }
    if (!seen_ids.insert(r.id).second) throw Error(ErrorCode::kManifestInvalid, "duplicate image id '" + r.id + "'");

    r.image_path = resolve(base_dir, required_string(rec, "image_path", where), check_paths, where);
    if (auto p = optional_string(rec, "features_path", where)) r.features_path = resolve(base_dir, *p, check_paths, where);
    if (auto p = optional_string(rec, "ood_gt_path", where)) r.ood_gt_path = resolve(base_dir, *p, check_paths, where);
    if (auto p = optional_string(rec, "ignore_path", where)) r.ignore_path = resolve(base_dir, *p, check_paths, where);

    if (rec.contains("instance_masks")) {
      for (const auto& inst : required_array(rec, "instance_masks", where)) {
        InstanceMaskRef ref;
        ref.class_name = required_string(inst, "class", where);
        if (!seen_classes.contains(ref.class_name)) {
          throw Error(ErrorCode::kUnknownClassName,
                      where + ": instance class '" + ref.class_name + "' is not in class_list");
        }
        ref.mask_path = resolve(base_dir, required_string(inst, "mask_path", where), check_paths, where);
        r.instance_masks.push_back(std::move(ref));
      }
    }
    if (rec.contains("proposals")) {
      std::vector<ProposalRef> proposals;
      for (const auto& prop : required_array(rec, "proposals", where)) {
        ProposalRef ref;
        ref.mask_path = resolve(base_dir, required_string(prop, "mask_path", where), check_paths, where);
        if (!prop.contains("score") || !prop["score"].is_number()) {
          throw Error(ErrorCode::kManifestInvalid, where + ": proposal score must be a number");
        }
        ref.score = prop["score"].get<double>();
        if (!(ref.score >= 0.0 && ref.score <= 1.0)) {
          throw Error(ErrorCode::kManifestInvalid, where + ": proposal score must lie in [0, 1]");
        }
        proposals.push_back(std::move(ref));
      }
      r.proposals = std::move(proposals);
    }
    m.images.push_back(std::move(r));
  }
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingPath, "cannot open manifest " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  auto m = parse_manifest(buffer.str(), path.parent_path());
  m.source = path;
  return m;
}

std::string manifest_to_json(const DatasetManifest& manifest, const fs::path& base_dir) {
  auto rel = [&](const fs::path& p) { return p.lexically_relative(base_dir).generic_string(); };
  json root;
  root["class_list"] = manifest.class_list;
  root["images"] = json::array();
  for (const auto& r : manifest.images) {
    json rec;
    rec["id"] = r.id;
    rec["image_path"] = rel(r.image_path);
    if (r.features_path) rec["features_path"] = rel(*r.features_path);
    if (r.ood_gt_path) rec["ood_gt_path"] = rel(*r.ood_gt_path);
    if (r.ignore_path) rec["ignore_path"] = rel(*r.ignore_path);
    rec["instance_masks"] = json::array();
    for (const auto& inst : r.instance_masks) {
      rec["instance_masks"].push_back({{"class", inst.class_name}, {"mask_path", rel(inst.mask_path)}});
    }
    if (r.proposals) {
      rec["proposals"] = json::array();
      for (const auto& p : *r.proposals) {
        rec["proposals"].push_back({{"mask_path", rel(p.mask_path)}, {"score", p.score}});
      }
    }
    root["images"].push_back(std::move(rec));
  }
  return root.dump(2) + "\n";
}

}  // namespace protood
