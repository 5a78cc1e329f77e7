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

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "protood/error.hpp"
#include "protood/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

// Flag values; only the ones given on the command line override --config.
struct Flags {
  std::string config;
  std::string manifest;
  std::string bank;
  std::string backend;
  std::string mode;
  double threshold = 0.0;
  double proposal_threshold = 0.0;
  std::string norm_scope;
  std::string out;
  int jobs = 1;
  int per_class_limit = 0;
  std::string grid;
  std::string axis;
  std::vector<std::string> images;
  std::string image;
};

struct Options {
  CLI::Option* manifest = nullptr;
  CLI::Option* bank = nullptr;
  CLI::Option* backend = nullptr;
  CLI::Option* mode = nullptr;
  CLI::Option* threshold = nullptr;
  CLI::Option* proposal_threshold = nullptr;
  CLI::Option* norm_scope = nullptr;
  CLI::Option* out = nullptr;
  CLI::Option* jobs = nullptr;
  CLI::Option* per_class_limit = nullptr;
};

void add_common(CLI::App* cmd, Flags& f, std::vector<Options>& all) {
  Options o;
  cmd->add_option("--config", f.config, "JSON run configuration; flags override its values");
  o.manifest = cmd->add_option("--manifest", f.manifest, "Dataset manifest (JSON)");
  o.bank = cmd->add_option("--bank", f.bank, "Prototype bank file (PBK1)");
  o.backend = cmd->add_option("--backend", f.backend, "Feature backend: file | mock:<seed> (default file)");
  o.mode = cmd->add_option("--mode", f.mode, "pixel | masked (default pixel)");
  o.threshold = cmd->add_option("--threshold", f.threshold, "INCS threshold (default 0.55)");
  o.proposal_threshold =
      cmd->add_option("--proposal-threshold", f.proposal_threshold, "Proposal score threshold (default 0.2)");
  o.norm_scope = cmd->add_option("--norm-scope", f.norm_scope, "per-image | per-dataset (default per-image)");
  o.out = cmd->add_option("--out", f.out, "Output directory (default out)");
  o.jobs = cmd->add_option("--jobs", f.jobs, "Worker threads (default 1)");
  o.per_class_limit = cmd->add_option("--per-class-limit", f.per_class_limit, "Prototypes per class (default 20)");
  all.push_back(o);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw protood::Error(protood::ErrorCode::kConfigError, "cannot read config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

protood::RunConfig resolve(const Flags& f, const std::vector<Options>& all) {
  protood::RunConfig cfg;
  if (!f.config.empty()) cfg.merge_json(read_text(f.config));
  auto given = [&](CLI::Option* Options::*member) {
    for (const auto& o : all) {
      if ((o.*member)->count() > 0) return true;
    }
    return false;
  };
  if (given(&Options::manifest)) cfg.manifest = f.manifest;
  if (given(&Options::bank)) cfg.bank = f.bank;
  if (given(&Options::backend)) cfg.backend = f.backend;
  if (given(&Options::mode)) cfg.mode = protood::parse_eval_mode(f.mode);
  if (given(&Options::threshold)) cfg.incs_threshold = f.threshold;
  if (given(&Options::proposal_threshold)) cfg.detector_threshold = f.proposal_threshold;
  if (given(&Options::norm_scope)) cfg.norm_scope = protood::parse_norm_scope(f.norm_scope);
  if (given(&Options::out)) cfg.out = f.out;
  if (given(&Options::jobs)) cfg.jobs = f.jobs;
  if (given(&Options::per_class_limit)) cfg.per_class_limit = f.per_class_limit;
  cfg.validate();
  return cfg;
}

void report_failures(const std::vector<protood::ImageFailure>& failures) {
  for (const auto& fail : failures) std::cerr << "failed: " << fail.image_id << ": " << fail.message << "\n";
}

void report_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

bool is_config_error(protood::ErrorCode code) {
  using protood::ErrorCode;
  return code == ErrorCode::kConfigError || code == ErrorCode::kManifestInvalid ||
         code == ErrorCode::kUnknownClassName || code == ErrorCode::kThresholdOutOfRange;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Prototype-matching OOD segmentation"};
  app.require_subcommand(1);
  Flags f;
  std::vector<Options> all;

  auto* bank_cmd = app.add_subcommand("bank", "Build or inspect a prototype bank");
  bank_cmd->require_subcommand(1);
  auto* bank_build = bank_cmd->add_subcommand("build", "Build a prototype bank from a manifest");
  add_common(bank_build, f, all);
  auto* bank_inspect = bank_cmd->add_subcommand("inspect", "Print bank classes and provenance");
  add_common(bank_inspect, f, all);

  auto* infer = app.add_subcommand("infer", "Write per-image INCS maps and OOD masks");
  add_common(infer, f, all);
  infer->add_option("--images", f.images, "Image ids to process (default all)")->delimiter(',');

  auto* eval = app.add_subcommand("eval", "Evaluate inference outputs against ground truth");
  add_common(eval, f, all);

  auto* sweep = app.add_subcommand("sweep", "Evaluate over a grid of one hyperparameter");
  add_common(sweep, f, all);
  sweep->add_option("--axis", f.axis, "incs | detector | prototypes")->required();
  sweep->add_option("--grid", f.grid, "Comma-separated values")->required();

  auto* render = app.add_subcommand("render", "Overlay the OOD mask on the input image");
  add_common(render, f, all);
  render->add_option("--image", f.image, "Image id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto cfg = resolve(f, all);
    if (bank_build->parsed()) {
      std::cout << protood::cmd_bank_build(cfg).to_text();
      return kExitOk;
    }
    if (bank_inspect->parsed()) {
      std::cout << protood::cmd_bank_inspect(cfg);
      return kExitOk;
    }
    if (infer->parsed()) {
      const auto s = protood::cmd_infer(cfg, f.images);
      report_warnings(s.warnings);
      report_failures(s.failures);
      std::cout << "processed " << s.processed.size() << " image(s), " << s.failures.size() << " failed\n";
      return s.failures.empty() ? kExitOk : kExitFailure;
    }
    if (eval->parsed()) {
      const auto s = protood::cmd_eval(cfg);
      report_warnings(s.report.warnings);
      report_failures(s.failures);
      const auto& r = s.report;
      std::cout << "iou " << r.iou << "  f1 " << r.f1 << "  aupr ";
      if (r.aupr) {
        std::cout << *r.aupr;
      } else {
        std::cout << "n/a";
      }
      std::cout << "  fpr@" << r.tpr_target << " " << r.fpr_at_95.fpr << "\n"
                << "report: " << s.report_path.string() << "\n";
      return s.failures.empty() ? kExitOk : kExitFailure;
    }
    if (sweep->parsed()) {
      const auto s = protood::cmd_sweep(cfg, protood::parse_sweep_axis(f.axis), protood::parse_grid(f.grid));
      report_failures(s.failures);
      std::cout << s.to_csv();
      return s.failures.empty() ? kExitOk : kExitFailure;
    }
    if (render->parsed()) {
      std::cout << protood::cmd_render(cfg, f.image).string() << "\n";
      return kExitOk;
    }
  } catch (const protood::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}
