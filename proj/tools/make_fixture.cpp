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

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "protood/error.hpp"
#include "protood/synthetic_scene.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Write the synthetic orthogonal-feature dataset"};
  std::string out;
  protood::SyntheticSceneOptions opts;
  app.add_option("--out", out, "Output directory")->required();
  app.add_option("--patch-size", opts.patch_size, "Pixels per token side")->capture_default_str();
  app.add_option("--grid-h", opts.grid_h, "Token rows")->capture_default_str();
  app.add_option("--grid-w", opts.grid_w, "Token columns")->capture_default_str();
  app.add_option("--dim", opts.dim, "Feature dimension (>= 4)")->capture_default_str();
  app.add_option("--bank-images", opts.bank_images)->capture_default_str();
  app.add_option("--eval-images", opts.eval_images)->capture_default_str();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  try {
    std::cout << protood::write_synthetic_scene(out, opts).string() << "\n";
  } catch (const protood::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == protood::ErrorCode::kConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
