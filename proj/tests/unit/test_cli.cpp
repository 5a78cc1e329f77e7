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

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <json.hpp>

#include "../support/helpers.hpp"
#include "protood/synthetic_scene.hpp"

namespace protood {
namespace {

namespace fs = std::filesystem;

int run(const std::string& args) {
  const std::string cmd = std::string("'") + PROTOOD_CLI_PATH + "' " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    manifest_ = write_synthetic_scene(dir_.path() / "data").string();
    bank_ = (dir_.path() / "bank.pbk").string();
    out_ = (dir_.path() / "out").string();
  }
  std::string paths() const { return "--manifest '" + manifest_ + "' --bank '" + bank_ + "' --out '" + out_ + "'"; }

  testing::TempDir dir_;
  std::string manifest_, bank_, out_;
};

TEST_F(CliTest, FullWorkflowExitCodes) {
  ASSERT_EQ(run("bank build " + paths()), 0);
  EXPECT_EQ(run("bank inspect --bank '" + bank_ + "'"), 0);
  EXPECT_EQ(run("infer " + paths() + " --mode masked --jobs 2"), 0);
  EXPECT_EQ(run("eval " + paths() + " --mode masked"), 0);
  EXPECT_EQ(run("render " + paths() + " --mode masked --image scene_1"), 0);
  EXPECT_TRUE(fs::exists(fs::path(out_) / "scene_1" / "overlay.png"));
  EXPECT_EQ(run("sweep " + paths() + " --axis incs --grid 0.5,0.55,0.6"), 0);
  EXPECT_TRUE(fs::exists(fs::path(out_) / "sweep_incs.csv"));
}

TEST_F(CliTest, ConfigurationErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("infer --jobs"), 2);
  EXPECT_EQ(run("eval " + paths() + " --threshold 1.5"), 2);
  EXPECT_EQ(run("eval " + paths() + " --mode both"), 2);
  EXPECT_EQ(run("infer " + paths() + " --backend nope"), 2);
  EXPECT_EQ(run("sweep " + paths() + " --axis depth --grid 1"), 2);
  EXPECT_EQ(run("infer " + paths() + " --config /nonexistent.json"), 2);
  EXPECT_EQ(run("--help"), 0);
}

TEST_F(CliTest, PerImageFailuresExitOne) {
  ASSERT_EQ(run("bank build " + paths()), 0);
  testing::write_text(dir_.path() / "data" / "features" / "scene_0.pft", "garbage");
  EXPECT_EQ(run("infer " + paths()), 1);
  EXPECT_TRUE(fs::exists(fs::path(out_) / "scene_1" / "ood.png"));
  EXPECT_EQ(run("eval " + paths()), 1);
}

TEST_F(CliTest, FlagsOverrideConfigFile) {
  ASSERT_EQ(run("bank build " + paths()), 0);
  const auto config = dir_.path() / "run.json";
  testing::write_text(config, R"({"mode":"masked","incs_threshold":0.6,"detector_threshold":0.3})");
  ASSERT_EQ(run("infer " + paths() + " --config '" + config.string() + "' --threshold 0.5"), 0);
  ASSERT_EQ(run("eval " + paths() + " --config '" + config.string() + "' --threshold 0.5"), 0);
  const auto bytes = testing::read_bytes(fs::path(out_) / "report.json");
  const auto j = nlohmann::json::parse(bytes);
  EXPECT_EQ(j["config"]["mode"], "masked");
  EXPECT_EQ(j["config"]["incs_threshold"], 0.5);
  EXPECT_EQ(j["config"]["detector_threshold"], 0.3);
}

TEST(BundledFixture, MatchesGenerator) {
  testing::TempDir dir;
  write_synthetic_scene(dir.path());
  const fs::path bundled = PROTOOD_FIXTURE_DIR;
  std::size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir.path())) {
    if (!e.is_regular_file()) continue;
    const auto rel = fs::relative(e.path(), dir.path());
    ASSERT_TRUE(fs::exists(bundled / rel)) << rel;
    EXPECT_EQ(testing::read_bytes(e.path()), testing::read_bytes(bundled / rel)) << rel;
    ++files;
  }
  EXPECT_GT(files, 20u);
}

}  // namespace
}  // namespace protood
