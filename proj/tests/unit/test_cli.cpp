/*
 * Copyright 2026 The knotpf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "knotpf/app.hpp"
#include "knotpf/config.hpp"
#include "knotpf/manifest.hpp"

namespace knotpf::cli {
namespace {

namespace fs = std::filesystem;

// Fresh scratch directory per test, removed afterwards.
class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("knotpf_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(root_ / name) << text;
    return root_ / name;
  }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path root_;
  std::ostringstream out_;
  std::ostringstream err_;
};

constexpr const char* kSmallBinary = R"({
  "schema_version": 1, "kind": "binary-sweep", "seed": 5,
  "epsilon": [0.25, 0.5], "delta_grid": [0.2, 0.7],
  "particles": 50, "replications": 20
})";

TEST(Config, FieldPathsInErrors) {
  const auto error_of = [](const std::string& text, ExperimentKind kind) {
    try {
      parse_config(text, kind, ".");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const auto kind = ExperimentKind::binary_sweep;
  EXPECT_EQ(error_of(R"({"kind": "binary-sweep", "seed": 1})", kind).rfind("schema_version", 0), 0u);
  EXPECT_NE(error_of(R"({"schema_version": 2, "kind": "binary-sweep", "seed": 1})", kind).find("must be 1"),
            std::string::npos);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "kind": "binary-sweep", "epsilon": 0.2})", kind).rfind("seed", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "kind": "verify", "seed": 1})", kind).rfind("kind", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "kind": "binary-sweep", "seed": 1, "epsilon": 1.5,
                        "delta_grid": [0.5]})", kind).rfind("epsilon", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "kind": "binary-sweep", "seed": 1, "epsilon": 0.25,
                        "delta_grid": {"start": 0.1, "stop": 0.9}})", kind).rfind("delta_grid.count", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "kind": "binary-sweep", "seed": 1, "epsilon": 0.25,
                        "delta_grid": [0.5, "x"]})", kind).rfind("delta_grid[1]", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "kind": "binary-sweep", "seed": 1, "epsilon": 0.25,
                        "delta_grid": [0.5], "filters": ["smoother"]})", kind).rfind("filters", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "kind": "student-nc", "seed": 1, "dimensions": [1]})",
                     ExperimentKind::student_nc).rfind("data_seeds", 0), 0u);
  EXPECT_EQ(error_of(R"({"schema_version": 1, "kind": "student-nc", "seed": 1, "dimensions": [1],
                        "data_seeds": {"2": 4}})", ExperimentKind::student_nc).rfind("data_seeds.1", 0), 0u);
  EXPECT_NE(error_of("[1, 2", kind).find("not valid JSON"), std::string::npos);
}

TEST(Config, DeltaGridExpandsEndpointsInclusive) {
  const ExperimentConfig c = parse_config(R"({"schema_version": 1, "kind": "binary-sweep", "seed": 1,
      "epsilon": 0.25, "delta_grid": {"start": 0.1, "stop": 0.9, "count": 9}})",
                                          ExperimentKind::binary_sweep, ".");
  const auto& p = std::get<BinarySweepParams>(c.params);
  ASSERT_EQ(p.deltas.size(), 9u);
  EXPECT_DOUBLE_EQ(p.deltas.front(), 0.1);
  EXPECT_DOUBLE_EQ(p.deltas.back(), 0.9);
  EXPECT_EQ(p.filters.size(), 3u);
  EXPECT_EQ(p.phi, (std::vector<double>{0.0, 1.0}));
}

TEST_F(CliTest, UsageAndVersion) {
  EXPECT_EQ(run({}), kExitConfigError);
  EXPECT_EQ(run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("binary-nc-sweep"), std::string::npos);
  EXPECT_EQ(run({"--version"}), kExitOk);
  EXPECT_EQ(run({"unknown-command", "--config", "x.json"}), kExitConfigError);
  EXPECT_EQ(run({"verify"}), kExitConfigError);
  EXPECT_EQ(run({"verify", "--config", (root_ / "missing.json").string()}), kExitConfigError);
  EXPECT_EQ(run({"verify", "--config", "x", "--jobs", "many"}), kExitConfigError);
}

TEST_F(CliTest, ConfigErrorExitCodeNamesField) {
  const auto cfg = write("bad.json", R"({"schema_version": 1, "kind": "binary-sweep", "seed": 1,
      "epsilon": 0.25, "delta_grid": [0.0]})");
  EXPECT_EQ(run({"binary-sweep", "--config", cfg.string()}), kExitConfigError);
  EXPECT_NE(err_.str().find("delta_grid"), std::string::npos);
}

TEST_F(CliTest, BinarySweepIsDeterministicAndConfined) {
  const auto cfg = write("binary.json", kSmallBinary);
  const fs::path a = root_ / "out" / "a";
  const fs::path b = root_ / "out" / "b";
  ASSERT_EQ(run({"binary-sweep", "--config", cfg.string(), "--out", a.string(), "--jobs", "1"}), kExitOk) << err_.str();
  ASSERT_EQ(run({"binary-sweep", "--config", cfg.string(), "--out", b.string(), "--jobs", "3"}), kExitOk) << err_.str();
  for (const char* file : {"variance.csv", "excess.csv"}) {
    EXPECT_EQ(slurp(a / file), slurp(b / file)) << file;
  }
  const std::string csv = slurp(a / "variance.csv");
  EXPECT_EQ(csv.rfind("epsilon,delta,filter,analytic,empirical,se\n", 0), 0u);
  // 2 x 2 grid points, three filters each, plus the header.
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 13);

  // Nothing is written next to the config.
  std::vector<fs::path> top;
  for (const auto& e : fs::directory_iterator(root_)) top.push_back(e.path().filename());
  std::sort(top.begin(), top.end());
  EXPECT_EQ(top, (std::vector<fs::path>{"binary.json", "out"}));

  const auto manifest = nlohmann::json::parse(slurp(a / "manifest.json"));
  EXPECT_EQ(manifest["kind"], "binary-sweep");
  ASSERT_EQ(manifest["files"].size(), 2u);
  for (const auto& f : manifest["files"]) {
    const FileChecksum sum = checksum_file(a, f["path"].get<std::string>());
    EXPECT_EQ(f["bytes"].get<std::uintmax_t>(), sum.bytes);
    char hex[9];
    std::snprintf(hex, sizeof hex, "%08x", sum.crc32);
    EXPECT_EQ(f["crc32"].get<std::string>(), hex);
  }
  const auto manifest_b = nlohmann::json::parse(slurp(b / "manifest.json"));
  EXPECT_NE(manifest["config_crc32"], manifest_b["config_crc32"]);  // output_dir differs
  EXPECT_EQ(manifest["files"], manifest_b["files"]);
}

TEST_F(CliTest, SeedOverrideChangesEmpiricalColumns) {
  const auto cfg = write("binary.json", kSmallBinary);
  ASSERT_EQ(run({"binary-sweep", "--config", cfg.string(), "--out", (root_ / "a").string()}), kExitOk);
  ASSERT_EQ(run({"binary-sweep", "--config", cfg.string(), "--out", (root_ / "b").string(), "--seed", "6"}), kExitOk);
  EXPECT_NE(slurp(root_ / "a" / "variance.csv"), slurp(root_ / "b" / "variance.csv"));
}

TEST_F(CliTest, NormalizingConstantSweepColumns) {
  const auto cfg = write("nc.json", R"({"schema_version": 1, "kind": "binary-nc-sweep", "seed": 2,
      "epsilon": 0.25, "delta_grid": [0.3], "empirical": false})");
  ASSERT_EQ(run({"binary-nc-sweep", "--config", cfg.string(), "--out", (root_ / "o").string()}), kExitOk);
  const std::string csv = slurp(root_ / "o" / "nc_variance.csv");
  EXPECT_NE(csv.find("adapted-terminal-knotset"), std::string::npos);
  EXPECT_NE(csv.find(",nan,nan\n"), std::string::npos);
}

TEST_F(CliTest, StudentRunFromDatasets) {
  const auto sim = write("sim.json", R"({"schema_version": 1, "kind": "simulate-student", "seed": 0,
      "dimensions": [1, 2], "horizon": 4, "data_seeds": {"1": 11, "2": 12}})");
  ASSERT_EQ(run({"simulate-student", "--config", sim.string(), "--out", (root_ / "data").string()}), kExitOk);
  EXPECT_TRUE(fs::exists(root_ / "data" / "d2.csv"));

  const auto cfg = write("nc.json", R"({"schema_version": 1, "kind": "student-nc", "seed": 3,
      "dimensions": [1, 2], "horizon": 4, "particles": 64, "replications": 10, "data_dir": "data"})");
  ASSERT_EQ(run({"student-nc", "--config", cfg.string(), "--out", (root_ / "a").string()}), kExitOk) << err_.str();
  ASSERT_EQ(run({"student-nc", "--config", cfg.string(), "--out", (root_ / "b").string(), "--jobs", "2"}), kExitOk);
  EXPECT_EQ(slurp(root_ / "a" / "log_nc.csv"), slurp(root_ / "b" / "log_nc.csv"));
  EXPECT_EQ(slurp(root_ / "a" / "summary.csv"), slurp(root_ / "b" / "summary.csv"));
  const std::string raw = slurp(root_ / "a" / "log_nc.csv");
  EXPECT_EQ(std::count(raw.begin(), raw.end(), '\n'), 1 + 2 * 2 * 10);
}

TEST_F(CliTest, MissingDatasetIsAFileError) {
  const auto cfg = write("nc.json", R"({"schema_version": 1, "kind": "student-nc", "seed": 3,
      "dimensions": [3], "particles": 8, "replications": 2, "data_dir": "nowhere"})");
  EXPECT_EQ(run({"student-nc", "--config", cfg.string(), "--out", (root_ / "o").string()}), kExitConfigError);
  EXPECT_NE(err_.str().find("d3.csv"), std::string::npos);
}

TEST_F(CliTest, DatasetOfWrongShapeIsAFileError) {
  write("d1.csv", "p,y_1\n0,0.5\n1,0.25\n");
  const auto cfg = write("nc.json", R"({"schema_version": 1, "kind": "student-nc", "seed": 3,
      "dimensions": [1], "horizon": 4, "particles": 8, "replications": 2, "data_dir": "."})");
  EXPECT_EQ(run({"student-nc", "--config", cfg.string(), "--out", (root_ / "o").string()}), kExitConfigError);
}

TEST_F(CliTest, VerifyReportAndCorruptKnot) {
  const auto cfg = write("verify.json", R"({"schema_version": 1, "kind": "verify", "seed": 42,
      "instances": 3})");
  ASSERT_EQ(run({"verify", "--config", cfg.string(), "--out", (root_ / "ok").string()}), kExitOk);
  const std::string report = slurp(root_ / "ok" / "report.txt");
  EXPECT_EQ(report.rfind("knotpf verify: seed 42, 3 instances per check", 0), 0u);
  EXPECT_FALSE(fs::exists(root_ / "ok" / "failures"));

  ASSERT_EQ(run({"verify", "--config", cfg.string(), "--out", (root_ / "bad").string(), "--corrupt-knot"}),
            kExitVerificationFailed);
  EXPECT_NE(slurp(root_ / "bad" / "report.txt").find("time index"), std::string::npos);
  ASSERT_TRUE(fs::exists(root_ / "bad" / "failures"));
  bool replayable = false;
  for (const auto& e : fs::directory_iterator(root_ / "bad" / "failures")) {
    const auto doc = nlohmann::json::parse(slurp(e.path()));
    EXPECT_EQ(doc["instance"], 0);
    replayable = replayable || doc["case"].contains("model");
  }
  EXPECT_TRUE(replayable);
}

TEST_F(CliTest, CorruptKnotOnlyForVerify) {
  const auto cfg = write("binary.json", kSmallBinary);
  EXPECT_EQ(run({"binary-sweep", "--config", cfg.string(), "--corrupt-knot"}), kExitConfigError);
}

}  // namespace
}  // namespace knotpf::cli
