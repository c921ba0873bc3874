// Copyright 2026 The nmq Authors
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

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "nmq/regression.hpp"
#include "nmq/serialize.hpp"

namespace nmq {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("nmq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  static std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  void write_tls_inputs(const std::string& schedule) {
    write_json(path("params.json"), Json{{"model", "qubit_tls"},
                                         {"delta_omega", 0.003},
                                         {"gamma_ad", 0.0005},
                                         {"gamma_d", 0.002},
                                         {"nu_zx", 0.006},
                                         {"kappa", 0.0}});
    std::ofstream(path("schedule.json")) << schedule;
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST_F(CliTest, SimulateFitRoundTrip) {
  write_tls_inputs(R"({"theta_full": [1.2566370614359172], "batch_id": "b0"})");
  ASSERT_EQ(run({"simulate", "--params", path("params.json"), "--schedule", path("schedule.json"), "--shots", "0",
                 "--seed", "3", "--out", path("data.csv")}),
            cli::kOk)
      << err_.str();
  ASSERT_EQ(run({"fit", "--data", path("data.csv"), "--model", "qubit_tls", "--out", path("fit.json"), "--threads",
                 "1"}),
            cli::kOk)
      << err_.str();
  const Json report = read_json(path("fit.json"));
  ASSERT_EQ(report.at("fits").size(), 1u);
  const auto fit = fit_result_from_json(report.at("fits")[0].at("result"));
  const double theta = 2 * std::numbers::pi / 5;
  EXPECT_NEAR(fit.value("nu_zx", theta), 0.006, 1e-6);
  EXPECT_NEAR(fit.value("delta_omega", 0.0), 0.003, 1e-6);
  EXPECT_NEAR(fit.value("gamma_d", theta), 0.002, 1e-6);
}

TEST_F(CliTest, RerunsAreByteIdentical) {
  write_tls_inputs(R"({"theta_full": [3.141592653589793], "shots": 256})");
  for (const char* name : {"a.csv", "b.csv"}) {
    ASSERT_EQ(run({"simulate", "--params", path("params.json"), "--schedule", path("schedule.json"), "--seed", "11",
                   "--out", path(name)}),
              cli::kOk);
  }
  EXPECT_EQ(slurp(path("a.csv")), slurp(path("b.csv")));
  EXPECT_EQ(slurp(path("a.csv.meta.json")), slurp(path("b.csv.meta.json")));
  for (const char* name : {"fa.json", "fb.json"}) {
    ASSERT_EQ(run({"fit", "--data", path("a.csv"), "--out", path(name), "--starts", "4"}), cli::kOk) << err_.str();
  }
  EXPECT_EQ(slurp(path("fa.json")), slurp(path("fb.json")));
}

TEST_F(CliTest, ExitCodes) {
  write_json(path("pmme.json"), Json{{"model", "pmme"}, {"gamma_z", 1e-5}});
  std::ofstream(path("driven.json")) << R"({"theta_full": [3.141592653589793]})";
  std::ofstream(path("bad.json")) << R"({"theta_full": [1.0], "colour": "red"})";
  EXPECT_EQ(run({"simulate", "--params", path("pmme.json"), "--schedule", path("driven.json"), "--seed", "1", "--out",
                 path("x.csv")}),
            cli::kIncompatible);
  EXPECT_EQ(run({"simulate", "--params", path("pmme.json"), "--schedule", path("bad.json"), "--seed", "1", "--out",
                 path("x.csv")}),
            cli::kConfigError);
  EXPECT_EQ(run({"simulate", "--params", path("missing.json"), "--schedule", path("driven.json"), "--seed", "1",
                 "--out", path("x.csv")}),
            cli::kConfigError);
  EXPECT_EQ(run({"no-such-command"}), cli::kConfigError);
  EXPECT_EQ(run({"fit", "--out", path("f.json")}), cli::kConfigError);
}

TEST_F(CliTest, MapModelsAndOracle) {
  write_tls_inputs("{}");
  ASSERT_EQ(run({"map-models", "--params", path("params.json")}), cli::kOk) << err_.str();
  const Json mapped = Json::parse(out_.str());
  EXPECT_NEAR(mapped.at("gamma_z").get<double>(), 2 * 0.006 * 0.006, 1e-15);
  EXPECT_EQ(run({"oracle", "--draws", "3"}), cli::kOk) << out_.str();
  EXPECT_EQ(out_.str().find("FAIL"), std::string::npos);
}

TEST_F(CliTest, AnalyzeWritesReports) {
  write_tls_inputs(R"({"theta_full": [0.6283185307179586, 3.141592653589793], "shots": 1024})");
  ASSERT_EQ(run({"simulate", "--params", path("params.json"), "--schedule", path("schedule.json"), "--seed", "5",
                 "--out", path("d.csv")}),
            cli::kOk);
  ASSERT_EQ(run({"fit", "--data", path("d.csv"), "--out", path("f.json"), "--starts", "4"}), cli::kOk) << err_.str();
  ASSERT_EQ(run({"analyze", "--data", path("d.csv"), "--fits", path("f.json"), "--out", path("an")}), cli::kOk)
      << err_.str();
  for (const char* f : {"observables.csv", "purity.csv", "fp_vs_theta.csv", "ratios.csv", "density.csv",
                        "report.json"}) {
    EXPECT_TRUE(fs::exists(dir_ / "an" / f)) << f;
  }
  const Json report = read_json(path("an/report.json"));
  EXPECT_TRUE(report.contains("detector"));
}

}  // namespace
}  // namespace nmq
