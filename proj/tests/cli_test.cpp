// Copyright 2026 The urnn-equiv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include "json.hpp"
#include "urnn/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace urnn {
namespace {

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("urnn_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  RunResult run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" URNN_CLI "' " + args +
                            " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    RunResult r{WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(dir_ / "stdout.txt"),
                read_file(dir_ / "stderr.txt")};
    return r;
  }
  std::string slurp(const std::string& name) { return read_file(dir_ / name); }
  json load(const std::string& name) { return json::parse(slurp(name)); }

  fs::path dir_;
};

TEST_F(CliTest, Dof) {
  RunResult r = run("dof --n 4 --m 2 --p 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(": 32\n"), std::string::npos);
  EXPECT_NE(r.out.find(": 60\n"), std::string::npos);
  EXPECT_NE(r.out.find("ratio: 1.875"), std::string::npos);
  r = run("dof --n 1 --m 1 --p 1");
  EXPECT_NE(r.out.find(": 3\n"), std::string::npos);
  EXPECT_NE(r.out.find(": 5\n"), std::string::npos);
}

TEST_F(CliTest, GenerateEmbedVerify) {
  ASSERT_EQ(run("gen-system --n 4 --m 2 --p 2 --epsilon 0.01 --seed 7 --out sys.json").code, 0);
  const json meta = load("sys.json").at("metadata");
  EXPECT_GT(meta.at("singular_value_min").get<double>(), 0.99);
  EXPECT_LT(meta.at("singular_value_max").get<double>(), 1.0);

  ASSERT_EQ(run("embed --model sys.json --bound-m 10 --out urnn.json").code, 0);
  EXPECT_EQ(load_model(dir_ / "urnn.json").state_dim(), 8u);

  RunResult r = run("verify --a sys.json --b urnn.json --report rep.json");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(load("rep.json").at("passed").get<bool>());
  EXPECT_LE(load("rep.json").at("max_abs_deviation").get<double>(), 1e-8);

  ASSERT_EQ(run("verify --a sys.json --b sys.json --report self.json").code, 0);
  EXPECT_EQ(load("self.json").at("max_abs_deviation").get<double>(), 0.0);

  RnnParams perturbed = load_model(dir_ / "sys.json");
  perturbed.c = perturbed.c * 1.01;
  save_model(dir_ / "bad.json", perturbed);
  r = run("verify --a sys.json --b bad.json --report bad_rep.json");
  EXPECT_EQ(r.code, 1);
  EXPECT_FALSE(load("bad_rep.json").at("passed").get<bool>());
}

TEST_F(CliTest, EmbedRejectsUnsupportedSources) {
  RnnParams sig = RnnParams::zeros(1, 1, 1, Activation::kSigmoid);
  sig.w(0, 0) = 0.5;
  save_model(dir_ / "sig.json", sig);
  RunResult r = run("embed --model sig.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("unsupported activation"), std::string::npos);

  RnnParams wide = RnnParams::zeros(1, 1, 1, Activation::kRelu);
  wide.w(0, 0) = 1.0;
  save_model(dir_ / "wide.json", wide);
  r = run("embed --model wide.json");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("not contractive"), std::string::npos);
}

TEST_F(CliTest, GenerateDataRecordsSnr) {
  ASSERT_EQ(run("gen-system --seed 3 --out sys.json").code, 0);
  ASSERT_EQ(run("gen-data --model sys.json --n-train 20 --n-test 10 --T 500 --snr-db 20 "
                "--seed 4 --out data")
                .code,
            0);
  const json meta = load("data/meta.json");
  EXPECT_NEAR(meta.at("empirical_snr_db").get<double>(), 20.0, 0.5);
  EXPECT_EQ(meta.at("spec").at("seed"), 3);
  ASSERT_EQ(run("gen-data --model sys.json --n-train 2 --n-test 1 --T 10 --snr-db inf "
                "--out clean")
                .code,
            0);
  EXPECT_TRUE(load("clean/meta.json").at("snr_db").is_null());
}

TEST_F(CliTest, MissingOutputDirectory) {
  RunResult r = run("gen-system --out missing/model.json");
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("missing"), std::string::npos);
  EXPECT_EQ(run("embed --model absent.json").code, 3);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("dof --bogus 1").code, 2);
  EXPECT_EQ(run("converse relu --wc 1.5").code, 2);
  EXPECT_EQ(run("converse sigmoid --wc 1.5").code, 2);
  EXPECT_EQ(run("experiment --preset huge").code, 2);
  EXPECT_EQ(run("gen-system --epsilon 2").code, 2);
}

TEST_F(CliTest, TrainAndEval) {
  ASSERT_EQ(run("gen-system --seed 5 --out sys.json").code, 0);
  ASSERT_EQ(run("gen-data --model sys.json --n-train 20 --n-test 5 --T 40 --out data").code, 0);
  ASSERT_EQ(run("train --data data --units 4 --constraint unitary --max-epochs 3 --seed 1 "
                "--out t.json --report tr.json")
                .code,
            0);
  const json rep = load("tr.json");
  EXPECT_EQ(rep.at("config").at("constraint"), "unitary");
  EXPECT_EQ(rep.at("epochs_run"), 3);
  EXPECT_FALSE(rep.contains("wall_time_s"));
  for (const json& v : rep.at("constraint_residual")) EXPECT_LE(v.get<double>(), 1e-8);
  const std::string first = slurp("tr.json");
  ASSERT_EQ(run("train --data data --units 4 --constraint unitary --max-epochs 3 --seed 1 "
                "--out t.json --report tr.json")
                .code,
            0);
  EXPECT_EQ(slurp("tr.json"), first);
  const RunResult r = run("eval --model t.json --data data --report ev.json");
  EXPECT_EQ(r.code, 0);
  EXPECT_DOUBLE_EQ(load("ev.json").at("test_r2").get<double>(),
                   rep.at("final_test_r2").get<double>());
  EXPECT_EQ(run("train --data data --units 4 --constraint lstm").code, 2);
}

TEST_F(CliTest, ConverseReports) {
  RunResult r = run("converse relu --wc 0.9 --grid 11 --report relu.json");
  ASSERT_EQ(r.code, 0);
  const json relu = load("relu.json");
  EXPECT_GE(relu.at("gap").get<double>(), 0.01);
  EXPECT_LE(relu.at("embedding_deviation").get<double>(), 1e-8);
  r = run("converse sigmoid --wc 0.9 --candidates 5 --report sig.json");
  ASSERT_EQ(r.code, 0);
  const json sig = load("sig.json");
  EXPECT_EQ(sig.at("candidates").size(), 5u);
  EXPECT_GT(sig.at("min_max_gap").get<double>(), 0.0);
}

TEST_F(CliTest, ExperimentWritesDeterministicOutputs) {
  fs::create_directories(dir_ / "a");
  fs::create_directories(dir_ / "b");
  ASSERT_EQ(run("experiment --preset desk --seeds 1 --max-epochs 1 --threads 1 --out a").code, 0);
  ASSERT_EQ(run("experiment --preset desk --seeds 1 --max-epochs 1 --threads 2 --out b").code, 0);
  EXPECT_EQ(slurp("a/results.csv"), slurp("b/results.csv"));
  EXPECT_EQ(slurp("a/summary.json"), slurp("b/summary.json"));
  const std::string csv = slurp("a/results.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 7);
  EXPECT_NE(csv.find("\nurnn,16,8,1,"), std::string::npos);
  EXPECT_EQ(run("experiment --out nowhere").code, 3);
}

}  // namespace
}  // namespace urnn
