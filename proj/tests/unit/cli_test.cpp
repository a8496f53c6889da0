// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "groupcl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = groupcl::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    root_ = fs::temp_directory_path() / (std::string("groupcl_cli_") + info->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  std::string dir(const std::string& name) const { return (root_ / name).string(); }

  std::string make_data() {
    const Outcome r = invoke({"gen-data", "--out", dir("data"), "--set", "graphs=40", "--set", "nodes=10", "--set",
                              "features=6"});
    EXPECT_EQ(r.code, 0) << r.err;
    return dir("data") + "/dataset.jsonl";
  }

  std::vector<std::string> small_sets() const {
    return {"--set", "epochs=2", "--set", "gin_hidden=8", "--set", "d_o=16", "--set", "d_k=8", "--set", "batch_size=16"};
  }

  Outcome train_into(const std::string& data, const std::string& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"train", "--data", data, "--out", out};
    for (const auto& s : small_sets()) args.push_back(s);
    for (const auto& s : extra) args.push_back(s);
    return invoke(args);
  }

  fs::path root_;
};

TEST_F(CliTest, CountParamsDefaults) {
  const Outcome r = invoke({"count-params"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "groupcl_head=22800\ngraphcl_head=51200\n");
  EXPECT_EQ(invoke({"count-params", "--set", "p=1"}).out, "groupcl_head=41700\ngraphcl_head=51200\n");
}

TEST_F(CliTest, GenDataWritesOneLinePerGraph) {
  const std::string text = slurp(make_data());
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 40);
}

TEST_F(CliTest, ZeroEpochTrainWritesCheckpoint) {
  const std::string data = make_data();
  const Outcome r = train_into(data, dir("t0"), {"--set", "epochs=0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir("t0") + "/checkpoint.bin"));
  EXPECT_EQ(invoke({"analyze", "--checkpoint", dir("t0") + "/checkpoint.bin", "--out", dir("a0")}).code, 0);
}

TEST_F(CliTest, RepeatedRunsAndConfigEchoAreByteIdentical) {
  const std::string data = make_data();
  ASSERT_EQ(train_into(data, dir("a")).code, 0);
  ASSERT_EQ(train_into(data, dir("b")).code, 0);
  const std::string history = slurp(dir("a") + "/history.csv");
  EXPECT_FALSE(history.empty());
  EXPECT_EQ(history, slurp(dir("b") + "/history.csv"));
  EXPECT_EQ(slurp(dir("a") + "/checkpoint.bin"), slurp(dir("b") + "/checkpoint.bin"));

  // Re-running from the echoed config reproduces the run without any overrides.
  const Outcome echo = invoke({"train", "--data", data, "--config", dir("a") + "/effective_config.txt", "--out",
                               dir("c")});
  ASSERT_EQ(echo.code, 0) << echo.err;
  EXPECT_EQ(history, slurp(dir("c") + "/history.csv"));
}

TEST_F(CliTest, ResumeMatchesStraightRun) {
  const std::string data = make_data();
  ASSERT_EQ(train_into(data, dir("full"), {"--set", "epochs=3"}).code, 0);
  ASSERT_EQ(train_into(data, dir("half"), {"--set", "epochs=1"}).code, 0);
  const Outcome r = invoke({"train", "--data", data, "--resume", dir("half") + "/checkpoint.bin", "--set", "epochs=3",
                            "--out", dir("rest")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir("full") + "/checkpoint.bin"), slurp(dir("rest") + "/checkpoint.bin"));
  const Outcome bad = invoke({"train", "--data", data, "--resume", dir("half") + "/checkpoint.bin", "--set", "p=2",
                              "--out", dir("bad")});
  EXPECT_EQ(bad.code, 3);
}

TEST_F(CliTest, EvalAndExportProduceFiles) {
  const std::string data = make_data();
  ASSERT_EQ(train_into(data, dir("m")).code, 0);
  const std::string ckpt = dir("m") + "/checkpoint.bin";
  const Outcome ev = invoke({"eval", "--checkpoint", ckpt, "--data", data, "--out", dir("e")});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_EQ(ev.out.rfind("test_accuracy=", 0), 0u);
  EXPECT_TRUE(fs::exists(dir("e") + "/probe.txt"));
  EXPECT_TRUE(fs::exists(dir("e") + "/embeddings.csv"));
  const Outcome ex = invoke({"export-attn", "--checkpoint", ckpt, "--data", data, "--graphs", "0,3", "--out", dir("x")});
  ASSERT_EQ(ex.code, 0) << ex.err;
  const std::string csv = slurp(dir("x") + "/attention.csv");
  // header + 2 graphs * 10 nodes * 4 groups
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 81);
  EXPECT_EQ(invoke({"export-attn", "--checkpoint", ckpt, "--data", data, "--graphs", "99", "--out", dir("y")}).code, 3);
}

TEST_F(CliTest, ErrorsCarryKindAndExitCode) {
  const Outcome unknown = invoke({"count-params", "--set", "bogus=1"});
  EXPECT_EQ(unknown.code, 3);
  EXPECT_EQ(unknown.err.rfind("error kind=config message=", 0), 0u);

  const Outcome missing = invoke({"train", "--data", dir("nope.jsonl"), "--out", dir("o")});
  EXPECT_EQ(missing.code, 5);
  EXPECT_NE(missing.err.find("kind=io"), std::string::npos);

  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({}).code, 2);

  std::ofstream(root_ / "garbage.bin") << "not a checkpoint";
  const Outcome corrupt = invoke({"analyze", "--checkpoint", dir("garbage.bin"), "--out", dir("g")});
  EXPECT_EQ(corrupt.code, 9);

  std::ofstream(root_ / "bad.jsonl") << "{\"n\": 2\n";
  EXPECT_EQ(invoke({"train", "--data", dir("bad.jsonl"), "--out", dir("p")}).code, 4);
}

TEST_F(CliTest, SweepWritesOneRowPerCell) {
  const std::string data = make_data();
  std::vector<std::string> args = {"sweep", "--data", data, "--p-values", "1,4", "--out", dir("s")};
  for (const auto& s : small_sets()) args.push_back(s);
  const Outcome r = invoke(args);
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string csv = slurp(dir("s") + "/results.csv");
  EXPECT_EQ(csv.rfind("p,lambda,seed,final_loss,train_accuracy,validation_accuracy,test_accuracy\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);

  args[4] = "1,3";
  EXPECT_EQ(invoke(args).code, 3);
}

TEST(CliExitCodes, KindsMapToDistinctCodes) {
  EXPECT_EQ(groupcl::cli::exit_code_for("oracle-invalid"), 10);
  EXPECT_EQ(groupcl::cli::exit_code_for("dimension"), 7);
  EXPECT_EQ(groupcl::cli::exit_code_for("numeric"), 6);
  EXPECT_EQ(groupcl::cli::exit_code_for("something-else"), 1);
}

}  // namespace
