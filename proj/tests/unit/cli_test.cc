// Copyright 2026 The latclimb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Spawns the latclimb binary and checks exit codes and outputs.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = LATCLIMB_CLI_PATH;
const std::string kFixtures = LATCLIMB_FIXTURE_DIR;

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("latclimb_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Outcome Exec(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = "'" + kCli + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    Outcome r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = Slurp(out);
    r.err = Slurp(err);
    return r;
  }

  std::string Fixture(const std::string& name) const { return "'" + kFixtures + "/" + name + "'"; }

  fs::path dir_;
};

std::string WithoutLastColumn(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

TEST_F(Cli, HelpExitsZero) {
  const Outcome r = Exec("--help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("attack"), std::string::npos);
}

TEST_F(Cli, LcaOnOppositeNormals) {
  const Outcome r = Exec("attack --model " + Fixture("opposite_normals.json") + " --point " +
                     Fixture("point_origin.json") + " --attack lca --eps 1");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["error"], 0.5);
  EXPECT_EQ(j["fooled"], json::array({0}));
  EXPECT_NE(r.err.find("error=0.5"), std::string::npos);
}

TEST_F(Cli, OutFileAndSummaryLine) {
  const fs::path out = dir_ / "result.json";
  const Outcome r = Exec("attack --model " + Fixture("opposite_normals.json") +
                     " --x 0,0 --y -1 --attack arc --out '" + out.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "error=0.5 fooled=[0]\n");
  EXPECT_EQ(json::parse(Slurp(out))["error"], 0.5);
}

TEST_F(Cli, ZeroBudgetReportsCleanMass) {
  const Outcome r = Exec("attack --model " + Fixture("opposite_normals_weighted.json") +
                     " --x 0.6,0 --y -1 --attack lca --eps 0");
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["error"], j["clean_error"]);
  EXPECT_DOUBLE_EQ(j["error"].get<double>(), 0.7);
}

TEST_F(Cli, MulticlassAttacksRun) {
  for (const char* attack : {"eol-pgd", "loe-pgd", "arc-greedy", "lca"}) {
    const Outcome r = Exec("attack --model " + Fixture("low_alignment_mixture.json") + " --point " +
                       Fixture("low_alignment_point0.json") + " --eps 0.9 --attack " + attack);
    EXPECT_EQ(r.code, 0) << attack << ": " << r.err;
    EXPECT_TRUE(json::parse(r.out).contains("error"));
  }
}

TEST_F(Cli, ArcOnMulticlassIsUsageError) {
  const Outcome r = Exec("attack --model " + Fixture("low_alignment_mixture.json") + " --point " +
                     Fixture("low_alignment_point0.json") + " --attack arc");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("arc requires binary linear mixture"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("multiclass"), std::string::npos) << r.err;
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(Exec("attack --model " + Fixture("four_classifiers.json") + " --bogus").code, 1);
  EXPECT_EQ(Exec("attack --point " + Fixture("point_origin.json")).code, 1);
  EXPECT_EQ(Exec("attack --model /nonexistent.json --x 0,0 --y -1").code, 1);
  EXPECT_EQ(Exec("attack --model " + Fixture("four_classifiers.json") + " --x 0,0 --y -1 --attack pgd").code, 1);
  EXPECT_EQ(Exec("attack --model " + Fixture("four_classifiers.json") + " --x 0,0 --y -1 --eps -1").code, 1);
  EXPECT_EQ(Exec("attack --model " + Fixture("four_classifiers.json") + " --x 0,0,0 --y -1").code, 1);
  EXPECT_EQ(Exec("frobnicate").code, 1);
}

TEST_F(Cli, LatticeFixtures) {
  Outcome r = Exec("lattice --model " + Fixture("overlapping_pair.json") + " --point " + Fixture("point_origin.json"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["maximal"], json::parse("[[0,1]]"));

  r = Exec("lattice --model " + Fixture("robust.json") + " --x 0,0 --y -1");
  ASSERT_EQ(r.code, 0) << r.err;
  const json robust = json::parse(r.out);
  ASSERT_EQ(robust["nodes"].size(), 1u);
  EXPECT_EQ(robust["nodes"][0]["subset"], json::array());
  EXPECT_EQ(robust["maximal"], json::parse("[[]]"));

  r = Exec("lattice --model " + Fixture("four_classifiers.json") + " --x 0,0 --y -1");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["maximal"].size(), 3u);
  EXPECT_NE(r.err.find("maximal=3"), std::string::npos);
}

TEST_F(Cli, LatticeOnMulticlassIsUsageError) {
  EXPECT_EQ(Exec("lattice --model " + Fixture("low_alignment_mixture.json") + " --point " +
                 Fixture("low_alignment_point0.json"))
                .code,
            1);
}

TEST_F(Cli, LatticeTooLargeExitsTwo) {
  json mix = {{"classifiers", json::array()}};
  for (int i = 0; i < 21; ++i) mix["classifiers"].push_back({{"w", {1.0, 0.0}}, {"b", -2.0}});
  const fs::path model = dir_ / "m21.json";
  std::ofstream(model) << mix.dump();
  const Outcome r = Exec("lattice --model '" + model.string() + "' --x 0,0 --y -1");
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("20"), std::string::npos) << r.err;
}

TEST_F(Cli, SweepAngleDefault) {
  const fs::path out = dir_ / "sweep";
  const Outcome r = Exec("experiment sweep-angle --out '" + out.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream csv(Slurp(out / "angle_sweep.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "theta_deg,attack,error,oracle_error,grad_evals,wall_time_s");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 37 * 4);
  const json manifest = json::parse(Slurp(out / "manifest.json"));
  EXPECT_EQ(manifest["seed"], 42);
  EXPECT_EQ(manifest["version"], "0.1.0");
  EXPECT_TRUE(manifest.contains("config"));
}

TEST_F(Cli, RandomLinearIsDeterministic) {
  const std::string common = " --seed 42 --trials 4 --set d=16 --set m_max=3";
  ASSERT_EQ(Exec("experiment random-linear --out '" + (dir_ / "a").string() + "'" + common).code, 0);
  ASSERT_EQ(Exec("experiment random-linear --jobs 2 --out '" + (dir_ / "b").string() + "'" + common).code, 0);
  for (const char* f : {"random_linear.csv", "random_linear_summary.csv"}) {
    const std::string a = Slurp(dir_ / "a" / f), b = Slurp(dir_ / "b" / f);
    EXPECT_FALSE(a.empty());
    EXPECT_EQ(WithoutLastColumn(a), WithoutLastColumn(b)) << f;
  }
}

TEST_F(Cli, ExperimentConfigErrorsNameTheField) {
  const fs::path cfg = dir_ / "cfg.json";
  std::ofstream(cfg) << R"({"trails": 5})";
  Outcome r = Exec("experiment random-linear --config '" + cfg.string() + "' --out '" + (dir_ / "o").string() + "'");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("trails"), std::string::npos) << r.err;

  r = Exec("experiment maximality-audit --set m_max=9 --out '" + (dir_ / "o").string() + "'");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("m_max"), std::string::npos) << r.err;

  EXPECT_EQ(Exec("experiment nonsense").code, 1);
  EXPECT_EQ(Exec("experiment sweep-angle --config /nonexistent.json").code, 1);
}

TEST_F(Cli, AuditReport) {
  const fs::path out = dir_ / "audit";
  const Outcome r = Exec("experiment maximality-audit --trials 25 --out '" + out.string() + "'");
  ASSERT_EQ(r.code, 0) << r.err;
  const json report = json::parse(Slurp(out / "maximality_report.json"));
  EXPECT_EQ(report["pass_fraction"], 1.0);
  EXPECT_EQ(report["evaluated"], 25);
}

}  // namespace
