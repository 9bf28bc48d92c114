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


#include "latclimb/latclimb.h"

#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

namespace {

using nlohmann::json;

const std::string kFixtures = LATCLIMB_FIXTURE_DIR;

struct ModelHandle {
  lc_model* p = nullptr;
  ~ModelHandle() { lc_model_free(p); }
};
struct PointHandle {
  lc_point* p = nullptr;
  ~PointHandle() { lc_point_free(p); }
};
struct ResultHandle {
  lc_result* p = nullptr;
  ~ResultHandle() { lc_result_free(p); }
};

json TakeJson(char* s) {
  json j = json::parse(s);
  lc_string_free(s);
  return j;
}

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(lc_version(), "0.1.0");
  EXPECT_STREQ(lc_status_name(LC_ERR_RESOURCE_LIMIT), "resource-limit");
}

TEST(CApi, LcaOnOppositeNormals) {
  ModelHandle model;
  PointHandle point;
  ASSERT_EQ(lc_model_load_file((kFixtures + "/opposite_normals.json").c_str(), &model.p), LC_OK);
  ASSERT_EQ(lc_point_load_file((kFixtures + "/point_origin.json").c_str(), &point.p), LC_OK);
  lc_model_kind kind;
  int m = 0, d = 0, classes = 0;
  ASSERT_EQ(lc_model_info(model.p, &kind, &m, &d, &classes), LC_OK);
  EXPECT_EQ(kind, LC_MODEL_LINEAR);
  EXPECT_EQ(m, 2);
  EXPECT_EQ(d, 2);

  lc_attack_options opts;
  lc_attack_options_init(&opts);
  ResultHandle result;
  ASSERT_EQ(lc_attack(model.p, point.p, &opts, &result.p), LC_OK) << lc_last_error();
  EXPECT_EQ(lc_result_error(result.p), 0.5);
  int fooled[4];
  ASSERT_EQ(lc_result_fooled(result.p, fooled, 4), 1);
  EXPECT_EQ(fooled[0], 0);
  double delta[2];
  EXPECT_EQ(lc_result_delta(result.p, delta, 2), 2);
  EXPECT_LE(delta[0] * delta[0] + delta[1] * delta[1], 1.0 + 1e-12);
  EXPECT_GT(lc_result_grad_evals(result.p), 0);

  char* text = nullptr;
  ASSERT_EQ(lc_result_to_json(result.p, 1, &text), LC_OK);
  const json j = TakeJson(text);
  EXPECT_EQ(j["fooled"], json::array({0}));
  EXPECT_TRUE(j.contains("trace"));
}

TEST(CApi, EveryLinearAttackAndZeroBudget) {
  const double w[] = {1, 0, -1, 0};
  const double b[] = {0.5, -0.5};
  const double q[] = {0.4, 0.6};
  ModelHandle model;
  ASSERT_EQ(lc_model_create_linear(2, 2, w, b, q, &model.p), LC_OK);
  const double x[] = {0, 0};
  PointHandle point;
  ASSERT_EQ(lc_point_create(x, 2, -1, &point.p), LC_OK);
  for (const char* attack : {"eol-pgd", "arc", "lca"}) {
    lc_attack_options opts;
    lc_attack_options_init(&opts);
    opts.attack = attack;
    opts.epsilon = 0.0;
    ResultHandle r;
    ASSERT_EQ(lc_attack(model.p, point.p, &opts, &r.p), LC_OK) << attack << lc_last_error();
    EXPECT_DOUBLE_EQ(lc_result_error(r.p), 0.4) << attack;
  }
}

TEST(CApi, MulticlassAttacks) {
  ModelHandle model;
  PointHandle point;
  ASSERT_EQ(lc_model_load_file((kFixtures + "/low_alignment_mixture.json").c_str(), &model.p), LC_OK);
  ASSERT_EQ(lc_point_load_file((kFixtures + "/low_alignment_point0.json").c_str(), &point.p), LC_OK);
  for (const char* attack : {"eol-pgd", "loe-pgd", "arc-greedy", "lca"}) {
    lc_attack_options opts;
    lc_attack_options_init(&opts);
    opts.attack = attack;
    opts.epsilon = 0.9;
    ResultHandle r;
    ASSERT_EQ(lc_attack(model.p, point.p, &opts, &r.p), LC_OK) << attack << lc_last_error();
    EXPECT_GE(lc_result_error(r.p), 0.0);
    EXPECT_LE(lc_result_error(r.p), 1.0);
  }
}

TEST(CApi, IncompatibleAttackNamesBoth) {
  ModelHandle multi, linear;
  PointHandle point;
  ASSERT_EQ(lc_model_load_file((kFixtures + "/low_alignment_mixture.json").c_str(), &multi.p), LC_OK);
  ASSERT_EQ(lc_model_load_file((kFixtures + "/opposite_normals.json").c_str(), &linear.p), LC_OK);
  ASSERT_EQ(lc_point_load_file((kFixtures + "/low_alignment_point0.json").c_str(), &point.p), LC_OK);
  lc_attack_options opts;
  lc_attack_options_init(&opts);
  opts.attack = "arc";
  ResultHandle r;
  EXPECT_EQ(lc_attack(multi.p, point.p, &opts, &r.p), LC_ERR_INCOMPATIBLE);
  EXPECT_NE(std::string(lc_last_error()).find("arc requires binary linear mixture"), std::string::npos);
  EXPECT_NE(std::string(lc_last_error()).find("multiclass"), std::string::npos);

  PointHandle binary_point;
  ASSERT_EQ(lc_point_load_file((kFixtures + "/point_origin.json").c_str(), &binary_point.p), LC_OK);
  opts.attack = "arc-greedy";
  EXPECT_EQ(lc_attack(linear.p, binary_point.p, &opts, &r.p), LC_ERR_INCOMPATIBLE);
  lc_lattice* lat = nullptr;
  EXPECT_EQ(lc_lattice_build(multi.p, point.p, "l2", 1.0, &lat), LC_ERR_INCOMPATIBLE);
}

TEST(CApi, InvalidInputs) {
  lc_model* model = nullptr;
  EXPECT_EQ(lc_model_load_file("/nonexistent.json", &model), LC_ERR_IO);
  EXPECT_EQ(lc_model_from_json("{\"classifiers\":[{\"w\":[1]}]}", &model), LC_ERR_PARSE);
  EXPECT_NE(std::string(lc_last_error()).find("classifiers[0]"), std::string::npos);
  EXPECT_EQ(lc_model_from_json(nullptr, &model), LC_ERR_INVALID_INPUT);
  EXPECT_EQ(model, nullptr);

  ModelHandle ok;
  ASSERT_EQ(lc_model_load_file((kFixtures + "/opposite_normals.json").c_str(), &ok.p), LC_OK);
  PointHandle pt;
  ASSERT_EQ(lc_point_from_json("{\"x\":[0,0],\"y\":-1}", &pt.p), LC_OK);
  lc_attack_options opts;
  lc_attack_options_init(&opts);
  ResultHandle r;
  opts.attack = "fgsm";
  EXPECT_EQ(lc_attack(ok.p, pt.p, &opts, &r.p), LC_ERR_INVALID_INPUT);
  opts.attack = "lca";
  opts.order = "0,0";
  EXPECT_EQ(lc_attack(ok.p, pt.p, &opts, &r.p), LC_ERR_INVALID_INPUT);
  opts.order = "1,0";
  opts.epsilon = -1.0;
  EXPECT_EQ(lc_attack(ok.p, pt.p, &opts, &r.p), LC_ERR_INVALID_INPUT);
  EXPECT_EQ(r.p, nullptr);
}

TEST(CApi, LatticeAndOracle) {
  ModelHandle model;
  PointHandle point;
  ASSERT_EQ(lc_model_load_file((kFixtures + "/four_classifiers.json").c_str(), &model.p), LC_OK);
  ASSERT_EQ(lc_point_load_file((kFixtures + "/point_origin.json").c_str(), &point.p), LC_OK);
  lc_lattice* lat = nullptr;
  ASSERT_EQ(lc_lattice_build(model.p, point.p, "l2", 1.0, &lat), LC_OK);
  EXPECT_EQ(lc_lattice_maximal_count(lat), 3u);
  char* text = nullptr;
  ASSERT_EQ(lc_lattice_to_json(lat, &text), LC_OK);
  EXPECT_EQ(TakeJson(text)["nodes"].size(), lc_lattice_node_count(lat));
  lc_lattice_free(lat);

  double error = -1.0, x[2];
  ASSERT_EQ(lc_optimal_attack(model.p, point.p, "l2", 1.0, &error, x), LC_OK);
  EXPECT_GT(error, 0.0);
}

TEST(CApi, LatticeResourceLimit) {
  const int m = 21;
  std::vector<double> w(2 * m, 0.0), b(m, -2.0);
  for (int i = 0; i < m; ++i) w[2 * i] = 1.0;
  ModelHandle model;
  ASSERT_EQ(lc_model_create_linear(m, 2, w.data(), b.data(), nullptr, &model.p), LC_OK);
  const double x[] = {0, 0};
  PointHandle point;
  ASSERT_EQ(lc_point_create(x, 2, -1, &point.p), LC_OK);
  lc_lattice* lat = nullptr;
  EXPECT_EQ(lc_lattice_build(model.p, point.p, "l2", 1.0, &lat), LC_ERR_RESOURCE_LIMIT);
  EXPECT_EQ(lat, nullptr);
}

TEST(CApi, RunExperimentWithOverrides) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "latclimb_capi_test";
  fs::remove_all(dir);
  const char* overrides[] = {"theta_step_deg=90", "norm=linf"};
  char* manifest = nullptr;
  ASSERT_EQ(lc_run_experiment("sweep-angle", "{\"seed\":5}", overrides, 2, dir.string().c_str(), &manifest),
            LC_OK)
      << lc_last_error();
  const json j = TakeJson(manifest);
  EXPECT_EQ(j["config"]["theta_step_deg"], 90.0);
  EXPECT_EQ(j["config"]["norm"], "linf");
  EXPECT_EQ(j["seed"], 5);
  EXPECT_TRUE(fs::exists(dir / "angle_sweep.csv"));

  const char* bad[] = {"theta_stepdeg=5"};
  EXPECT_EQ(lc_run_experiment("sweep-angle", nullptr, bad, 1, dir.string().c_str(), nullptr),
            LC_ERR_INVALID_INPUT);
  EXPECT_NE(std::string(lc_last_error()).find("theta_stepdeg"), std::string::npos);
  const char* malformed[] = {"seed"};
  EXPECT_EQ(lc_run_experiment("sweep-angle", nullptr, malformed, 1, dir.string().c_str(), nullptr),
            LC_ERR_INVALID_INPUT);
  fs::remove_all(dir);
}

}  // namespace
