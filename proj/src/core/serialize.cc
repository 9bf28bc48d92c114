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

#include "core/serialize.h"

#include <fstream>
#include <memory>
#include <sstream>

#include "core/error.h"

namespace latclimb {

namespace {

[[noreturn]] void ParseFail(const std::string& where, const std::string& what) {
  Fail(ErrorCode::kParse, where + ": " + what);
}

const Json& Field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) ParseFail(where, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) ParseFail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double Number(const Json& j, const std::string& where) {
  if (!j.is_number()) ParseFail(where, "expected a number");
  return j.get<double>();
}

Vector ParseVector(const Json& j, const std::string& where) {
  if (!j.is_array()) ParseFail(where, "expected an array of numbers");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[i] = Number(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

std::vector<double> ParseWeights(const Json& j) {
  if (!j.contains("weights")) return {};
  const Vector w = ParseVector(j["weights"], "weights");
  return std::vector<double>(w.data(), w.data() + w.size());
}

Json VectorJson(const Vector& v) { return Json(std::vector<double>(v.data(), v.data() + v.size())); }

Json IndicesJson(SubsetId s) { return Json(s.Indices()); }

}  // namespace

Mixture ParseMixture(const Json& j) {
  const Json& list = Field(j, "classifiers", "mixture");
  if (!list.is_array()) ParseFail("classifiers", "expected an array");
  std::vector<LinearClassifier> classifiers;
  for (size_t i = 0; i < list.size(); ++i) {
    const std::string where = "classifiers[" + std::to_string(i) + "]";
    classifiers.push_back({ParseVector(Field(list[i], "w", where), where + ".w"),
                           Number(Field(list[i], "b", where), where + ".b")});
  }
  return Mixture::Make(std::move(classifiers), ParseWeights(j));
}

Json ToJson(const Mixture& mix) {
  Json list = Json::array();
  for (const auto& h : mix.classifiers) list.push_back({{"w", VectorJson(h.w)}, {"b", h.b}});
  return {{"classifiers", list}, {"weights", mix.weights}};
}

MlpModel ParseMlp(const Json& j, const std::string& where) {
  const Json& layers = Field(j, "layers", where);
  if (!layers.is_array() || layers.empty()) ParseFail(where + ".layers", "expected a non-empty array");
  std::vector<DenseLayer> parsed;
  for (size_t l = 0; l < layers.size(); ++l) {
    const std::string lw = where + ".layers[" + std::to_string(l) + "]";
    const Json& rows = Field(layers[l], "w", lw);
    if (!rows.is_array() || rows.empty()) ParseFail(lw + ".w", "expected a non-empty matrix");
    DenseLayer layer;
    for (size_t r = 0; r < rows.size(); ++r) {
      const Vector row = ParseVector(rows[r], lw + ".w[" + std::to_string(r) + "]");
      if (r == 0) layer.w.resize(Eigen::Index(rows.size()), row.size());
      if (row.size() != layer.w.cols()) ParseFail(lw + ".w", "rows have different lengths");
      layer.w.row(Eigen::Index(r)) = row.transpose();
    }
    layer.b = ParseVector(Field(layers[l], "b", lw), lw + ".b");
    parsed.push_back(std::move(layer));
  }
  Activation act = Activation::kTanh;
  if (j.contains("activation")) {
    if (!j["activation"].is_string()) ParseFail(where + ".activation", "expected a string");
    act = ParseActivation(j["activation"].get<std::string>());
  }
  return MlpModel(std::move(parsed), act);
}

Json ToJson(const MlpModel& model) {
  Json layers = Json::array();
  for (const auto& layer : model.layers()) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < layer.w.rows(); ++r) rows.push_back(VectorJson(layer.w.row(r).transpose()));
    layers.push_back({{"w", rows}, {"b", VectorJson(layer.b)}});
  }
  return {{"layers", layers}, {"activation", ActivationName(model.activation())}};
}

MulticlassMixture ParseMulticlassMixture(const Json& j) {
  std::vector<std::shared_ptr<const ScoreModel>> models;
  if (j.is_object() && j.contains("layers")) {
    models.push_back(std::make_shared<MlpModel>(ParseMlp(j)));
    return MulticlassMixture::Make(std::move(models), {});
  }
  const Json& list = Field(j, "models", "mixture");
  if (!list.is_array()) ParseFail("models", "expected an array");
  for (size_t i = 0; i < list.size(); ++i) {
    models.push_back(std::make_shared<MlpModel>(ParseMlp(list[i], "models[" + std::to_string(i) + "]")));
  }
  return MulticlassMixture::Make(std::move(models), ParseWeights(j));
}

Json ToJson(const MulticlassMixture& mix) {
  Json list = Json::array();
  for (const auto& model : mix.models) {
    const auto* mlp = dynamic_cast<const MlpModel*>(model.get());
    if (mlp == nullptr) Fail(ErrorCode::kIncompatible, "only MLP models can be serialized");
    list.push_back(ToJson(*mlp));
  }
  return {{"models", list}, {"weights", mix.weights}};
}

ModelKind DetectModelKind(const Json& j) {
  if (!j.is_object()) ParseFail("model", "expected an object");
  if (j.contains("classifiers")) return ModelKind::kLinear;
  if (j.contains("models") || j.contains("layers")) return ModelKind::kMulticlass;
  ParseFail("model", "expected \"classifiers\", \"models\" or \"layers\"");
}

LabeledPoint ParsePoint(const Json& j) {
  const Json& y = Field(j, "y", "point");
  if (!y.is_number_integer()) ParseFail("point.y", "expected an integer label");
  return {ParseVector(Field(j, "x", "point"), "point.x"), y.get<int>()};
}

Json ToJson(const LabeledPoint& pt) { return {{"x", VectorJson(pt.x)}, {"y", pt.y}}; }

Json ToJson(const AttackResult& r, bool include_trace) {
  Json j = {{"delta", VectorJson(r.delta)},
            {"fooled", IndicesJson(r.fooled)},
            {"pool", IndicesJson(r.pool)},
            {"error", r.error},
            {"clean_error", r.clean_error},
            {"grad_evals", r.grad_evals},
            {"iterations", r.iterations},
            {"wall_time", r.wall_time},
            {"tolerance", r.tolerance}};
  if (include_trace) j["trace"] = r.trace;
  return j;
}

Json ToJson(const AdversarialLattice& lattice) {
  Json nodes = Json::array();
  for (const auto& n : lattice.nodes) {
    nodes.push_back({{"subset", IndicesJson(n.subset)}, {"witness", VectorJson(n.witness)}, {"mass", n.mass}});
  }
  Json maximal = Json::array();
  for (SubsetId s : MaximalElements(lattice)) maximal.push_back(IndicesJson(s));
  return {{"nodes", nodes}, {"maximal", maximal}, {"degenerate", lattice.degenerate}};
}

Json ParseJsonText(const std::string& text, const std::string& source) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kParse, source + ": " + e.what());
  }
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json ReadJsonFile(const std::string& path) { return ParseJsonText(ReadTextFile(path), path); }

void WriteTextFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path);
  out << content;
  if (!out) Fail(ErrorCode::kIo, "write failed for " + path);
}

}  // namespace latclimb
