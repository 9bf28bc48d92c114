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

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <variant>

#include "core/attacks_linear.h"
#include "core/error.h"
#include "core/experiments.h"
#include "core/lattice_oracle.h"
#include "core/multiclass.h"
#include "core/serialize.h"

namespace lc = latclimb;

struct lc_model {
  std::variant<lc::Mixture, lc::MulticlassMixture> mix;
};

struct lc_point {
  lc::LabeledPoint pt;
};

struct lc_result {
  lc::AttackResult r;
};

struct lc_lattice {
  lc::AdversarialLattice lattice;
  size_t maximal = 0;
};

namespace {

thread_local std::string last_error;

lc_status ToStatus(lc::ErrorCode code) {
  switch (code) {
    case lc::ErrorCode::kInvalidInput: return LC_ERR_INVALID_INPUT;
    case lc::ErrorCode::kContractViolation: return LC_ERR_CONTRACT;
    case lc::ErrorCode::kResourceLimit: return LC_ERR_RESOURCE_LIMIT;
    case lc::ErrorCode::kIo: return LC_ERR_IO;
    case lc::ErrorCode::kParse: return LC_ERR_PARSE;
    case lc::ErrorCode::kIncompatible: return LC_ERR_INCOMPATIBLE;
  }
  return LC_ERR_INTERNAL;
}

template <typename F>
lc_status Guard(F&& body) {
  try {
    body();
    last_error.clear();
    return LC_OK;
  } catch (const lc::Error& e) {
    last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return LC_ERR_RESOURCE_LIMIT;
  } catch (const std::exception& e) {
    last_error = e.what();
    return LC_ERR_INTERNAL;
  }
}

void NotNull(const void* p, const char* what) {
  if (p == nullptr) lc::Fail(lc::ErrorCode::kInvalidInput, std::string(what) + " is NULL");
}

char* Dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

lc_model* ModelFromJson(const lc::Json& j) {
  if (lc::DetectModelKind(j) == lc::ModelKind::kLinear) return new lc_model{lc::ParseMixture(j)};
  return new lc_model{lc::ParseMulticlassMixture(j)};
}

std::string Str(const char* s, const char* fallback) { return s != nullptr && *s ? s : fallback; }

std::vector<size_t> ResolveOrder(const std::string& text, const std::vector<double>& weights,
                                 uint64_t seed) {
  const int m = int(weights.size());
  if (text == "weight") return lc::WeightOrder(weights);
  if (text == "random") {
    lc::Rng rng = lc::Rng::Stream(seed, {0x0de7});
    return lc::RandomOrder(m, rng);
  }
  std::vector<size_t> order;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t used = 0;
    long v = -1;
    try {
      v = std::stol(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 0) {
      lc::Fail(lc::ErrorCode::kInvalidInput,
               "order must be weight, random or comma-separated indices (got '" + text + "')");
    }
    order.push_back(size_t(v));
  }
  lc::ValidateOrder(order, m);
  return order;
}

lc::AttackResult AttackLinear(const lc::Mixture& mix, const lc::LabeledPoint& pt,
                              const lc::ThreatModel& tm, const lc_attack_options& o,
                              const std::string& attack) {
  if (attack == "loe-pgd") {
    lc::Fail(lc::ErrorCode::kIncompatible, "loe-pgd requires multiclass model (got binary linear mixture)");
  }
  if (attack == "arc-greedy") {
    lc::Fail(lc::ErrorCode::kIncompatible, "arc-greedy requires multiclass model (got binary linear mixture)");
  }
  lc::PgdConfig pgd = lc::PgdConfig::ForMixture(mix.size(), tm.epsilon > 0.0 ? tm.epsilon : 1.0);
  if (o.steps > 0) {
    pgd.steps = o.steps;
    pgd.eta = (tm.epsilon > 0.0 ? tm.epsilon : 1.0) / std::sqrt(double(o.steps));
  }
  if (o.eta > 0.0) pgd.eta = o.eta;
  if (o.steepest == 1) pgd.mode = lc::StepMode::kSteepest;
  const auto order = ResolveOrder(Str(o.order, "weight"), mix.weights, o.seed);
  if (attack == "eol-pgd") return lc::EolPgdLinear(mix, pt, tm, pgd);
  if (attack == "arc") return lc::ArcLinear(mix, pt, tm, order);
  if (attack != "lca") lc::Fail(lc::ErrorCode::kInvalidInput, "unknown attack '" + attack + "'");
  lc::AttackResult best = lc::LcaLinear(mix, pt, tm, pgd, order);
  long evals = best.grad_evals;
  for (int k = 1; k < o.restarts; ++k) {
    lc::Rng rng = lc::Rng::Stream(o.seed, {0x1ca, uint64_t(k)});
    lc::AttackResult r = lc::LcaLinear(mix, pt, tm, pgd, lc::RandomOrder(mix.size(), rng));
    evals += r.grad_evals;
    if (r.error > best.error) best = std::move(r);
  }
  best.grad_evals = evals;
  return best;
}

lc::AttackResult AttackMulticlass(const lc::MulticlassMixture& mix, const lc::LabeledPoint& pt,
                                  const lc::ThreatModel& tm, const lc_attack_options& o,
                                  const std::string& attack) {
  if (attack == "arc") {
    lc::Fail(lc::ErrorCode::kIncompatible, "arc requires binary linear mixture (got multiclass model)");
  }
  lc::MulticlassConfig cfg = lc::MulticlassConfig::Defaults(tm.epsilon);
  if (o.steps > 0) cfg.pgd.steps = o.steps;
  if (o.eta > 0.0) cfg.pgd.eta = o.eta;
  if (o.steepest == 0) cfg.pgd.mode = lc::StepMode::kRaw;
  cfg.restarts = o.restarts;
  cfg.random_init = o.random_init != 0;
  cfg.seed = o.seed;
  cfg.surrogate = lc::ParseSurrogate(Str(o.surrogate, "cross-entropy"));
  cfg.target = o.frozen_target ? lc::TargetMode::kFrozen : lc::TargetMode::kRecompute;
  const auto order = ResolveOrder(Str(o.order, "weight"), mix.weights, o.seed);
  if (attack == "eol-pgd") return lc::EolPgdMulticlass(mix, pt, tm, cfg);
  if (attack == "loe-pgd") return lc::LoePgdMulticlass(mix, pt, tm, cfg);
  if (attack == "arc-greedy") return lc::ArcGreedyMulticlass(mix, pt, tm, cfg, order);
  if (attack == "lca") return lc::LcaMulticlass(mix, pt, tm, cfg, order);
  lc::Fail(lc::ErrorCode::kInvalidInput, "unknown attack '" + attack + "'");
}

const lc::Mixture& RequireLinear(const lc_model* model, const char* what) {
  NotNull(model, "model");
  const auto* mix = std::get_if<lc::Mixture>(&model->mix);
  if (mix == nullptr) {
    lc::Fail(lc::ErrorCode::kIncompatible, std::string(what) + " requires binary linear mixture (got multiclass model)");
  }
  return *mix;
}

void CheckPointFits(const lc::Mixture& mix, const lc::LabeledPoint& pt) {
  if (pt.x.size() != mix.dim()) lc::Fail(lc::ErrorCode::kInvalidInput, "point dimension does not match the model");
  lc::RequireBinaryLabel(pt.y);
}

}  // namespace

extern "C" {

const char* lc_version(void) { return LATCLIMB_VERSION; }

const char* lc_last_error(void) { return last_error.c_str(); }

const char* lc_status_name(lc_status status) {
  switch (status) {
    case LC_OK: return "ok";
    case LC_ERR_INVALID_INPUT: return "invalid-input";
    case LC_ERR_CONTRACT: return "contract-violation";
    case LC_ERR_RESOURCE_LIMIT: return "resource-limit";
    case LC_ERR_IO: return "io";
    case LC_ERR_PARSE: return "parse";
    case LC_ERR_INCOMPATIBLE: return "incompatible";
    case LC_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void lc_string_free(char* s) { std::free(s); }

lc_status lc_model_load_file(const char* path, lc_model** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = ModelFromJson(lc::ReadJsonFile(path));
  });
}

lc_status lc_model_from_json(const char* json, lc_model** out) {
  return Guard([&] {
    NotNull(json, "json");
    NotNull(out, "out");
    *out = ModelFromJson(lc::ParseJsonText(json, "model"));
  });
}

lc_status lc_model_create_linear(int m, int d, const double* w, const double* b,
                                 const double* weights, lc_model** out) {
  return Guard([&] {
    NotNull(w, "w");
    NotNull(b, "b");
    NotNull(out, "out");
    if (m < 1 || d < 1) lc::Fail(lc::ErrorCode::kInvalidInput, "m and d must be >= 1");
    std::vector<lc::LinearClassifier> hs;
    for (int i = 0; i < m; ++i) {
      hs.push_back({Eigen::Map<const lc::Vector>(w + size_t(i) * d, d), b[i]});
    }
    std::vector<double> q;
    if (weights != nullptr) q.assign(weights, weights + m);
    *out = new lc_model{lc::Mixture::Make(std::move(hs), std::move(q))};
  });
}

void lc_model_free(lc_model* model) { delete model; }

lc_status lc_model_info(const lc_model* model, lc_model_kind* kind, int* m, int* d, int* classes) {
  return Guard([&] {
    NotNull(model, "model");
    if (const auto* lin = std::get_if<lc::Mixture>(&model->mix)) {
      if (kind) *kind = LC_MODEL_LINEAR;
      if (m) *m = lin->size();
      if (d) *d = int(lin->dim());
      if (classes) *classes = 2;
    } else {
      const auto& mc = std::get<lc::MulticlassMixture>(model->mix);
      if (kind) *kind = LC_MODEL_MULTICLASS;
      if (m) *m = mc.size();
      if (d) *d = mc.dim();
      if (classes) *classes = mc.num_classes();
    }
  });
}

lc_status lc_model_to_json(const lc_model* model, char** json_out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(json_out, "json_out");
    const lc::Json j = std::visit([](const auto& mix) { return lc::ToJson(mix); }, model->mix);
    *json_out = Dup(j.dump());
  });
}

lc_status lc_point_load_file(const char* path, lc_point** out) {
  return Guard([&] {
    NotNull(path, "path");
    NotNull(out, "out");
    *out = new lc_point{lc::ParsePoint(lc::ReadJsonFile(path))};
  });
}

lc_status lc_point_from_json(const char* json, lc_point** out) {
  return Guard([&] {
    NotNull(json, "json");
    NotNull(out, "out");
    *out = new lc_point{lc::ParsePoint(lc::ParseJsonText(json, "point"))};
  });
}

lc_status lc_point_create(const double* x, int d, int y, lc_point** out) {
  return Guard([&] {
    NotNull(x, "x");
    NotNull(out, "out");
    if (d < 1) lc::Fail(lc::ErrorCode::kInvalidInput, "d must be >= 1");
    *out = new lc_point{{Eigen::Map<const lc::Vector>(x, d), y}};
  });
}

void lc_point_free(lc_point* point) { delete point; }

void lc_attack_options_init(lc_attack_options* o) {
  if (o == nullptr) return;
  *o = lc_attack_options{};
  o->attack = "lca";
  o->norm = "l2";
  o->epsilon = 1.0;
  o->order = "weight";
  o->seed = lc::kDefaultSeed;
  o->restarts = 1;
  o->surrogate = "cross-entropy";
  o->steepest = -1;
}

lc_status lc_attack(const lc_model* model, const lc_point* point, const lc_attack_options* opts,
                    lc_result** out) {
  return Guard([&] {
    NotNull(model, "model");
    NotNull(point, "point");
    NotNull(out, "out");
    lc_attack_options o;
    lc_attack_options_init(&o);
    if (opts != nullptr) o = *opts;
    if (o.restarts < 1) lc::Fail(lc::ErrorCode::kInvalidInput, "restarts must be >= 1");
    if (o.steps < 0) lc::Fail(lc::ErrorCode::kInvalidInput, "steps must be >= 0");
    if (!(o.eta >= 0.0)) lc::Fail(lc::ErrorCode::kInvalidInput, "eta must be >= 0");
    const lc::ThreatModel tm = lc::ThreatModel::Make(lc::ParseNorm(Str(o.norm, "l2")), o.epsilon);
    const std::string attack = Str(o.attack, "lca");
    lc::AttackResult r;
    if (const auto* lin = std::get_if<lc::Mixture>(&model->mix)) {
      r = AttackLinear(*lin, point->pt, tm, o, attack);
    } else {
      r = AttackMulticlass(std::get<lc::MulticlassMixture>(model->mix), point->pt, tm, o, attack);
    }
    *out = new lc_result{std::move(r)};
  });
}

void lc_result_free(lc_result* result) { delete result; }

double lc_result_error(const lc_result* result) { return result ? result->r.error : 0.0; }

long lc_result_grad_evals(const lc_result* result) { return result ? result->r.grad_evals : 0; }

int lc_result_fooled(const lc_result* result, int* indices, int cap) {
  if (result == nullptr) return 0;
  const auto idx = result->r.fooled.Indices();
  for (int i = 0; i < cap && size_t(i) < idx.size(); ++i) indices[i] = int(idx[i]);
  return int(idx.size());
}

int lc_result_delta(const lc_result* result, double* delta, int cap) {
  if (result == nullptr) return 0;
  const auto& v = result->r.delta;
  for (int i = 0; i < cap && i < v.size(); ++i) delta[i] = v[i];
  return int(v.size());
}

lc_status lc_result_to_json(const lc_result* result, int include_trace, char** json_out) {
  return Guard([&] {
    NotNull(result, "result");
    NotNull(json_out, "json_out");
    *json_out = Dup(lc::ToJson(result->r, include_trace != 0).dump());
  });
}

lc_status lc_lattice_build(const lc_model* model, const lc_point* point, const char* norm,
                           double epsilon, lc_lattice** out) {
  return Guard([&] {
    const lc::Mixture& mix = RequireLinear(model, "lattice");
    NotNull(point, "point");
    NotNull(out, "out");
    CheckPointFits(mix, point->pt);
    const lc::ThreatModel tm = lc::ThreatModel::Make(lc::ParseNorm(Str(norm, "l2")), epsilon);
    auto* l = new lc_lattice{lc::BuildLattice(mix, point->pt, tm)};
    l->maximal = lc::MaximalElements(l->lattice).size();
    *out = l;
  });
}

void lc_lattice_free(lc_lattice* lattice) { delete lattice; }

size_t lc_lattice_node_count(const lc_lattice* lattice) { return lattice ? lattice->lattice.nodes.size() : 0; }

size_t lc_lattice_maximal_count(const lc_lattice* lattice) { return lattice ? lattice->maximal : 0; }

lc_status lc_lattice_to_json(const lc_lattice* lattice, char** json_out) {
  return Guard([&] {
    NotNull(lattice, "lattice");
    NotNull(json_out, "json_out");
    *json_out = Dup(lc::ToJson(lattice->lattice).dump());
  });
}

lc_status lc_optimal_attack(const lc_model* model, const lc_point* point, const char* norm,
                            double epsilon, double* error_out, double* x_out) {
  return Guard([&] {
    const lc::Mixture& mix = RequireLinear(model, "optimal attack");
    NotNull(point, "point");
    CheckPointFits(mix, point->pt);
    const lc::ThreatModel tm = lc::ThreatModel::Make(lc::ParseNorm(Str(norm, "l2")), epsilon);
    const lc::OptimalAttack opt = lc::OptimalAttackBruteForce(mix, point->pt, tm);
    if (error_out) *error_out = opt.error;
    if (x_out) std::copy(opt.x.data(), opt.x.data() + opt.x.size(), x_out);
  });
}

lc_status lc_run_experiment(const char* name, const char* config_json,
                            const char* const* overrides, int n_overrides, const char* out_dir,
                            char** manifest_out) {
  return Guard([&] {
    NotNull(name, "name");
    NotNull(out_dir, "out_dir");
    lc::Json cfg = config_json && *config_json ? lc::ParseJsonText(config_json, "config")
                                               : lc::Json::object();
    if (!cfg.is_object()) lc::Fail(lc::ErrorCode::kInvalidInput, "config must be a JSON object");
    for (int i = 0; i < n_overrides; ++i) {
      NotNull(overrides, "overrides");
      const std::string kv = overrides[i];
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) {
        lc::Fail(lc::ErrorCode::kInvalidInput, "override must be key=value, got '" + kv + "'");
      }
      const std::string value = kv.substr(eq + 1);
      lc::Json v = lc::Json::parse(value, nullptr, false);
      cfg[kv.substr(0, eq)] = v.is_discarded() ? lc::Json(value) : v;
    }
    const lc::Json manifest = lc::RunExperiment(name, cfg, out_dir);
    if (manifest_out) *manifest_out = Dup(manifest.dump(2));
  });
}

}  // extern "C"
