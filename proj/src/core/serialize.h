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

#ifndef LATCLIMB_CORE_SERIALIZE_H_
#define LATCLIMB_CORE_SERIALIZE_H_

#include <string>

#include <json.hpp>

#include "core/attack_result.h"
#include "core/lattice_oracle.h"
#include "core/linear_models.h"
#include "core/multiclass.h"

namespace latclimb {

using Json = nlohmann::json;

// Malformed documents raise ErrorCode::kParse naming the offending field.
Mixture ParseMixture(const Json& j);
Json ToJson(const Mixture& mix);

MlpModel ParseMlp(const Json& j, const std::string& where = "model");
Json ToJson(const MlpModel& model);
// {"models":[...],"weights":[...]} or a single {"layers":...} model.
MulticlassMixture ParseMulticlassMixture(const Json& j);
// Every model must be an MlpModel.
Json ToJson(const MulticlassMixture& mix);

enum class ModelKind { kLinear, kMulticlass };
ModelKind DetectModelKind(const Json& j);

// {"x":[...],"y":label}
LabeledPoint ParsePoint(const Json& j);
Json ToJson(const LabeledPoint& pt);

Json ToJson(const AttackResult& r, bool include_trace = false);
Json ToJson(const AdversarialLattice& lattice);

Json ParseJsonText(const std::string& text, const std::string& source);
Json ReadJsonFile(const std::string& path);
std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& content);

}  // namespace latclimb

#endif  // LATCLIMB_CORE_SERIALIZE_H_
