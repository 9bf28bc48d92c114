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

#ifndef LATCLIMB_CORE_ATTACK_RESULT_H_
#define LATCLIMB_CORE_ATTACK_RESULT_H_

#include <vector>

#include "core/geometry.h"
#include "core/subset.h"

namespace latclimb {

struct AttackResult {
  Vector delta;
  // Classifiers fooled at x + delta: y f <= tolerance (binary) or a rival
  // score at least the true one (multiclass).
  SubsetId fooled;
  // LCA: the final pool. Other attacks: equal to `fooled`.
  SubsetId pool;
  // Mixture zero-one error at x + delta; equals the mass of `fooled`.
  double error = 0.0;
  double clean_error = 0.0;
  // Per-classifier gradient (or closed-form margin) evaluations.
  long grad_evals = 0;
  int iterations = 0;
  double wall_time = 0.0;
  // Slack accepted by the binary success predicate; 0 for multiclass.
  double tolerance = 0.0;
  // Accepted mixture error after each outer step (greedy attacks, LCA) or
  // each PGD iterate (EOL-PGD, LOE-PGD).
  std::vector<double> trace;
  // Pool after each outer step (LCA only).
  std::vector<SubsetId> pool_trace;
};

}  // namespace latclimb

#endif  // LATCLIMB_CORE_ATTACK_RESULT_H_
