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

#ifndef LATCLIMB_CORE_PGD_H_
#define LATCLIMB_CORE_PGD_H_

#include <functional>
#include <vector>

#include "core/geometry.h"
#include "core/linear_models.h"

namespace latclimb {

struct PgdConfig {
  int steps = 200;
  double eta = 0.0707;
  StepMode mode = StepMode::kRaw;
  // Iterations (0-based) at which the step size is halved.
  std::vector<int> halve_at;
  // Stop as soon as the objective reaches zero.
  bool stop_at_zero = false;

  void Validate() const;
  double StepSizeAt(int iteration) const;

  // Keeps eta for the first half of the run, then halves it `count` times at
  // evenly spaced iterations.
  void SetLateHalving(int count = 6);

  // T = multiplier * max(2 m^2, 200), raised if needed so that
  // T > epsilon^2 m^2, and eta = epsilon / sqrt(T).
  static PgdConfig ForMixture(int m, double epsilon, int multiplier = 1);
};

// Value (and, when requested, a subgradient) of the objective at x.
using Objective = std::function<ValueGrad(const Vector& x, bool need_grad)>;
using IterateObserver = std::function<void(const Vector& x, double value)>;

struct PgdOutcome {
  Vector x_best;
  double value_best = 0.0;
  int iterations = 0;
  // Number of objective evaluations that produced a gradient.
  long gradient_calls = 0;
};

// Projected (sub)gradient descent over B_p(center, epsilon) starting at x0.
// Returns the iterate with the smallest objective value seen, not the last
// one. Every iterate, including x0 and the final point, is reported to
// `observer`. Exactly `steps` gradient evaluations are made unless
// `stop_at_zero` triggers.
PgdOutcome PgdMinimize(const Objective& objective, const Vector& x0,
                       const Vector& center, const ThreatModel& tm,
                       const PgdConfig& cfg, const IterateObserver& observer = {});

}  // namespace latclimb

#endif  // LATCLIMB_CORE_PGD_H_
