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

#ifndef LATCLIMB_CORE_ATTACKS_LINEAR_H_
#define LATCLIMB_CORE_ATTACKS_LINEAR_H_

#include <span>
#include <vector>

#include "core/attack_result.h"
#include "core/geometry.h"
#include "core/linear_models.h"
#include "core/pgd.h"
#include "core/rng.h"
#include "core/subset.h"

namespace latclimb {

// Decreasing weight, ties by index.
std::vector<size_t> WeightOrder(std::span<const double> weights);
std::vector<size_t> RandomOrder(int m, Rng& rng);
void ValidateOrder(std::span<const size_t> order, int m);

// EOL-PGD with the weighted reverse hinge sum_i q_i max(y f_i, 0) as the
// surrogate. Runs exactly cfg.steps iterations (grad_evals = steps * m) and
// returns the iterate with the highest mixture error.
AttackResult EolPgdLinear(const Mixture& mix, const LabeledPoint& pt,
                          const ThreatModel& tm, const PgdConfig& cfg);

enum class ArcCandidate {
  // Rescale delta + step to the full budget: x + eps (delta + s g) / ||.||_p.
  kFullBudget,
  // Project x_cur + step onto the ball.
  kProjected,
};

struct ArcOptions {
  // Overshoot past the boundary, relative to epsilon.
  double overshoot = 1e-6;
  ArcCandidate candidate = ArcCandidate::kFullBudget;
};

// Greedy per-classifier attack: for each classifier not yet fooled, step to
// its boundary along the closed-form direction and keep the candidate only
// if the mixture error strictly increases.
AttackResult ArcLinear(const Mixture& mix, const LabeledPoint& pt,
                       const ThreatModel& tm, std::span<const size_t> order,
                       const ArcOptions& opts = {});

// Lattice climber: grows a pool of jointly fooled classifiers. Each candidate
// joins if PGD on SRH(pool + candidate), started at the current point, ends
// with every pool member fooled; otherwise the pool and point are kept.
AttackResult LcaLinear(const Mixture& mix, const LabeledPoint& pt,
                       const ThreatModel& tm, const PgdConfig& cfg,
                       std::span<const size_t> order);

}  // namespace latclimb

#endif  // LATCLIMB_CORE_ATTACKS_LINEAR_H_
