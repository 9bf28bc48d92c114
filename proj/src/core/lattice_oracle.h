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

#ifndef LATCLIMB_CORE_LATTICE_ORACLE_H_
#define LATCLIMB_CORE_LATTICE_ORACLE_H_

#include <span>
#include <vector>

#include "core/geometry.h"
#include "core/linear_models.h"
#include "core/subset.h"

namespace latclimb {

// Exhaustive lattice routines enumerate up to 2^m subsets.
inline constexpr int kMaxLatticeClassifiers = 20;

struct FeasibilityOptions {
  double tol = 1e-9;
  long max_sweeps = 1'000'000;
};

// Outcome of deciding whether the closed vulnerability regions of a subset
// intersect inside the ball.
struct FeasibilityResult {
  bool feasible = false;
  // l2: distance from x to the joint vulnerability region (an upper bound
  // when feasible, a certified lower bound when infeasible). linf: lp norm of
  // the witness when feasible, +inf when infeasible.
  double distance = 0.0;
  // Point in the ball fooling every member of the subset (feasible only).
  Vector witness;
  // |distance - epsilon| < 10 tol, or the exact solver hit its sweep cap.
  bool degenerate = false;
  bool used_pgd = false;
  long sweeps = 0;
};

// Decides whether some x' in B_p(x, epsilon) has y f_i(x') <= 0 for all i in
// `subset`. Exact dual coordinate ascent (cyclic half-space projections) on
// the distance problem; falls back to the SRH-PGD path on the sweep cap.
FeasibilityResult AtLeastFeasible(SubsetId subset, const Mixture& mix,
                                  const LabeledPoint& pt, const ThreatModel& tm,
                                  const FeasibilityOptions& opts = {});

// Independent route: minimizes SRH over the ball by projected gradient descent
// with T > epsilon^2 k^2 steps of size epsilon / sqrt(T), and declares the
// subset feasible iff the best iterate fools all k members within tol.
FeasibilityResult AtLeastFeasiblePgd(SubsetId subset, const Mixture& mix,
                                     const LabeledPoint& pt, const ThreatModel& tm,
                                     const FeasibilityOptions& opts = {});

struct LatticeNode {
  SubsetId subset;
  Vector witness;
  double mass = 0.0;
};

// Subsets whose closed vulnerability regions intersect in the ball, plus the
// empty set. Downward closed; nodes are listed by increasing cardinality.
struct AdversarialLattice {
  int m = 0;
  std::vector<LatticeNode> nodes;
  bool degenerate = false;

  bool Contains(SubsetId s) const;
  std::vector<SubsetId> Subsets() const;
};

AdversarialLattice BuildLattice(const Mixture& mix, const LabeledPoint& pt,
                                const ThreatModel& tm,
                                const FeasibilityOptions& opts = {});

// Nodes with no strict superset among `nodes`; {empty} if that is the only
// node. Sorted by bitmask.
std::vector<SubsetId> MaximalElements(std::span<const SubsetId> nodes);
std::vector<SubsetId> MaximalElements(const AdversarialLattice& lattice);

struct OptimalAttack {
  Vector x;
  double error = 0.0;
  SubsetId subset;
  bool degenerate = false;
};

// Exact optimal attack by enumeration in decreasing order of weight mass
// (ties: smaller bitmask first); the first feasible subset is optimal.
// Exponential in m.
OptimalAttack OptimalAttackBruteForce(const Mixture& mix, const LabeledPoint& pt,
                                      const ThreatModel& tm,
                                      const FeasibilityOptions& opts = {});

}  // namespace latclimb

#endif  // LATCLIMB_CORE_LATTICE_ORACLE_H_
