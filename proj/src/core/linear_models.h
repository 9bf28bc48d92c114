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

#ifndef LATCLIMB_CORE_LINEAR_MODELS_H_
#define LATCLIMB_CORE_LINEAR_MODELS_H_

#include <span>
#include <vector>

#include "core/geometry.h"
#include "core/rng.h"
#include "core/subset.h"

namespace latclimb {

// Attack-success slack on y * f(x): a classifier counts as fooled when
// y * f(x) <= kSuccessTolerance. Absorbs round-off from ball projections.
inline constexpr double kSuccessTolerance = 1e-9;

// Binary classifier sign(w . x + b) with labels in {-1, +1}.
struct LinearClassifier {
  Vector w;
  double b = 0.0;

  double Score(const Vector& x) const { return w.dot(x) + b; }
  Eigen::Index dim() const { return w.size(); }
};

// Label tie-break: the boundary f = 0 maps to -1.
int Decide(const LinearClassifier& h, const Vector& x);

// y * f(x); positive iff h classifies (x, y) correctly.
double SignedMargin(const LinearClassifier& h, const Vector& x, int y);

// A finite mixture: classifiers plus a probability vector over them.
// Uniform weights when `weights` is empty; otherwise checks length m,
// nonnegativity and unit sum (within 1e-9).
std::vector<double> NormalizeWeights(std::vector<double> weights, size_t m);

struct Mixture {
  std::vector<LinearClassifier> classifiers;
  std::vector<double> weights;

  // Validates shapes and the simplex constraint. Empty `weights` means
  // uniform.
  static Mixture Make(std::vector<LinearClassifier> classifiers,
                      std::vector<double> weights = {});

  int size() const { return static_cast<int>(classifiers.size()); }
  Eigen::Index dim() const { return classifiers.front().dim(); }
};

struct LabeledPoint {
  Vector x;
  int y = 0;
};

void RequireBinaryLabel(int y);

struct MarginDirection {
  double margin = 0.0;
  Vector direction;  // unit lp displacement that decreases y * f fastest
};

// Closed-form lp distance from a correctly classified x to the boundary of h,
// and the steepest attack direction. Throws kContractViolation when h already
// misclassifies x.
MarginDirection MarginAndDirection(const LinearClassifier& h, const Vector& x,
                                   int y, const ThreatModel& tm);

// Classifiers with y * f_i(x) <= tau.
SubsetId FooledSet(const Mixture& mix, const Vector& x, int y,
                   double tau = kSuccessTolerance);

double SubsetMass(const Mixture& mix, SubsetId subset);
double SubsetMass(SubsetId subset, std::span<const double> weights);

// Probability mass of the classifiers that misclassify x. Uses the predicate
// y * f_i(x) <= tau, so the boundary counts as misclassified.
double ZeroOneMixture(const Mixture& mix, const Vector& x, int y, double tau = 0.0);

struct ValueGrad {
  double value = 0.0;
  Vector grad;
};

// Mean reverse hinge (1/|pool|) sum max(y f_i(x), 0) and a subgradient.
// Zero exactly when every pool member misclassifies x.
ValueGrad Srh(std::span<const LinearClassifier> pool, const Vector& x, int y);

std::vector<LinearClassifier> Select(const Mixture& mix, SubsetId subset);

// Random mixture at x = 0: w_i uniform on the unit sphere, b_i = -|N(alpha,
// beta)| with beta a standard deviation, weights softmax(z / temperature) of
// standard normals.
Mixture SampleRandomMixture(int d, int m, double alpha, double beta,
                            double temperature, Rng& rng);

}  // namespace latclimb

#endif  // LATCLIMB_CORE_LINEAR_MODELS_H_
