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

#ifndef LATCLIMB_CORE_GEOMETRY_H_
#define LATCLIMB_CORE_GEOMETRY_H_

#include <string>

#include <Eigen/Core>

#include "core/rng.h"

namespace latclimb {

using Vector = Eigen::VectorXd;

enum class Norm { kL2, kLinf };

const char* NormName(Norm norm);
Norm ParseNorm(const std::string& name);

// The admissible perturbation set B_p(x, epsilon) for p in {2, inf}.
//
// A zero budget is accepted and denotes the degenerate ball {x}; attacks
// short-circuit on it and report the clean error.
struct ThreatModel {
  Norm norm = Norm::kL2;
  double epsilon = 1.0;

  static ThreatModel Make(Norm norm, double epsilon);
};

// ||v||_p. Throws on non-finite components.
double LpNorm(const Vector& v, Norm norm);

// The dual norm ||v||_{p*}: l2 is self-dual, the dual of linf is l1.
double DualNorm(const Vector& v, Norm norm);

// Nearest point to `v` in B_p(center, epsilon). The result is guaranteed to
// pass the membership test LpNorm(result - center) <= epsilon as computed in
// floating point, which makes the projection exactly idempotent.
Vector ProjectBall(const Vector& v, const Vector& center, const ThreatModel& tm);

bool InBall(const Vector& v, const Vector& center, const ThreatModel& tm,
            double slack = 0.0);

enum class StepMode { kRaw, kSteepest };

const char* StepModeName(StepMode mode);

// Displacement for one descent step on an objective with gradient `grad`.
// Raw: -eta * grad. Steepest: the lp steepest-descent direction scaled to
// length eta (sign step for linf, normalized gradient for l2; zero when the
// gradient vanishes).
Vector DescentStep(const Vector& grad, double eta, const ThreatModel& tm,
                   StepMode mode);

// Unit-lp vector u maximizing <g, u>.
Vector SteepestUnit(const Vector& g, Norm norm);

// Uniform sample from B_p(center, epsilon).
Vector SampleBall(const Vector& center, const ThreatModel& tm, Rng& rng);

}  // namespace latclimb

#endif  // LATCLIMB_CORE_GEOMETRY_H_
