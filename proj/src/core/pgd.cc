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

#include "core/pgd.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/error.h"

namespace latclimb {

void PgdConfig::Validate() const {
  if (steps < 1) Fail(ErrorCode::kInvalidInput, "PGD needs at least one step");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    Fail(ErrorCode::kInvalidInput, "PGD step size must be positive");
  }
}

double PgdConfig::StepSizeAt(int iteration) const {
  double e = eta;
  for (int t : halve_at) {
    if (iteration >= t) e *= 0.5;
  }
  return e;
}

void PgdConfig::SetLateHalving(int count) {
  halve_at.clear();
  for (int k = 0; k < count; ++k) halve_at.push_back(steps / 2 + k * steps / (2 * count));
}

PgdConfig PgdConfig::ForMixture(int m, double epsilon, int multiplier) {
  Require(multiplier >= 1, "PGD step multiplier must be >= 1");
  PgdConfig cfg;
  cfg.steps = multiplier * std::max(2 * m * m, 200);
  const double bound = epsilon * epsilon * double(m) * double(m);
  if (double(cfg.steps) <= bound) cfg.steps = int(std::floor(bound)) + 1;
  cfg.eta = epsilon / std::sqrt(double(cfg.steps));
  return cfg;
}

PgdOutcome PgdMinimize(const Objective& objective, const Vector& x0,
                       const Vector& center, const ThreatModel& tm,
                       const PgdConfig& cfg, const IterateObserver& observer) {
  cfg.Validate();
  if (x0.size() != center.size()) Fail(ErrorCode::kInvalidInput, "PGD: dimension mismatch");
  if (!InBall(x0, center, tm, 1e-12)) {
    Fail(ErrorCode::kInvalidInput, "PGD: starting point lies outside the ball");
  }
  PgdOutcome out;
  out.x_best = x0;
  out.value_best = std::numeric_limits<double>::infinity();

  auto record = [&](const Vector& x, double value) {
    if (observer) observer(x, value);
    if (value < out.value_best) {
      out.value_best = value;
      out.x_best = x;
    }
  };

  Vector x = x0;
  for (int t = 0; t < cfg.steps; ++t) {
    ValueGrad vg = objective(x, true);
    ++out.gradient_calls;
    record(x, vg.value);
    if (cfg.stop_at_zero && vg.value <= 0.0) return out;
    x = ProjectBall(x + DescentStep(vg.grad, cfg.StepSizeAt(t), tm, cfg.mode), center, tm);
    ++out.iterations;
  }
  record(x, objective(x, false).value);
  return out;
}

}  // namespace latclimb
