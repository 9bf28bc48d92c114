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

#include "core/attacks_linear.h"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "core/error.h"

namespace latclimb {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  const double s = std::chrono::duration<double>(Clock::now() - start).count();
  return std::max(s, 1e-9);
}

void CheckInputs(const Mixture& mix, const LabeledPoint& pt) {
  if (pt.x.size() != mix.dim()) Fail(ErrorCode::kInvalidInput, "point dimension mismatch");
  RequireBinaryLabel(pt.y);
}

void Finish(const Mixture& mix, const LabeledPoint& pt, const Vector& x_adv,
            AttackResult* r) {
  r->delta = x_adv - pt.x;
  r->fooled = FooledSet(mix, x_adv, pt.y, r->tolerance);
  r->error = SubsetMass(mix, r->fooled);
}

AttackResult CleanResult(const Mixture& mix, const LabeledPoint& pt) {
  AttackResult r;
  r.tolerance = kSuccessTolerance;
  Finish(mix, pt, pt.x, &r);
  r.pool = r.fooled;
  r.clean_error = r.error;
  return r;
}

}  // namespace

std::vector<size_t> WeightOrder(std::span<const double> weights) {
  std::vector<size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return weights[a] > weights[b]; });
  return order;
}

std::vector<size_t> RandomOrder(int m, Rng& rng) {
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  for (int i = m - 1; i > 0; --i) std::swap(order[i], order[rng.Below(i + 1)]);
  return order;
}

void ValidateOrder(std::span<const size_t> order, int m) {
  std::vector<bool> seen(m, false);
  if (order.size() != size_t(m)) {
    Fail(ErrorCode::kInvalidInput, "order must list each of the " + std::to_string(m) +
                                       " classifiers exactly once");
  }
  for (size_t i : order) {
    if (i >= size_t(m) || seen[i]) {
      Fail(ErrorCode::kInvalidInput, "order is not a permutation of 0.." + std::to_string(m - 1));
    }
    seen[i] = true;
  }
}

AttackResult EolPgdLinear(const Mixture& mix, const LabeledPoint& pt,
                          const ThreatModel& tm, const PgdConfig& cfg) {
  CheckInputs(mix, pt);
  const auto start = Clock::now();
  AttackResult r = CleanResult(mix, pt);
  if (tm.epsilon == 0.0) {
    r.wall_time = Seconds(start);
    return r;
  }
  const auto objective = [&](const Vector& x, bool need_grad) {
    ValueGrad out{0.0, Vector::Zero(x.size())};
    for (int i = 0; i < mix.size(); ++i) {
      const auto& h = mix.classifiers[i];
      const double s = SignedMargin(h, x, pt.y);
      if (s > 0.0) {
        out.value += mix.weights[i] * s;
        if (need_grad) out.grad += (mix.weights[i] * pt.y) * h.w;
      }
    }
    return out;
  };
  Vector best = pt.x;
  double best_error = r.clean_error;
  const auto observer = [&](const Vector& x, double) {
    const double e = SubsetMass(mix, FooledSet(mix, x, pt.y, r.tolerance));
    r.trace.push_back(e);
    if (e > best_error) {
      best_error = e;
      best = x;
    }
  };
  PgdConfig run = cfg;
  run.stop_at_zero = false;
  const PgdOutcome out = PgdMinimize(objective, pt.x, pt.x, tm, run, observer);
  r.iterations = out.iterations;
  r.grad_evals = out.gradient_calls * mix.size();
  Finish(mix, pt, best, &r);
  r.pool = r.fooled;
  r.wall_time = Seconds(start);
  return r;
}

AttackResult ArcLinear(const Mixture& mix, const LabeledPoint& pt,
                       const ThreatModel& tm, std::span<const size_t> order,
                       const ArcOptions& opts) {
  CheckInputs(mix, pt);
  ValidateOrder(order, mix.size());
  const auto start = Clock::now();
  AttackResult r = CleanResult(mix, pt);
  if (tm.epsilon == 0.0) {
    r.wall_time = Seconds(start);
    return r;
  }
  const double nu = opts.overshoot * tm.epsilon;
  Vector current = pt.x;
  double current_error = r.clean_error;
  for (size_t i : order) {
    const auto& h = mix.classifiers[i];
    if (SignedMargin(h, current, pt.y) <= r.tolerance) continue;
    const MarginDirection md = MarginAndDirection(h, current, pt.y, tm);
    ++r.grad_evals;
    ++r.iterations;
    const Vector step = (md.margin + nu) * md.direction;
    Vector candidate;
    if (opts.candidate == ArcCandidate::kProjected) {
      candidate = ProjectBall(current + step, pt.x, tm);
    } else {
      const Vector v = (current - pt.x) + step;
      const double n = LpNorm(v, tm.norm);
      const Vector scaled = n > 0.0 ? Vector(v * (tm.epsilon / n))
                                    : Vector(tm.epsilon * md.direction);
      candidate = ProjectBall(pt.x + scaled, pt.x, tm);
    }
    const double e = SubsetMass(mix, FooledSet(mix, candidate, pt.y, r.tolerance));
    if (e > current_error) {
      current = candidate;
      current_error = e;
    }
    r.trace.push_back(current_error);
  }
  Finish(mix, pt, current, &r);
  r.pool = r.fooled;
  r.wall_time = Seconds(start);
  return r;
}

AttackResult LcaLinear(const Mixture& mix, const LabeledPoint& pt,
                       const ThreatModel& tm, const PgdConfig& cfg,
                       std::span<const size_t> order) {
  CheckInputs(mix, pt);
  ValidateOrder(order, mix.size());
  const auto start = Clock::now();
  AttackResult r = CleanResult(mix, pt);
  r.pool = SubsetId();
  if (tm.epsilon == 0.0) {
    r.wall_time = Seconds(start);
    return r;
  }
  PgdConfig run = cfg;
  run.stop_at_zero = true;
  Vector current = pt.x;
  SubsetId pool;
  for (size_t i : order) {
    const SubsetId trial = pool.With(i);
    const std::vector<LinearClassifier> members = Select(mix, trial);
    const auto objective = [&](const Vector& x, bool) { return Srh(members, x, pt.y); };
    const PgdOutcome out = PgdMinimize(objective, current, pt.x, tm, run);
    r.grad_evals += out.gradient_calls * long(members.size());
    r.iterations += out.iterations;
    bool success = true;
    for (const auto& h : members) {
      if (SignedMargin(h, out.x_best, pt.y) > r.tolerance) {
        success = false;
        break;
      }
    }
    if (success) {
      current = out.x_best;
      pool = trial;
    }
    r.trace.push_back(SubsetMass(mix, FooledSet(mix, current, pt.y, r.tolerance)));
    r.pool_trace.push_back(pool);
  }
  Finish(mix, pt, current, &r);
  r.pool = pool;
  r.wall_time = Seconds(start);
  return r;
}

}  // namespace latclimb
