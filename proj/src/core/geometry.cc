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

#include "core/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.h"

namespace latclimb {

namespace {

void RequireFinite(const Vector& v, const char* what) {
  if (!v.allFinite()) {
    Fail(ErrorCode::kInvalidInput, std::string(what) + " has non-finite components");
  }
}

}  // namespace

const char* NormName(Norm norm) { return norm == Norm::kL2 ? "l2" : "linf"; }

Norm ParseNorm(const std::string& name) {
  if (name == "l2" || name == "2") return Norm::kL2;
  if (name == "linf" || name == "inf") return Norm::kLinf;
  Fail(ErrorCode::kInvalidInput, "unsupported norm '" + name + "' (use l2 or linf)");
}

ThreatModel ThreatModel::Make(Norm norm, double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    Fail(ErrorCode::kInvalidInput, "epsilon must be finite and non-negative");
  }
  return ThreatModel{norm, epsilon};
}

double LpNorm(const Vector& v, Norm norm) {
  RequireFinite(v, "vector");
  if (v.size() == 0) return 0.0;
  return norm == Norm::kL2 ? v.norm() : v.cwiseAbs().maxCoeff();
}

double DualNorm(const Vector& v, Norm norm) {
  RequireFinite(v, "vector");
  return norm == Norm::kL2 ? v.norm() : v.cwiseAbs().sum();
}

bool InBall(const Vector& v, const Vector& center, const ThreatModel& tm,
            double slack) {
  return LpNorm(v - center, tm.norm) <= tm.epsilon + slack;
}

Vector ProjectBall(const Vector& v, const Vector& center, const ThreatModel& tm) {
  if (v.size() != center.size()) {
    Fail(ErrorCode::kInvalidInput, "projection: dimension mismatch");
  }
  RequireFinite(v, "projected point");
  const double eps = tm.epsilon;
  if (tm.norm == Norm::kLinf) {
    Vector out = v;
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      const double lo = center[j] - eps;
      const double hi = center[j] + eps;
      double value = std::clamp(v[j], lo, hi);
      while (std::abs(value - center[j]) > eps) {
        value = std::nextafter(value, center[j]);
      }
      out[j] = value;
    }
    return out;
  }
  const Vector offset = v - center;
  const double n = offset.norm();
  if (n <= eps) return v;
  double scale = eps / n;
  Vector out = center + scale * offset;
  while ((out - center).norm() > eps) {
    scale = std::nextafter(scale, 0.0);
    out = center + scale * offset;
  }
  return out;
}

const char* StepModeName(StepMode mode) {
  return mode == StepMode::kRaw ? "raw" : "steepest";
}

Vector SteepestUnit(const Vector& g, Norm norm) {
  if (norm == Norm::kLinf) {
    return g.unaryExpr([](double c) { return double((c > 0) - (c < 0)); });
  }
  const double n = g.norm();
  if (n == 0.0) return Vector::Zero(g.size());
  return g / n;
}

Vector DescentStep(const Vector& grad, double eta, const ThreatModel& tm,
                   StepMode mode) {
  RequireFinite(grad, "gradient");
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    Fail(ErrorCode::kInvalidInput, "step size must be positive");
  }
  if (mode == StepMode::kRaw) return -eta * grad;
  return -eta * SteepestUnit(grad, tm.norm);
}

Vector SampleBall(const Vector& center, const ThreatModel& tm, Rng& rng) {
  const Eigen::Index d = center.size();
  Vector u(d);
  if (tm.norm == Norm::kLinf) {
    for (Eigen::Index j = 0; j < d; ++j) u[j] = rng.Uniform(-tm.epsilon, tm.epsilon);
    return ProjectBall(center + u, center, tm);
  }
  double n = 0.0;
  do {
    for (Eigen::Index j = 0; j < d; ++j) u[j] = rng.Normal();
    n = u.norm();
  } while (n == 0.0);
  const double radius = tm.epsilon * std::pow(rng.Uniform(), 1.0 / double(d));
  return ProjectBall(center + u * (radius / n), center, tm);
}

}  // namespace latclimb
