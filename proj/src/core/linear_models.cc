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

#include "core/linear_models.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "core/error.h"

namespace latclimb {

int Decide(const LinearClassifier& h, const Vector& x) {
  if (x.size() != h.dim()) Fail(ErrorCode::kInvalidInput, "decide: dimension mismatch");
  return h.Score(x) > 0.0 ? 1 : -1;
}

double SignedMargin(const LinearClassifier& h, const Vector& x, int y) {
  return y * h.Score(x);
}

void RequireBinaryLabel(int y) {
  if (y != 1 && y != -1) {
    Fail(ErrorCode::kInvalidInput, "binary label must be -1 or +1, got " + std::to_string(y));
  }
}

std::vector<double> NormalizeWeights(std::vector<double> weights, size_t m) {
  if (weights.empty()) weights.assign(m, 1.0 / double(m));
  if (weights.size() != m) {
    Fail(ErrorCode::kInvalidInput, "weights length " + std::to_string(weights.size()) +
                                       " does not match member count " +
                                       std::to_string(m));
  }
  double total = 0.0;
  for (double q : weights) {
    if (!std::isfinite(q) || q < 0.0) Fail(ErrorCode::kInvalidInput, "weights must be >= 0");
    total += q;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(ErrorCode::kInvalidInput, "weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  return weights;
}

Mixture Mixture::Make(std::vector<LinearClassifier> classifiers,
                      std::vector<double> weights) {
  const size_t m = classifiers.size();
  if (m == 0) Fail(ErrorCode::kInvalidInput, "mixture needs at least one classifier");
  if (m > size_t(kMaxMixtureSize)) {
    Fail(ErrorCode::kResourceLimit,
         "mixtures are limited to " + std::to_string(kMaxMixtureSize) + " classifiers");
  }
  const Eigen::Index d = classifiers.front().dim();
  if (d == 0) Fail(ErrorCode::kInvalidInput, "classifier weight vector is empty");
  for (size_t i = 0; i < m; ++i) {
    const auto& h = classifiers[i];
    if (h.dim() != d) {
      Fail(ErrorCode::kInvalidInput, "classifier " + std::to_string(i) + " has dimension " +
                                         std::to_string(h.dim()) + ", expected " +
                                         std::to_string(d));
    }
    if (!h.w.allFinite() || !std::isfinite(h.b)) {
      Fail(ErrorCode::kInvalidInput, "classifier " + std::to_string(i) + " is not finite");
    }
    if (h.w.isZero(0.0)) {
      Fail(ErrorCode::kInvalidInput, "classifier " + std::to_string(i) + " has w = 0");
    }
  }
  weights = NormalizeWeights(std::move(weights), m);
  return Mixture{std::move(classifiers), std::move(weights)};
}

MarginDirection MarginAndDirection(const LinearClassifier& h, const Vector& x,
                                   int y, const ThreatModel& tm) {
  if (x.size() != h.dim()) Fail(ErrorCode::kInvalidInput, "margin: dimension mismatch");
  const double signed_margin = SignedMargin(h, x, y);
  if (!(signed_margin > 0.0)) {
    Fail(ErrorCode::kContractViolation, "margin: point is already misclassified");
  }
  MarginDirection out;
  out.margin = signed_margin / DualNorm(h.w, tm.norm);
  out.direction = SteepestUnit(-double(y) * h.w, tm.norm);
  return out;
}

SubsetId FooledSet(const Mixture& mix, const Vector& x, int y, double tau) {
  SubsetId s;
  for (int i = 0; i < mix.size(); ++i) {
    if (SignedMargin(mix.classifiers[i], x, y) <= tau) s = s.With(i);
  }
  return s;
}

double SubsetMass(SubsetId subset, std::span<const double> weights) {
  double mass = 0.0;
  for (size_t i : subset.Indices()) mass += weights[i];
  return mass;
}

double SubsetMass(const Mixture& mix, SubsetId subset) { return SubsetMass(subset, mix.weights); }

double ZeroOneMixture(const Mixture& mix, const Vector& x, int y, double tau) {
  if (x.size() != mix.dim()) Fail(ErrorCode::kInvalidInput, "zero-one: dimension mismatch");
  return SubsetMass(mix, FooledSet(mix, x, y, tau));
}

ValueGrad Srh(std::span<const LinearClassifier> pool, const Vector& x, int y) {
  if (pool.empty()) Fail(ErrorCode::kInvalidInput, "SRH of an empty pool");
  ValueGrad out{0.0, Vector::Zero(x.size())};
  for (const auto& h : pool) {
    const double s = SignedMargin(h, x, y);
    if (s > 0.0) {
      out.value += s;
      out.grad += double(y) * h.w;
    }
  }
  const double inv = 1.0 / double(pool.size());
  out.value *= inv;
  out.grad *= inv;
  return out;
}

std::vector<LinearClassifier> Select(const Mixture& mix, SubsetId subset) {
  std::vector<LinearClassifier> out;
  for (size_t i : subset.Indices()) out.push_back(mix.classifiers[i]);
  return out;
}

Mixture SampleRandomMixture(int d, int m, double alpha, double beta,
                            double temperature, Rng& rng) {
  if (d < 1 || m < 1) Fail(ErrorCode::kInvalidInput, "sampler: d and m must be >= 1");
  if (!(beta > 0.0)) Fail(ErrorCode::kInvalidInput, "sampler: beta must be > 0");
  if (!(temperature > 0.0)) Fail(ErrorCode::kInvalidInput, "sampler: temperature must be > 0");
  std::vector<LinearClassifier> classifiers(m);
  for (auto& h : classifiers) {
    h.w.resize(d);
    double n = 0.0;
    do {
      for (int j = 0; j < d; ++j) h.w[j] = rng.Normal();
      n = h.w.norm();
    } while (n == 0.0);
    h.w /= n;
    h.b = -std::abs(rng.Normal(alpha, beta));
  }
  std::vector<double> z(m);
  for (double& v : z) v = rng.Normal() / temperature;
  const double zmax = *std::max_element(z.begin(), z.end());
  std::vector<double> weights(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) total += weights[i] = std::exp(z[i] - zmax);
  for (double& q : weights) q /= total;
  return Mixture::Make(std::move(classifiers), std::move(weights));
}

}  // namespace latclimb
