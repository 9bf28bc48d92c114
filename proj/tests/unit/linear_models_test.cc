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

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "core/error.h"

namespace latclimb {
namespace {

Vector V(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

LinearClassifier H(std::initializer_list<double> w, double b) { return {V(w), b}; }

TEST(Decide, BoundaryMapsToMinusOne) {
  EXPECT_EQ(Decide(H({1, 0}, -0.5), V({0, 0})), -1);
  EXPECT_EQ(Decide(H({1, 0}, -0.5), V({1, 0})), 1);
  EXPECT_EQ(Decide(H({1, 0}, 0.0), V({0, 0})), -1);
}

TEST(MarginAndDirection, KnownValues) {
  auto l2 = MarginAndDirection(H({3, 4}, 0), V({1, 0}), 1, {Norm::kL2, 1.0});
  EXPECT_NEAR(l2.margin, 0.6, 1e-15);
  EXPECT_NEAR(l2.direction(0), -0.6, 1e-15);
  EXPECT_NEAR(l2.direction(1), -0.8, 1e-15);

  auto li = MarginAndDirection(H({3, 4}, 0), V({1, 0}), 1, {Norm::kLinf, 1.0});
  EXPECT_NEAR(li.margin, 3.0 / 7.0, 1e-15);
  EXPECT_EQ(li.direction, V({-1, -1}));

  auto neg = MarginAndDirection(H({1, 0}, -0.5), V({0, 0}), -1, {Norm::kL2, 1.0});
  EXPECT_NEAR(neg.margin, 0.5, 1e-15);
  EXPECT_EQ(neg.direction, V({1, 0}));
}

TEST(MarginAndDirection, MisclassifiedPointIsContractViolation) {
  try {
    MarginAndDirection(H({1, 0}, 0.5), V({0, 0}), -1, {Norm::kL2, 1.0});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kContractViolation);
  }
}

// Stepping margin + nu along the direction crosses the boundary and stays in
// the ball for every nu in (0, eps - margin].
TEST(MarginAndDirection, StepCrossesBoundaryInsideBall) {
  Rng rng(19);
  int checked = 0;
  for (Norm norm : {Norm::kL2, Norm::kLinf}) {
    while (checked < 5000 * (norm == Norm::kL2 ? 1 : 2)) {
      const int d = 1 + int(rng.Below(6));
      LinearClassifier h{Vector(d), rng.Normal()};
      Vector x(d);
      for (int i = 0; i < d; ++i) {
        h.w(i) = rng.Normal();
        x(i) = rng.Normal();
      }
      const int y = rng.Uniform() < 0.5 ? -1 : 1;
      if (SignedMargin(h, x, y) <= 0.0) continue;
      const ThreatModel tm{norm, rng.Uniform(0.1, 4.0)};
      const auto md = MarginAndDirection(h, x, y, tm);
      if (md.margin >= tm.epsilon) continue;
      const double nu = rng.Uniform(0.0, tm.epsilon - md.margin);
      if (nu <= 0.0) continue;
      const Vector xa = x + (md.margin + nu) * md.direction;
      EXPECT_LE(SignedMargin(h, xa, y), 1e-12);
      EXPECT_LE(LpNorm(xa - x, norm), tm.epsilon + 1e-12);
      ++checked;
    }
  }
}

TEST(ZeroOneMixture, KnownValues) {
  const Vector x = V({0, 0});
  auto uniform = Mixture::Make({H({1, 0}, 0.5), H({1, 0}, -0.5)});
  EXPECT_DOUBLE_EQ(ZeroOneMixture(uniform, x, -1), 0.5);
  auto weighted = Mixture::Make({H({1, 0}, -0.5), H({1, 0}, 0.5)}, {0.7, 0.3});
  EXPECT_DOUBLE_EQ(ZeroOneMixture(weighted, x, -1), 0.3);
  auto correct = Mixture::Make({H({1, 0}, -0.5), H({0, 1}, -0.5)});
  EXPECT_DOUBLE_EQ(ZeroOneMixture(correct, x, -1), 0.0);
}

TEST(ZeroOneMixture, EqualsFooledSubsetMass) {
  Rng rng(5);
  for (int s = 0; s < 500; ++s) {
    const int m = 1 + int(rng.Below(8));
    Mixture mix = SampleRandomMixture(3, m, 0.25, 0.2, 10.0, rng);
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = rng.Normal(0, 0.3);
    const SubsetId fooled = FooledSet(mix, x, -1, 0.0);
    EXPECT_EQ(ZeroOneMixture(mix, x, -1), SubsetMass(mix, fooled));
  }
}

TEST(Mixture, Validation) {
  EXPECT_THROW(Mixture::Make({}), Error);
  EXPECT_THROW(Mixture::Make({H({1, 0}, 0), H({1}, 0)}), Error);
  EXPECT_THROW(Mixture::Make({H({0, 0}, 0)}), Error);
  EXPECT_THROW(Mixture::Make({H({1, 0}, 0)}, {0.5}), Error);
  EXPECT_THROW(Mixture::Make({H({1, 0}, 0), H({0, 1}, 0)}, {1.2, -0.2}), Error);
  EXPECT_THROW(Mixture::Make({H({1, 0}, 0)}, {0.5, 0.5}), Error);
  auto mix = Mixture::Make({H({1, 0}, 0), H({0, 1}, 0)});
  EXPECT_EQ(mix.weights, (std::vector<double>{0.5, 0.5}));
  EXPECT_THROW(RequireBinaryLabel(0), Error);
}

TEST(Srh, KnownValues) {
  std::vector<LinearClassifier> pool = {H({1, 0}, 0), H({0, 1}, 0)};
  auto vg = Srh(pool, V({1, 2}), 1);
  EXPECT_DOUBLE_EQ(vg.value, 1.5);
  EXPECT_EQ(vg.grad, V({0.5, 0.5}));

  auto fooled = Srh(pool, V({-1, -2}), 1);
  EXPECT_EQ(fooled.value, 0.0);
  EXPECT_EQ(fooled.grad, V({0, 0}));
}

TEST(Srh, ConvexAlongSegments) {
  Rng rng(23);
  for (int s = 0; s < 2000; ++s) {
    const int m = 1 + int(rng.Below(5));
    Mixture mix = SampleRandomMixture(4, m, 0.25, 0.2, 10.0, rng);
    Vector a(4), b(4);
    for (int i = 0; i < 4; ++i) {
      a(i) = rng.Normal();
      b(i) = rng.Normal();
    }
    const double t = rng.Uniform();
    const int y = rng.Uniform() < 0.5 ? -1 : 1;
    const double mid = Srh(mix.classifiers, t * a + (1 - t) * b, y).value;
    const double chord =
        t * Srh(mix.classifiers, a, y).value + (1 - t) * Srh(mix.classifiers, b, y).value;
    EXPECT_LE(mid, chord + 1e-12);
  }
}

// Away from kinks the subgradient is the gradient.
TEST(Srh, MatchesFiniteDifferences) {
  Rng rng(29);
  const double h = 1e-6;
  int checked = 0;
  while (checked < 500) {
    Mixture mix = SampleRandomMixture(3, 4, 0.25, 0.2, 10.0, rng);
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = rng.Normal(0, 0.5);
    bool near_kink = false;
    for (const auto& c : mix.classifiers) near_kink |= std::abs(c.Score(x)) < 1e-3;
    if (near_kink) continue;
    auto vg = Srh(mix.classifiers, x, -1);
    for (int i = 0; i < 3; ++i) {
      Vector e = Vector::Zero(3);
      e(i) = h;
      const double fd =
          (Srh(mix.classifiers, x + e, -1).value - Srh(mix.classifiers, x - e, -1).value) /
          (2 * h);
      EXPECT_NEAR(vg.grad(i), fd, 1e-7);
    }
    ++checked;
  }
}

TEST(SampleRandomMixture, Construction) {
  Rng rng(31);
  for (int s = 0; s < 200; ++s) {
    Mixture mix = SampleRandomMixture(7, 5, 0.25, 0.2, 10.0, rng);
    double total = 0.0;
    for (int i = 0; i < mix.size(); ++i) {
      EXPECT_NEAR(mix.classifiers[i].w.norm(), 1.0, 1e-12);
      EXPECT_LE(mix.classifiers[i].b, 0.0);
      EXPECT_GT(mix.weights[i], 0.0);
      total += mix.weights[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(SampleRandomMixture, DeterministicPerStream) {
  Rng a = Rng::Stream(42, {1, 2});
  Rng b = Rng::Stream(42, {1, 2});
  Mixture ma = SampleRandomMixture(5, 3, 0.25, 0.2, 10.0, a);
  Mixture mb = SampleRandomMixture(5, 3, 0.25, 0.2, 10.0, b);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(ma.classifiers[i].w, mb.classifiers[i].w);
    EXPECT_EQ(ma.classifiers[i].b, mb.classifiers[i].b);
  }
  EXPECT_EQ(ma.weights, mb.weights);
}

TEST(SampleRandomMixture, RejectsInvalidParameters) {
  Rng rng(1);
  EXPECT_THROW(SampleRandomMixture(0, 2, 0.25, 0.2, 10, rng), Error);
  EXPECT_THROW(SampleRandomMixture(2, 0, 0.25, 0.2, 10, rng), Error);
  EXPECT_THROW(SampleRandomMixture(2, 2, 0.25, 0.0, 10, rng), Error);
  EXPECT_THROW(SampleRandomMixture(2, 2, 0.25, 0.2, 0.0, rng), Error);
}

// Mean of -b against the folded-normal first moment, within three standard
// errors.
TEST(SampleRandomMixture, FoldedNormalMean) {
  const double alpha = 0.25, beta = 0.05;
  Rng rng(37);
  const int draws = 100000, per_call = 50;
  double sum = 0.0;
  for (int c = 0; c < draws / per_call; ++c) {
    Mixture mix = SampleRandomMixture(1, per_call, alpha, beta, 10.0, rng);
    for (const auto& h : mix.classifiers) sum += -h.b;
  }
  const double mean = sum / draws;
  const double phi = 0.5 * std::erfc(alpha / beta / std::numbers::sqrt2);
  const double mu_f = beta * std::sqrt(2.0 / std::numbers::pi) *
                          std::exp(-alpha * alpha / (2 * beta * beta)) +
                      alpha * (1 - 2 * phi);
  const double var_f = alpha * alpha + beta * beta - mu_f * mu_f;
  EXPECT_NEAR(mean, mu_f, 3.0 * std::sqrt(var_f / draws));
}

}  // namespace
}  // namespace latclimb
