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


#include "core/lattice_oracle.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "core/error.h"
#include "core/experiments.h"
#include "core/serialize.h"

namespace latclimb {
namespace {

const std::string kFixtures = LATCLIMB_FIXTURE_DIR;

Mixture LoadMixture(const std::string& name) {
  return ParseMixture(ReadJsonFile(kFixtures + "/" + name));
}

LabeledPoint Origin(int d = 2) { return {Vector::Zero(d), -1}; }

std::vector<SubsetId> Sets(std::initializer_list<std::vector<size_t>> lists) {
  std::vector<SubsetId> out;
  for (const auto& l : lists) out.push_back(SubsetId::Of(l));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SubsetId> Sorted(std::vector<SubsetId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

const ThreatModel kL2{Norm::kL2, 1.0};

TEST(AtLeastFeasible, TwoPlanesAt60Degrees) {
  auto r = AtLeastFeasible(SubsetId::Full(2), AngleMixture(60, 0.7), Origin(), kL2);
  const double exact = 0.7 / std::cos(std::numbers::pi / 6);
  EXPECT_TRUE(r.feasible);
  // The solver stops once feasibility is certain; distance is an upper bound.
  EXPECT_GE(r.distance, exact - 1e-9);
  EXPECT_LE(r.distance, 1.0);
  EXPECT_NEAR(r.witness.norm(), r.distance, 1e-12);
}

TEST(AtLeastFeasible, TwoPlanesAt120Degrees) {
  auto r = AtLeastFeasible(SubsetId::Full(2), AngleMixture(120, 0.7), Origin(), kL2);
  EXPECT_FALSE(r.feasible);
  // Certified lower bound on the true distance 1.4.
  EXPECT_GT(r.distance, 1.0);
  EXPECT_LE(r.distance, 1.4 + 1e-9);
  EXPECT_FALSE(r.degenerate);
}

TEST(AtLeastFeasible, Singleton) {
  auto r = AtLeastFeasible(SubsetId::Of({0}), AngleMixture(60, 0.7), Origin(), kL2);
  EXPECT_TRUE(r.feasible);
  EXPECT_NEAR(r.distance, 0.7, 1e-9);
  EXPECT_NEAR(r.witness(0), 0.7 * std::cos(std::numbers::pi / 6), 1e-9);
}

TEST(AtLeastFeasible, RejectsEmptyAndOutOfRangeSubsets) {
  const Mixture mix = AngleMixture(60, 0.7);
  EXPECT_THROW(AtLeastFeasible(SubsetId(), mix, Origin(), kL2), Error);
  EXPECT_THROW(AtLeastFeasible(SubsetId::Of({5}), mix, Origin(), kL2), Error);
}

// The exact solver and the PGD fallback agree away from the boundary.
TEST(AtLeastFeasible, ExactAgreesWithPgd) {
  Rng rng(41);
  int compared = 0;
  for (int s = 0; s < 300; ++s) {
    const int d = 2 + int(rng.Below(3));
    const int m = 2 + int(rng.Below(3));
    Mixture mix = SampleRandomMixture(d, m, 0.25, 0.2, 10.0, rng);
    const SubsetId subset(1 + rng.Below((uint64_t{1} << m) - 1));
    for (Norm norm : {Norm::kL2, Norm::kLinf}) {
      const ThreatModel tm{norm, 1.0};
      auto exact = AtLeastFeasible(subset, mix, Origin(d), tm);
      if (exact.degenerate || std::abs(exact.distance - 1.0) < 1e-3) continue;
      auto pgd = AtLeastFeasiblePgd(subset, mix, Origin(d), tm);
      if (pgd.degenerate) continue;
      EXPECT_EQ(exact.feasible, pgd.feasible) << "trial " << s;
      ++compared;
    }
  }
  EXPECT_GT(compared, 300);
}

TEST(BuildLattice, SingleVulnerableClassifier) {
  auto mix = Mixture::Make({{Vector::Unit(2, 0), -0.5}});
  auto lat = BuildLattice(mix, Origin(), kL2);
  EXPECT_EQ(Sorted(lat.Subsets()), Sets({{}, {0}}));
}

TEST(BuildLattice, PairFixtures) {
  auto c = BuildLattice(LoadMixture("opposite_normals.json"), Origin(), kL2);
  EXPECT_EQ(Sorted(c.Subsets()), Sets({{}, {0}, {1}}));
  auto d = BuildLattice(LoadMixture("overlapping_pair.json"), Origin(), kL2);
  EXPECT_EQ(Sorted(d.Subsets()), Sets({{}, {0}, {1}, {0, 1}}));
  EXPECT_EQ(MaximalElements(d), Sets({{0, 1}}));
}

TEST(BuildLattice, RobustFixture) {
  auto lat = BuildLattice(LoadMixture("robust.json"), Origin(), kL2);
  EXPECT_EQ(lat.Subsets(), Sets({{}}));
  EXPECT_EQ(MaximalElements(lat), Sets({{}}));
}

TEST(BuildLattice, FourClassifierFixture) {
  auto lat = BuildLattice(LoadMixture("four_classifiers.json"), Origin(), kL2);
  EXPECT_FALSE(lat.degenerate);
  EXPECT_EQ(Sorted(MaximalElements(lat)), Sets({{0, 3}, {2, 3}, {0, 1, 2}}));
}

TEST(BuildLattice, DownwardClosedWithValidWitnesses) {
  Rng rng(43);
  for (int s = 0; s < 150; ++s) {
    const int d = 2 + int(rng.Below(4));
    const int m = 1 + int(rng.Below(5));
    Mixture mix = SampleRandomMixture(d, m, 0.25, 0.2, 10.0, rng);
    const ThreatModel tm{s % 2 ? Norm::kLinf : Norm::kL2, 1.0};
    auto lat = BuildLattice(mix, Origin(d), tm);
    ASSERT_TRUE(lat.Contains(SubsetId()));
    for (const auto& node : lat.nodes) {
      for (size_t i : node.subset.Indices()) EXPECT_TRUE(lat.Contains(node.subset.Without(i)));
      if (node.subset.empty()) continue;
      EXPECT_TRUE(InBall(node.witness, Vector::Zero(d), tm, 1e-12));
      for (size_t i : node.subset.Indices()) {
        EXPECT_LE(SignedMargin(mix.classifiers[i], node.witness, -1), kSuccessTolerance);
      }
      EXPECT_NEAR(node.mass, SubsetMass(mix, node.subset), 1e-15);
    }
  }
}

TEST(BuildLattice, TooManyClassifiersIsResourceLimit) {
  std::vector<LinearClassifier> hs(kMaxLatticeClassifiers + 1, {Vector::Unit(2, 0), -2.0});
  try {
    BuildLattice(Mixture::Make(hs), Origin(), kL2);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kResourceLimit);
  }
}

TEST(MaximalElements, KnownValues) {
  auto four = Sets({{}, {0}, {1}, {2}, {3}, {0, 1}, {0, 2}, {0, 3}, {2, 3}, {0, 1, 2}});
  EXPECT_EQ(Sorted(MaximalElements(four)), Sets({{0, 3}, {2, 3}, {0, 1, 2}}));
  auto chain = Sets({{}, {0}, {0, 1}});
  EXPECT_EQ(MaximalElements(chain), Sets({{0, 1}}));
  auto robust = Sets({{}});
  EXPECT_EQ(MaximalElements(robust), Sets({{}}));
}

TEST(OptimalAttack, KnownValues) {
  EXPECT_EQ(OptimalAttackBruteForce(AngleMixture(120, 0.7), Origin(), kL2).error, 0.5);
  EXPECT_EQ(OptimalAttackBruteForce(AngleMixture(60, 0.7), Origin(), kL2).error, 1.0);
  EXPECT_EQ(OptimalAttackBruteForce(AngleMixture(60, 2.0), Origin(), kL2).error, 0.0);
}

TEST(OptimalAttack, WitnessAchievesError) {
  Rng rng(47);
  for (int s = 0; s < 100; ++s) {
    Mixture mix = SampleRandomMixture(3, 4, 0.25, 0.2, 10.0, rng);
    auto opt = OptimalAttackBruteForce(mix, Origin(3), kL2);
    EXPECT_TRUE(InBall(opt.x, Vector::Zero(3), kL2, 1e-12));
    EXPECT_GE(ZeroOneMixture(mix, opt.x, -1, kSuccessTolerance), opt.error - 1e-15);
  }
}

// Every grid point is a valid attack, so the oracle can never fall below the
// best grid error.
TEST(OptimalAttack, DominatesCoarseGrid) {
  Rng rng(53);
  const int n = 101;
  for (int s = 0; s < 20; ++s) {
    const int m = 1 + int(rng.Below(4));
    Mixture mix = SampleRandomMixture(2, m, 0.25, 0.2, 10.0, rng);
    const double oracle = OptimalAttackBruteForce(mix, Origin(), kL2).error;
    double best = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        Vector x(2);
        x << -1.0 + 2.0 * i / (n - 1), -1.0 + 2.0 * j / (n - 1);
        if (x.norm() > 1.0) continue;
        best = std::max(best, ZeroOneMixture(mix, x, -1));
      }
    }
    EXPECT_GE(oracle, best - 1e-12) << "trial " << s;
  }
}

}  // namespace
}  // namespace latclimb
