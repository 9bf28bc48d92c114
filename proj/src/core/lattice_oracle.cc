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
#include <limits>
#include <numeric>
#include <string>
#include <unordered_set>

#include "core/error.h"
#include "core/pgd.h"

namespace latclimb {

namespace {

// Hildreth's method: exact coordinate ascent on the dual of
//   min 1/2 ||z||^2  s.t.  a_k . z <= c_k,  |z_j| <= box (optional).
// Each coordinate step is the projection of the current primal point onto one
// half-space, corrected by that half-space's previous increment. The primal
// point is always z = -sum_k mu_k a_k, and the dual value is a lower bound on
// 1/2 dist^2.
class DualAscent {
 public:
  DualAscent(std::vector<Vector> a, std::vector<double> c, double box)
      : a_(std::move(a)), c_(std::move(c)), box_(box) {
    const Eigen::Index d = a_.front().size();
    z_ = Vector::Zero(d);
    mu_.assign(a_.size(), 0.0);
    for (const auto& v : a_) sq_.push_back(v.squaredNorm());
    if (box_ >= 0.0) {
      mu_hi_ = Vector::Zero(d);
      mu_lo_ = Vector::Zero(d);
    }
  }

  void Sweep() {
    for (size_t k = 0; k < a_.size(); ++k) {
      const double r = a_[k].dot(z_) - c_[k];
      const double delta = std::max(-mu_[k], r / sq_[k]);
      mu_[k] += delta;
      z_ -= delta * a_[k];
    }
    if (box_ < 0.0) return;
    for (Eigen::Index j = 0; j < z_.size(); ++j) {
      double delta = std::max(-mu_hi_[j], z_[j] - box_);
      mu_hi_[j] += delta;
      z_[j] -= delta;
      delta = std::max(-mu_lo_[j], -z_[j] - box_);
      mu_lo_[j] += delta;
      z_[j] += delta;
    }
  }

  double Dual() const {
    double linear = 0.0;
    for (size_t k = 0; k < a_.size(); ++k) linear += mu_[k] * c_[k];
    if (box_ >= 0.0) linear += box_ * (mu_hi_.sum() + mu_lo_.sum());
    return -0.5 * z_.squaredNorm() - linear;
  }

  // Largest constraint residual a_k . z - c_k (classifier constraints only).
  double Violation() const {
    double v = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < a_.size(); ++k) v = std::max(v, a_[k].dot(z_) - c_[k]);
    return v;
  }

  double BoxViolation() const {
    return box_ < 0.0 ? 0.0 : z_.cwiseAbs().maxCoeff() - box_;
  }

  const Vector& z() const { return z_; }

 private:
  std::vector<Vector> a_;
  std::vector<double> c_;
  std::vector<double> sq_;
  std::vector<double> mu_;
  double box_;
  Vector mu_hi_, mu_lo_;
  Vector z_;
};

void CheckSubset(SubsetId subset, const Mixture& mix) {
  if (subset.empty()) Fail(ErrorCode::kInvalidInput, "feasibility of the empty subset");
  if (!subset.IsSubsetOf(SubsetId::Full(mix.size()))) {
    Fail(ErrorCode::kInvalidInput, "subset refers to classifiers beyond the mixture");
  }
}

// Constraints y w_i . z <= -y f_i(x) on the displacement z = x' - x.
void BuildConstraints(SubsetId subset, const Mixture& mix, const LabeledPoint& pt,
                      std::vector<Vector>* a, std::vector<double>* c) {
  for (size_t i : subset.Indices()) {
    const auto& h = mix.classifiers[i];
    a->push_back(double(pt.y) * h.w);
    c->push_back(-SignedMargin(h, pt.x, pt.y));
  }
}

enum class Verdict { kFeasible, kInfeasible, kCapped };

struct LinfOutcome {
  Verdict verdict;
  Vector z;
  long sweeps;
};

LinfOutcome SolveLinf(SubsetId subset, const Mixture& mix, const LabeledPoint& pt,
                      double radius, const FeasibilityOptions& opts) {
  std::vector<Vector> a;
  std::vector<double> c;
  BuildConstraints(subset, mix, pt, &a, &c);
  DualAscent solver(std::move(a), std::move(c), radius);
  const double d = double(pt.x.size());
  // A nonempty polyhedron inside the box has its projection of 0 within
  // norm^2 <= d radius^2; a dual value beyond that certifies emptiness.
  const double cap = 0.5 * d * radius * radius;
  for (long s = 1; s <= opts.max_sweeps; ++s) {
    solver.Sweep();
    if (solver.Violation() <= opts.tol && solver.BoxViolation() <= opts.tol) {
      return {Verdict::kFeasible, solver.z(), s};
    }
    if (solver.Dual() > cap * (1.0 + 1e-12) + 1e-15) {
      return {Verdict::kInfeasible, Vector(), s};
    }
  }
  return {Verdict::kCapped, Vector(), opts.max_sweeps};
}

FeasibilityResult FeasibleLinf(SubsetId subset, const Mixture& mix,
                               const LabeledPoint& pt, const ThreatModel& tm,
                               const FeasibilityOptions& opts) {
  const LinfOutcome main = SolveLinf(subset, mix, pt, tm.epsilon, opts);
  if (main.verdict == Verdict::kCapped) {
    FeasibilityResult r = AtLeastFeasiblePgd(subset, mix, pt, tm, opts);
    r.degenerate = true;
    r.sweeps = main.sweeps;
    return r;
  }
  FeasibilityResult r;
  r.sweeps = main.sweeps;
  r.feasible = main.verdict == Verdict::kFeasible;
  if (r.feasible) {
    r.witness = ProjectBall(pt.x + main.z, pt.x, tm);
    r.distance = LpNorm(r.witness - pt.x, Norm::kLinf);
  } else {
    r.distance = std::numeric_limits<double>::infinity();
  }
  // Degenerate when the verdict flips within 10 tol of the budget.
  const double band = 10.0 * opts.tol;
  const double probe = r.feasible ? tm.epsilon - band : tm.epsilon + band;
  if (probe <= 0.0) {
    r.degenerate = true;
  } else {
    const LinfOutcome other = SolveLinf(subset, mix, pt, probe, opts);
    r.degenerate = other.verdict != main.verdict;
  }
  return r;
}

FeasibilityResult FeasibleL2(SubsetId subset, const Mixture& mix,
                             const LabeledPoint& pt, const ThreatModel& tm,
                             const FeasibilityOptions& opts) {
  std::vector<Vector> a;
  std::vector<double> c;
  BuildConstraints(subset, mix, pt, &a, &c);
  DualAscent solver(std::move(a), std::move(c), -1.0);
  const double eps = tm.epsilon;
  const double band = 10.0 * opts.tol;
  FeasibilityResult r;
  for (long s = 1; s <= opts.max_sweeps; ++s) {
    solver.Sweep();
    r.sweeps = s;
    const double lower = std::sqrt(std::max(0.0, 2.0 * solver.Dual()));
    if (lower >= eps + band) {
      r.feasible = false;
      r.distance = lower;
      return r;
    }
    if (solver.Violation() > opts.tol) continue;
    const double upper = solver.z().norm();
    const bool converged = upper - lower <= opts.tol;
    if (upper < eps - band || converged) {
      r.feasible = upper <= eps;
      r.distance = upper;
      r.degenerate = std::abs(upper - eps) < band;
      if (r.feasible) r.witness = pt.x + solver.z();
      return r;
    }
  }
  FeasibilityResult fallback = AtLeastFeasiblePgd(subset, mix, pt, tm, opts);
  fallback.degenerate = true;
  fallback.sweeps = opts.max_sweeps;
  return fallback;
}

}  // namespace

FeasibilityResult AtLeastFeasible(SubsetId subset, const Mixture& mix,
                                  const LabeledPoint& pt, const ThreatModel& tm,
                                  const FeasibilityOptions& opts) {
  CheckSubset(subset, mix);
  if (pt.x.size() != mix.dim()) Fail(ErrorCode::kInvalidInput, "point dimension mismatch");
  return tm.norm == Norm::kL2 ? FeasibleL2(subset, mix, pt, tm, opts)
                              : FeasibleLinf(subset, mix, pt, tm, opts);
}

FeasibilityResult AtLeastFeasiblePgd(SubsetId subset, const Mixture& mix,
                                     const LabeledPoint& pt, const ThreatModel& tm,
                                     const FeasibilityOptions& opts) {
  CheckSubset(subset, mix);
  const std::vector<LinearClassifier> pool = Select(mix, subset);
  FeasibilityResult r;
  r.used_pgd = true;
  if (tm.epsilon == 0.0) {
    r.feasible = subset.IsSubsetOf(FooledSet(mix, pt.x, pt.y, opts.tol));
    r.distance = r.feasible ? 0.0 : std::numeric_limits<double>::infinity();
    if (r.feasible) r.witness = pt.x;
    return r;
  }
  PgdConfig cfg = PgdConfig::ForMixture(subset.size(), tm.epsilon);
  cfg.stop_at_zero = true;
  const auto objective = [&](const Vector& x, bool) { return Srh(pool, x, pt.y); };
  const PgdOutcome out = PgdMinimize(objective, pt.x, pt.x, tm, cfg);
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& h : pool) worst = std::max(worst, SignedMargin(h, out.x_best, pt.y));
  r.feasible = worst <= opts.tol;
  if (r.feasible) {
    r.witness = out.x_best;
    r.distance = LpNorm(out.x_best - pt.x, tm.norm);
  } else {
    r.distance = std::numeric_limits<double>::infinity();
  }
  return r;
}

bool AdversarialLattice::Contains(SubsetId s) const {
  return std::any_of(nodes.begin(), nodes.end(),
                     [s](const LatticeNode& n) { return n.subset == s; });
}

std::vector<SubsetId> AdversarialLattice::Subsets() const {
  std::vector<SubsetId> out;
  for (const auto& n : nodes) out.push_back(n.subset);
  return out;
}

AdversarialLattice BuildLattice(const Mixture& mix, const LabeledPoint& pt,
                                const ThreatModel& tm, const FeasibilityOptions& opts) {
  const int m = mix.size();
  if (m > kMaxLatticeClassifiers) {
    Fail(ErrorCode::kResourceLimit,
         "lattice enumeration is exponential in m; refusing m = " + std::to_string(m) +
             " > " + std::to_string(kMaxLatticeClassifiers));
  }
  AdversarialLattice lattice;
  lattice.m = m;
  lattice.nodes.push_back({SubsetId(), pt.x, 0.0});
  std::unordered_set<uint64_t> present{0};
  std::vector<SubsetId> level{SubsetId()};
  for (int k = 1; k <= m && !level.empty(); ++k) {
    std::vector<SubsetId> next;
    for (SubsetId base : level) {
      const int start = base.empty() ? 0 : 64 - std::countl_zero(base.bits());
      for (int i = start; i < m; ++i) {
        const SubsetId candidate = base.With(i);
        bool closed = true;
        for (size_t j : candidate.Indices()) {
          if (!present.count(candidate.Without(j).bits())) {
            closed = false;
            break;
          }
        }
        if (!closed) continue;
        const FeasibilityResult r = AtLeastFeasible(candidate, mix, pt, tm, opts);
        lattice.degenerate = lattice.degenerate || r.degenerate;
        if (!r.feasible) continue;
        present.insert(candidate.bits());
        lattice.nodes.push_back({candidate, r.witness, SubsetMass(mix, candidate)});
        next.push_back(candidate);
      }
    }
    level = std::move(next);
  }
  return lattice;
}

std::vector<SubsetId> MaximalElements(std::span<const SubsetId> nodes) {
  std::vector<SubsetId> out;
  for (SubsetId s : nodes) {
    const bool dominated = std::any_of(nodes.begin(), nodes.end(), [s](SubsetId t) {
      return s.IsStrictSubsetOf(t);
    });
    if (!dominated) out.push_back(s);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SubsetId> MaximalElements(const AdversarialLattice& lattice) {
  const std::vector<SubsetId> subsets = lattice.Subsets();
  return MaximalElements(subsets);
}

OptimalAttack OptimalAttackBruteForce(const Mixture& mix, const LabeledPoint& pt,
                                      const ThreatModel& tm,
                                      const FeasibilityOptions& opts) {
  const int m = mix.size();
  if (m > kMaxLatticeClassifiers) {
    Fail(ErrorCode::kResourceLimit,
         "optimal attack enumeration is exponential in m; refusing m = " +
             std::to_string(m) + " > " + std::to_string(kMaxLatticeClassifiers));
  }
  OptimalAttack best{pt.x, 0.0, SubsetId(), false};

  // Infeasible singletons and pairs prune most of the enumeration; every
  // remaining candidate still gets a full feasibility check.
  SubsetId vulnerable;
  for (int i = 0; i < m; ++i) {
    const FeasibilityResult r = AtLeastFeasible(SubsetId().With(i), mix, pt, tm, opts);
    best.degenerate = best.degenerate || r.degenerate;
    if (r.feasible) vulnerable = vulnerable.With(i);
  }
  std::vector<uint64_t> bad_pairs;
  const std::vector<size_t> vuln = vulnerable.Indices();
  for (size_t p = 0; p < vuln.size(); ++p) {
    for (size_t q = p + 1; q < vuln.size(); ++q) {
      const SubsetId pair = SubsetId().With(vuln[p]).With(vuln[q]);
      const FeasibilityResult r = AtLeastFeasible(pair, mix, pt, tm, opts);
      best.degenerate = best.degenerate || r.degenerate;
      if (!r.feasible) bad_pairs.push_back(pair.bits());
    }
  }

  std::vector<SubsetId> candidates;
  const uint64_t vbits = vulnerable.bits();
  for (uint64_t s = vbits; s != 0; s = (s - 1) & vbits) {
    const bool pruned = std::any_of(bad_pairs.begin(), bad_pairs.end(),
                                    [s](uint64_t p) { return (s & p) == p; });
    if (!pruned) candidates.push_back(SubsetId(s));
  }
  std::vector<double> mass(candidates.size());
  for (size_t k = 0; k < candidates.size(); ++k) mass[k] = SubsetMass(mix, candidates[k]);
  std::vector<size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (mass[a] != mass[b]) return mass[a] > mass[b];
    return candidates[a] < candidates[b];
  });
  for (size_t k : order) {
    const FeasibilityResult r = AtLeastFeasible(candidates[k], mix, pt, tm, opts);
    best.degenerate = best.degenerate || r.degenerate;
    if (r.feasible) {
      best.x = r.witness;
      best.error = mass[k];
      best.subset = candidates[k];
      return best;
    }
  }
  return best;
}

}  // namespace latclimb
