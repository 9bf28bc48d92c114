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

#ifndef LATCLIMB_CORE_EXPERIMENTS_H_
#define LATCLIMB_CORE_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "core/attacks_linear.h"
#include "core/geometry.h"
#include "core/serialize.h"

namespace latclimb {

// Runs fn(0..n-1) on up to `jobs` threads. The first exception is rethrown.
void ParallelFor(int n, int jobs, const std::function<void(int)>& fn);

std::string FormatNumber(double v);

// ---- two-classifier angle sweep ----

struct AngleSweepConfig {
  double theta_step_deg = 5.0;
  double distance = 0.7;
  double epsilon = 1.0;
  Norm norm = Norm::kL2;
  ArcCandidate arc_candidate = ArcCandidate::kFullBudget;
  int pgd_multiplier = 1;
  uint64_t seed = kDefaultSeed;

  static AngleSweepConfig FromJson(const Json& j);
  Json ToJson() const;
};

struct AngleRow {
  double theta_deg = 0.0;
  std::string attack;
  double error = 0.0;
  double oracle_error = 0.0;
  long grad_evals = 0;
  double wall_time = 0.0;
};

// Two unit normals at angles -theta/2 and +theta/2, offsets -distance, x = 0,
// y = -1. Rows per theta: eol-pgd, arc, lca, oracle.
std::vector<AngleRow> RunAngleSweep(const AngleSweepConfig& cfg);
std::string AngleSweepCsv(const std::vector<AngleRow>& rows);
Mixture AngleMixture(double theta_deg, double distance, int d = 2);

// ---- random linear mixtures ----

struct RandomLinearConfig {
  int d = 128;
  int m_min = 1;
  int m_max = 10;
  int trials = 200;
  double alpha = 0.25;
  double beta = 0.2;
  double temperature = 10.0;
  double epsilon = 1.0;
  Norm norm = Norm::kL2;
  std::vector<std::string> attacks = {"eol-pgd", "arc", "lca"};
  int pgd_multiplier = 1;
  uint64_t seed = kDefaultSeed;
  int jobs = 1;

  static RandomLinearConfig FromJson(const Json& j);
  Json ToJson() const;
};

struct TrialRecord {
  int m = 0;
  int trial = 0;
  std::string attack;
  double error = 0.0;
  long grad_evals = 0;
  double wall_time = 0.0;
};

struct SummaryRow {
  int m = 0;
  std::string attack;
  double mean_error = 0.0;
  double ci99_lo = 0.0;
  double ci99_hi = 0.0;
  // Mean of error / LCA error over trials where LCA error > 0; NaN if none.
  double mean_ratio_to_lca = 0.0;
  double mean_time = 0.0;
};

struct RandomLinearOutput {
  std::vector<TrialRecord> records;  // sorted by (m, trial, attack order)
  std::vector<SummaryRow> summary;
  // Trials in which some classifier lies within epsilon of x.
  std::vector<std::pair<int, int>> vulnerable_trials;
};

RandomLinearOutput RunRandomLinear(const RandomLinearConfig& cfg);
std::vector<SummaryRow> Summarize(const std::vector<TrialRecord>& records,
                                  const std::vector<std::string>& attacks);
std::string RandomLinearCsv(const std::vector<TrialRecord>& records);
std::string SummaryCsv(const std::vector<SummaryRow>& rows);

// ---- maximality audit ----

struct AuditConfig {
  int trials = 500;  // non-degenerate trials to collect
  int m_min = 2;
  int m_max = 6;
  int d_min = 2;
  int d_max = 8;
  double alpha = 0.25;
  double beta = 0.2;
  double temperature = 10.0;
  double epsilon = 1.0;
  Norm norm = Norm::kL2;
  int pgd_multiplier = 16;
  bool late_halving = true;
  int steps_override = 0;  // > 0 replaces T (negative controls)
  uint64_t seed = kDefaultSeed;
  int jobs = 1;

  static AuditConfig FromJson(const Json& j);
  Json ToJson() const;
  PgdConfig Pgd(int m) const;
};

struct AuditTrial {
  int trial = 0;
  int m = 0;
  int d = 0;
  bool degenerate = false;
  bool maximal = false;
  double lca_error = 0.0;
  double eol_error = 0.0;
  double oracle_error = 0.0;
  long lca_grad_evals = 0;
  long eol_grad_evals = 0;
  int steps = 0;
  double wall_time = 0.0;
  bool grad_bounds_ok = false;
  bool within_ball = false;
  Json dump;  // set on failures
};

struct AuditReport {
  std::vector<AuditTrial> trials;
  int evaluated = 0;
  int excluded_degenerate = 0;
  int passed = 0;
  int grad_bound_violations = 0;
  int ball_violations = 0;
  int oracle_violations = 0;
  double pass_fraction = 0.0;

  Json ToJson() const;
};

AuditReport RunMaximalityAudit(const AuditConfig& cfg);
std::string AuditCsv(const AuditReport& report);

// ---- multiclass demo ----

struct MulticlassDemoConfig {
  int m = 3;
  int classes = 3;
  int d = 2;
  int train_per_class = 60;
  int test_per_class = 20;
  double blob_radius = 2.0;
  double blob_std = 0.6;
  int hidden = 16;
  int epochs = 400;
  double learning_rate = 0.5;
  double epsilon = 0.9;
  Norm norm = Norm::kL2;
  int steps = 50;
  int restarts = 1;
  // Low-alignment family: class 1 lies along directions spread by this angle.
  bool low_alignment = true;
  int low_alignment_m = 2;
  double low_alignment_angle_deg = 110.0;
  double low_alignment_distance = 1.0;
  double low_alignment_std = 0.1;
  uint64_t seed = kDefaultSeed;
  int jobs = 1;

  static MulticlassDemoConfig FromJson(const Json& j);
  Json ToJson() const;
};

struct DemoRow {
  std::string mixture;
  int m = 0;
  double clean = 0.0;
  // Expected accuracy under attack, aligned with DemoAttacks().
  std::vector<double> accuracy;
};

const std::vector<std::string>& DemoAttacks();
std::vector<DemoRow> RunMulticlassDemo(const MulticlassDemoConfig& cfg);
std::string MulticlassDemoCsv(const std::vector<DemoRow>& rows);

// The low-alignment fixture: models trained to separate a blob at the origin
// from blobs along directions spread by `angle_deg`, plus held-out points
// from the origin blob (label 0).
struct LowAlignmentFixture {
  MulticlassMixture mixture;
  std::vector<LabeledPoint> points;
};
LowAlignmentFixture MakeLowAlignmentFixture(const MulticlassDemoConfig& cfg);

// ---- orchestration ----

// Runs `name` (sweep-angle | random-linear | maximality-audit |
// multiclass-demo) with the given JSON config, writes CSV/JSON outputs and
// manifest.json into out_dir, and returns the manifest.
Json RunExperiment(const std::string& name, const Json& config, const std::string& out_dir);

}  // namespace latclimb

#endif  // LATCLIMB_CORE_EXPERIMENTS_H_
