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

#ifndef LATCLIMB_CORE_MULTICLASS_H_
#define LATCLIMB_CORE_MULTICLASS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "core/attack_result.h"
#include "core/geometry.h"
#include "core/linear_models.h"
#include "core/pgd.h"
#include "core/rng.h"
#include "core/subset.h"

namespace latclimb {

using Matrix = Eigen::MatrixXd;

// Differentiable score function f: R^d -> R^K.
class ScoreModel {
 public:
  virtual ~ScoreModel() = default;
  virtual int input_dim() const = 0;
  virtual int num_classes() const = 0;
  virtual Vector Scores(const Vector& x) const = 0;
  // Gradient with respect to x of <score_grad, f(x)>.
  virtual Vector InputGradient(const Vector& x, const Vector& score_grad) const = 0;
};

enum class Activation { kTanh, kRelu };
const char* ActivationName(Activation a);
Activation ParseActivation(const std::string& name);

struct DenseLayer {
  Matrix w;  // out x in
  Vector b;
};

// Fully connected network; the activation follows every layer but the last,
// whose outputs are the raw scores.
class MlpModel final : public ScoreModel {
 public:
  MlpModel(std::vector<DenseLayer> layers, Activation activation);

  int input_dim() const override { return int(layers_.front().w.cols()); }
  int num_classes() const override { return int(layers_.back().w.rows()); }
  Vector Scores(const Vector& x) const override;
  Vector InputGradient(const Vector& x, const Vector& score_grad) const override;

  const std::vector<DenseLayer>& layers() const { return layers_; }
  Activation activation() const { return activation_; }

 private:
  std::vector<DenseLayer> layers_;
  Activation activation_;
};

struct MulticlassMixture {
  std::vector<std::shared_ptr<const ScoreModel>> models;
  std::vector<double> weights;

  // Same weight rules as Mixture::Make; all models must share (d, K).
  static MulticlassMixture Make(std::vector<std::shared_ptr<const ScoreModel>> models,
                                std::vector<double> weights);
  int size() const { return int(models.size()); }
  int dim() const { return models.front()->input_dim(); }
  int num_classes() const { return models.front()->num_classes(); }
};

// argmax over j != y; smallest index on ties.
int TargetLabel(const Vector& scores, int y);
// Smallest-index argmax.
int PredictLabel(const Vector& scores);
// A rival class scores at least as high as y. Exact ties count as fooled,
// matching the binary boundary convention.
bool IsFooled(const Vector& scores, int y);

SubsetId FooledModels(const MulticlassMixture& mix, const Vector& x, int y);
double MulticlassError(const MulticlassMixture& mix, const Vector& x, int y);

// max(f_y - f_t, 0) with t = TargetLabel(f(x), y), or t = `target` when
// target >= 0.
ValueGrad RevHinge(const ScoreModel& model, const Vector& x, int y, int target = -1);

// Mean RevHinge over the pool. `targets` is empty (recompute) or holds one
// frozen target per pool member.
ValueGrad SrhMulticlass(std::span<const ScoreModel* const> pool, const Vector& x, int y,
                        std::span<const int> targets = {});

// Softmax cross-entropy of f(x) against y, with its input gradient.
ValueGrad CrossEntropy(const ScoreModel& model, const Vector& x, int y);

enum class Surrogate { kCrossEntropy, kRevHinge };
enum class TargetMode { kRecompute, kFrozen };
const char* SurrogateName(Surrogate s);
Surrogate ParseSurrogate(const std::string& name);

// Objectives minimized by the attacks: -sum_i q_i CE_i or sum_i q_i rev_i.
ValueGrad EolObjective(const MulticlassMixture& mix, const Vector& x, int y,
                       Surrogate surrogate, std::span<const int> targets = {});
// Same surrogate applied once to the weighted average of the scores.
ValueGrad LoeObjective(const MulticlassMixture& mix, const Vector& x, int y,
                       Surrogate surrogate, int target = -1);

struct MulticlassConfig {
  PgdConfig pgd;
  Surrogate surrogate = Surrogate::kCrossEntropy;
  TargetMode target = TargetMode::kRecompute;
  // EOL/LOE: independent PGD runs. LCA: orders tried (the first is the given
  // order, later ones random).
  int restarts = 1;
  bool random_init = false;
  uint64_t seed = kDefaultSeed;

  // 50 steepest steps of epsilon / 10.
  static MulticlassConfig Defaults(double epsilon);
};

AttackResult EolPgdMulticlass(const MulticlassMixture& mix, const LabeledPoint& pt,
                              const ThreatModel& tm, const MulticlassConfig& cfg);
AttackResult LoePgdMulticlass(const MulticlassMixture& mix, const LabeledPoint& pt,
                              const ThreatModel& tm, const MulticlassConfig& cfg);
// Per-model PGD on RevHinge from the current point, kept only when the
// mixture error strictly increases.
AttackResult ArcGreedyMulticlass(const MulticlassMixture& mix, const LabeledPoint& pt,
                                 const ThreatModel& tm, const MulticlassConfig& cfg,
                                 std::span<const size_t> order);
// Pool climbing with strict-improvement acceptance; after every outer step
// the pool is reset to the models fooled at the current point.
AttackResult LcaMulticlass(const MulticlassMixture& mix, const LabeledPoint& pt,
                           const ThreatModel& tm, const MulticlassConfig& cfg,
                           std::span<const size_t> order);

struct Dataset {
  Matrix x;  // one sample per row
  std::vector<int> y;
};

// n_per_class isotropic Gaussian samples around each row of `centers`.
Dataset MakeBlobs(const Matrix& centers, int n_per_class, double stddev, Rng& rng);

struct TrainConfig {
  int hidden = 16;
  Activation activation = Activation::kTanh;
  int epochs = 400;
  double learning_rate = 0.5;
};

// Two-layer MLP trained by full-batch gradient descent on mean cross-entropy.
MlpModel TrainMlp(const Dataset& data, int num_classes, const TrainConfig& cfg, Rng& rng);
double Accuracy(const ScoreModel& model, const Dataset& data);

}  // namespace latclimb

#endif  // LATCLIMB_CORE_MULTICLASS_H_
