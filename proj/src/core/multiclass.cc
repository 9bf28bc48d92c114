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

#include "core/multiclass.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "core/attacks_linear.h"
#include "core/error.h"

namespace latclimb {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::max(std::chrono::duration<double>(Clock::now() - start).count(), 1e-9);
}

double Act(Activation a, double z) { return a == Activation::kTanh ? std::tanh(z) : std::max(z, 0.0); }

// Derivative expressed through the activation output h (tanh) or input z (relu).
double ActDeriv(Activation a, double z, double h) {
  return a == Activation::kTanh ? 1.0 - h * h : (z > 0.0 ? 1.0 : 0.0);
}

Vector Softmax(const Vector& s) {
  const Vector e = (s.array() - s.maxCoeff()).exp();
  return e / e.sum();
}

double LogSumExp(const Vector& s) {
  const double mx = s.maxCoeff();
  return mx + std::log((s.array() - mx).exp().sum());
}

void CheckPoint(const MulticlassMixture& mix, const LabeledPoint& pt) {
  if (pt.x.size() != mix.dim()) Fail(ErrorCode::kInvalidInput, "point dimension mismatch");
  if (pt.y < 0 || pt.y >= mix.num_classes()) {
    Fail(ErrorCode::kInvalidInput, "label " + std::to_string(pt.y) + " outside [0, " +
                                       std::to_string(mix.num_classes()) + ")");
  }
}

void Finish(const MulticlassMixture& mix, const LabeledPoint& pt, const Vector& x_adv,
            AttackResult* r) {
  r->delta = x_adv - pt.x;
  r->fooled = FooledModels(mix, x_adv, pt.y);
  r->error = SubsetMass(r->fooled, mix.weights);
  r->pool = r->fooled;
}

AttackResult CleanResult(const MulticlassMixture& mix, const LabeledPoint& pt) {
  AttackResult r;
  Finish(mix, pt, pt.x, &r);
  r.clean_error = r.error;
  return r;
}

std::vector<int> FrozenTargets(const MulticlassMixture& mix, const Vector& x, int y) {
  std::vector<int> t;
  for (const auto& model : mix.models) t.push_back(TargetLabel(model->Scores(x), y));
  return t;
}

Vector AverageScores(const MulticlassMixture& mix, const Vector& x) {
  Vector s = Vector::Zero(mix.num_classes());
  for (int i = 0; i < mix.size(); ++i) s += mix.weights[i] * mix.models[i]->Scores(x);
  return s;
}

// Shared driver for EOL and LOE: best-error iterate over all restarts.
AttackResult RunPgdAttack(const MulticlassMixture& mix, const LabeledPoint& pt,
                          const ThreatModel& tm, const MulticlassConfig& cfg,
                          const Objective& objective) {
  Require(cfg.restarts >= 1, "restarts must be >= 1");
  const auto start = Clock::now();
  AttackResult r = CleanResult(mix, pt);
  if (tm.epsilon == 0.0) {
    r.wall_time = Seconds(start);
    return r;
  }
  Vector best = pt.x;
  double best_error = r.clean_error;
  const auto observer = [&](const Vector& x, double) {
    const double e = MulticlassError(mix, x, pt.y);
    r.trace.push_back(e);
    if (e > best_error) {
      best_error = e;
      best = x;
    }
  };
  PgdConfig run = cfg.pgd;
  run.stop_at_zero = false;
  for (int k = 0; k < cfg.restarts; ++k) {
    Vector x0 = pt.x;
    if (cfg.random_init) {
      Rng rng = Rng::Stream(cfg.seed, {0x5eed, uint64_t(k)});
      x0 = SampleBall(pt.x, tm, rng);
    }
    const PgdOutcome out = PgdMinimize(objective, x0, pt.x, tm, run, observer);
    r.iterations += out.iterations;
    r.grad_evals += out.gradient_calls * long(mix.size());
  }
  Finish(mix, pt, best, &r);
  r.wall_time = Seconds(start);
  return r;
}

}  // namespace

const char* ActivationName(Activation a) { return a == Activation::kTanh ? "tanh" : "relu"; }

Activation ParseActivation(const std::string& name) {
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  Fail(ErrorCode::kInvalidInput, "unknown activation '" + name + "' (expected tanh or relu)");
}

MlpModel::MlpModel(std::vector<DenseLayer> layers, Activation activation)
    : layers_(std::move(layers)), activation_(activation) {
  if (layers_.empty()) Fail(ErrorCode::kInvalidInput, "MLP needs at least one layer");
  for (size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    const std::string where = "layer " + std::to_string(l);
    if (layer.w.rows() == 0 || layer.w.cols() == 0) Fail(ErrorCode::kInvalidInput, where + " is empty");
    if (layer.b.size() != layer.w.rows()) {
      Fail(ErrorCode::kInvalidInput, where + ": bias length does not match output size");
    }
    if (l > 0 && layer.w.cols() != layers_[l - 1].w.rows()) {
      Fail(ErrorCode::kInvalidInput, where + ": input size does not match previous layer");
    }
    if (!layer.w.allFinite() || !layer.b.allFinite()) {
      Fail(ErrorCode::kInvalidInput, where + " has non-finite parameters");
    }
  }
  if (num_classes() < 2) Fail(ErrorCode::kInvalidInput, "MLP needs at least 2 output classes");
}

Vector MlpModel::Scores(const Vector& x) const {
  if (x.size() != input_dim()) Fail(ErrorCode::kInvalidInput, "MLP input dimension mismatch");
  Vector h = x;
  for (size_t l = 0; l < layers_.size(); ++l) {
    Vector z = layers_[l].w * h + layers_[l].b;
    if (l + 1 < layers_.size()) z = z.unaryExpr([&](double v) { return Act(activation_, v); });
    h = std::move(z);
  }
  return h;
}

Vector MlpModel::InputGradient(const Vector& x, const Vector& score_grad) const {
  if (x.size() != input_dim()) Fail(ErrorCode::kInvalidInput, "MLP input dimension mismatch");
  if (score_grad.size() != num_classes()) {
    Fail(ErrorCode::kInvalidInput, "score gradient length mismatch");
  }
  const size_t n = layers_.size();
  std::vector<Vector> pre(n), post(n);
  Vector h = x;
  for (size_t l = 0; l < n; ++l) {
    pre[l] = layers_[l].w * h + layers_[l].b;
    post[l] = l + 1 < n ? Vector(pre[l].unaryExpr([&](double v) { return Act(activation_, v); }))
                        : pre[l];
    h = post[l];
  }
  Vector g = score_grad;
  for (size_t l = n; l-- > 0;) {
    if (l + 1 < n) {
      for (Eigen::Index j = 0; j < g.size(); ++j) g[j] *= ActDeriv(activation_, pre[l][j], post[l][j]);
    }
    g = layers_[l].w.transpose() * g;
  }
  return g;
}

MulticlassMixture MulticlassMixture::Make(std::vector<std::shared_ptr<const ScoreModel>> models,
                                          std::vector<double> weights) {
  if (models.empty()) Fail(ErrorCode::kInvalidInput, "mixture needs at least one model");
  if (models.size() > size_t(kMaxMixtureSize)) {
    Fail(ErrorCode::kResourceLimit,
         "mixtures are limited to " + std::to_string(kMaxMixtureSize) + " models");
  }
  for (size_t i = 0; i < models.size(); ++i) {
    if (!models[i]) Fail(ErrorCode::kInvalidInput, "model " + std::to_string(i) + " is null");
    if (models[i]->input_dim() != models[0]->input_dim() ||
        models[i]->num_classes() != models[0]->num_classes()) {
      Fail(ErrorCode::kInvalidInput,
           "model " + std::to_string(i) + " does not share input and class dimensions");
    }
  }
  weights = NormalizeWeights(std::move(weights), models.size());
  return MulticlassMixture{std::move(models), std::move(weights)};
}

int TargetLabel(const Vector& scores, int y) {
  if (scores.size() < 2) Fail(ErrorCode::kInvalidInput, "target label needs K >= 2");
  if (y < 0 || y >= scores.size()) Fail(ErrorCode::kInvalidInput, "label out of range");
  int best = -1;
  for (int j = 0; j < int(scores.size()); ++j) {
    if (j == y) continue;
    if (best < 0 || scores[j] > scores[best]) best = j;
  }
  return best;
}

int PredictLabel(const Vector& scores) {
  Eigen::Index best = 0;
  scores.maxCoeff(&best);
  return int(best);
}

bool IsFooled(const Vector& scores, int y) { return scores[TargetLabel(scores, y)] >= scores[y]; }

SubsetId FooledModels(const MulticlassMixture& mix, const Vector& x, int y) {
  SubsetId s;
  for (int i = 0; i < mix.size(); ++i) {
    if (IsFooled(mix.models[i]->Scores(x), y)) s = s.With(i);
  }
  return s;
}

double MulticlassError(const MulticlassMixture& mix, const Vector& x, int y) {
  return SubsetMass(FooledModels(mix, x, y), mix.weights);
}

ValueGrad RevHinge(const ScoreModel& model, const Vector& x, int y, int target) {
  const Vector s = model.Scores(x);
  const int t = target >= 0 ? target : TargetLabel(s, y);
  if (t == y || t >= s.size()) Fail(ErrorCode::kInvalidInput, "invalid target label");
  const double gap = s[y] - s[t];
  if (gap <= 0.0) return {0.0, Vector::Zero(x.size())};
  Vector sg = Vector::Zero(s.size());
  sg[y] = 1.0;
  sg[t] = -1.0;
  return {gap, model.InputGradient(x, sg)};
}

ValueGrad SrhMulticlass(std::span<const ScoreModel* const> pool, const Vector& x, int y,
                        std::span<const int> targets) {
  if (pool.empty()) Fail(ErrorCode::kInvalidInput, "SRH of an empty pool");
  if (!targets.empty() && targets.size() != pool.size()) {
    Fail(ErrorCode::kInvalidInput, "one frozen target per pool member required");
  }
  ValueGrad out{0.0, Vector::Zero(x.size())};
  for (size_t i = 0; i < pool.size(); ++i) {
    const ValueGrad r = RevHinge(*pool[i], x, y, targets.empty() ? -1 : targets[i]);
    out.value += r.value;
    out.grad += r.grad;
  }
  const double k = double(pool.size());
  out.value /= k;
  out.grad /= k;
  return out;
}

ValueGrad CrossEntropy(const ScoreModel& model, const Vector& x, int y) {
  const Vector s = model.Scores(x);
  Vector sg = Softmax(s);
  sg[y] -= 1.0;
  return {LogSumExp(s) - s[y], model.InputGradient(x, sg)};
}

const char* SurrogateName(Surrogate s) {
  return s == Surrogate::kCrossEntropy ? "cross-entropy" : "rev-hinge";
}

Surrogate ParseSurrogate(const std::string& name) {
  if (name == "cross-entropy" || name == "ce") return Surrogate::kCrossEntropy;
  if (name == "rev-hinge") return Surrogate::kRevHinge;
  Fail(ErrorCode::kInvalidInput, "unknown surrogate '" + name + "' (expected cross-entropy or rev-hinge)");
}

ValueGrad EolObjective(const MulticlassMixture& mix, const Vector& x, int y,
                       Surrogate surrogate, std::span<const int> targets) {
  ValueGrad out{0.0, Vector::Zero(x.size())};
  for (int i = 0; i < mix.size(); ++i) {
    const ScoreModel& model = *mix.models[i];
    ValueGrad r;
    if (surrogate == Surrogate::kCrossEntropy) {
      r = CrossEntropy(model, x, y);
      r.value = -r.value;
      r.grad = -r.grad;
    } else {
      r = RevHinge(model, x, y, targets.empty() ? -1 : targets[i]);
    }
    out.value += mix.weights[i] * r.value;
    out.grad += mix.weights[i] * r.grad;
  }
  return out;
}

ValueGrad LoeObjective(const MulticlassMixture& mix, const Vector& x, int y,
                       Surrogate surrogate, int target) {
  const Vector s = AverageScores(mix, x);
  Vector sg = Vector::Zero(s.size());
  double value = 0.0;
  if (surrogate == Surrogate::kCrossEntropy) {
    sg = Softmax(s);
    sg[y] -= 1.0;
    sg = -sg;
    value = -(LogSumExp(s) - s[y]);
  } else {
    const int t = target >= 0 ? target : TargetLabel(s, y);
    value = std::max(s[y] - s[t], 0.0);
    if (value > 0.0) {
      sg[y] = 1.0;
      sg[t] = -1.0;
    }
  }
  Vector g = Vector::Zero(x.size());
  if (!sg.isZero(0.0)) {
    for (int i = 0; i < mix.size(); ++i) g += mix.weights[i] * mix.models[i]->InputGradient(x, sg);
  }
  return {value, g};
}

MulticlassConfig MulticlassConfig::Defaults(double epsilon) {
  MulticlassConfig cfg;
  cfg.pgd.steps = 50;
  cfg.pgd.eta = epsilon > 0.0 ? epsilon / 10.0 : 1.0;
  cfg.pgd.mode = StepMode::kSteepest;
  return cfg;
}

AttackResult EolPgdMulticlass(const MulticlassMixture& mix, const LabeledPoint& pt,
                              const ThreatModel& tm, const MulticlassConfig& cfg) {
  CheckPoint(mix, pt);
  std::vector<int> targets;
  if (cfg.target == TargetMode::kFrozen) targets = FrozenTargets(mix, pt.x, pt.y);
  const auto objective = [&](const Vector& x, bool) {
    return EolObjective(mix, x, pt.y, cfg.surrogate, targets);
  };
  return RunPgdAttack(mix, pt, tm, cfg, objective);
}

AttackResult LoePgdMulticlass(const MulticlassMixture& mix, const LabeledPoint& pt,
                              const ThreatModel& tm, const MulticlassConfig& cfg) {
  CheckPoint(mix, pt);
  const int target =
      cfg.target == TargetMode::kFrozen ? TargetLabel(AverageScores(mix, pt.x), pt.y) : -1;
  const auto objective = [&](const Vector& x, bool) {
    return LoeObjective(mix, x, pt.y, cfg.surrogate, target);
  };
  return RunPgdAttack(mix, pt, tm, cfg, objective);
}

AttackResult ArcGreedyMulticlass(const MulticlassMixture& mix, const LabeledPoint& pt,
                                 const ThreatModel& tm, const MulticlassConfig& cfg,
                                 std::span<const size_t> order) {
  CheckPoint(mix, pt);
  ValidateOrder(order, mix.size());
  const auto start = Clock::now();
  AttackResult r = CleanResult(mix, pt);
  if (tm.epsilon == 0.0) {
    r.wall_time = Seconds(start);
    return r;
  }
  std::vector<int> targets;
  if (cfg.target == TargetMode::kFrozen) targets = FrozenTargets(mix, pt.x, pt.y);
  PgdConfig run = cfg.pgd;
  run.stop_at_zero = true;
  Vector current = pt.x;
  SubsetId fooled = r.fooled;
  double current_error = r.clean_error;
  for (size_t i : order) {
    if (!fooled.Contains(i)) {
      const ScoreModel& model = *mix.models[i];
      const int target = targets.empty() ? -1 : targets[i];
      const auto objective = [&](const Vector& x, bool) { return RevHinge(model, x, pt.y, target); };
      const PgdOutcome out = PgdMinimize(objective, current, pt.x, tm, run);
      r.grad_evals += out.gradient_calls;
      r.iterations += out.iterations;
      const SubsetId cand = FooledModels(mix, out.x_best, pt.y);
      const double e = SubsetMass(cand, mix.weights);
      if (e > current_error) {
        current = out.x_best;
        current_error = e;
        fooled = cand;
      }
    }
    r.trace.push_back(current_error);
  }
  Finish(mix, pt, current, &r);
  r.wall_time = Seconds(start);
  return r;
}

AttackResult LcaMulticlass(const MulticlassMixture& mix, const LabeledPoint& pt,
                           const ThreatModel& tm, const MulticlassConfig& cfg,
                           std::span<const size_t> order) {
  CheckPoint(mix, pt);
  ValidateOrder(order, mix.size());
  Require(cfg.restarts >= 1, "restarts must be >= 1");
  const auto start = Clock::now();
  AttackResult best = CleanResult(mix, pt);
  best.pool = SubsetId();
  if (tm.epsilon == 0.0) {
    best.wall_time = Seconds(start);
    return best;
  }
  std::vector<int> all_targets;
  if (cfg.target == TargetMode::kFrozen) all_targets = FrozenTargets(mix, pt.x, pt.y);
  PgdConfig run = cfg.pgd;
  run.stop_at_zero = true;
  long grad_evals = 0;
  int iterations = 0;
  bool have_best = false;
  for (int k = 0; k < cfg.restarts; ++k) {
    std::vector<size_t> ord(order.begin(), order.end());
    if (k > 0) {
      Rng rng = Rng::Stream(cfg.seed, {0x1ca, uint64_t(k)});
      ord = RandomOrder(mix.size(), rng);
    }
    AttackResult r = CleanResult(mix, pt);
    Vector current = pt.x;
    double current_error = r.clean_error;
    SubsetId pool;
    for (size_t i : ord) {
      if (!pool.Contains(i)) {
        const SubsetId trial = pool.With(i);
        std::vector<const ScoreModel*> members;
        std::vector<int> targets;
        for (size_t j : trial.Indices()) {
          members.push_back(mix.models[j].get());
          if (!all_targets.empty()) targets.push_back(all_targets[j]);
        }
        const auto objective = [&](const Vector& x, bool) {
          return SrhMulticlass(members, x, pt.y, targets);
        };
        const PgdOutcome out = PgdMinimize(objective, current, pt.x, tm, run);
        grad_evals += out.gradient_calls * long(members.size());
        iterations += out.iterations;
        const double e = MulticlassError(mix, out.x_best, pt.y);
        if (e > current_error) {
          current = out.x_best;
          current_error = e;
        }
        pool = FooledModels(mix, current, pt.y);
      }
      r.trace.push_back(current_error);
      r.pool_trace.push_back(pool);
    }
    Finish(mix, pt, current, &r);
    if (!have_best || r.error > best.error) {
      best = std::move(r);
      have_best = true;
    }
  }
  best.grad_evals = grad_evals;
  best.iterations = iterations;
  best.wall_time = Seconds(start);
  return best;
}

Dataset MakeBlobs(const Matrix& centers, int n_per_class, double stddev, Rng& rng) {
  Require(centers.rows() >= 2 && centers.cols() >= 1, "blobs need >= 2 centers");
  Require(n_per_class >= 1 && stddev >= 0.0, "invalid blob parameters");
  Dataset data;
  data.x.resize(centers.rows() * n_per_class, centers.cols());
  Eigen::Index row = 0;
  for (Eigen::Index k = 0; k < centers.rows(); ++k) {
    for (int n = 0; n < n_per_class; ++n, ++row) {
      for (Eigen::Index j = 0; j < centers.cols(); ++j) data.x(row, j) = rng.Normal(centers(k, j), stddev);
      data.y.push_back(int(k));
    }
  }
  return data;
}

MlpModel TrainMlp(const Dataset& data, int num_classes, const TrainConfig& cfg, Rng& rng) {
  const Eigen::Index n = data.x.rows(), d = data.x.cols();
  Require(n > 0 && size_t(n) == data.y.size(), "dataset rows and labels differ");
  Require(cfg.hidden >= 1 && cfg.epochs >= 0 && cfg.learning_rate > 0.0, "invalid training config");
  for (int label : data.y) Require(label >= 0 && label < num_classes, "training label out of range");
  auto glorot = [&](Eigen::Index out, Eigen::Index in) {
    const double a = std::sqrt(6.0 / double(in + out));
    Matrix w(out, in);
    for (Eigen::Index i = 0; i < out; ++i)
      for (Eigen::Index j = 0; j < in; ++j) w(i, j) = rng.Uniform(-a, a);
    return w;
  };
  Matrix w1 = glorot(cfg.hidden, d), w2 = glorot(num_classes, cfg.hidden);
  Vector b1 = Vector::Zero(cfg.hidden), b2 = Vector::Zero(num_classes);
  Matrix onehot = Matrix::Zero(n, num_classes);
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, data.y[i]) = 1.0;
  const Activation act = cfg.activation;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const Matrix z1 = (data.x * w1.transpose()).rowwise() + b1.transpose();
    const Matrix h1 = z1.unaryExpr([&](double v) { return Act(act, v); });
    Matrix s = (h1 * w2.transpose()).rowwise() + b2.transpose();
    // Softmax rows, then dL/ds = (p - onehot) / n.
    for (Eigen::Index i = 0; i < n; ++i) s.row(i) = Softmax(s.row(i).transpose()).transpose();
    const Matrix gs = (s - onehot) / double(n);
    const Matrix gw2 = gs.transpose() * h1;
    const Vector gb2 = gs.colwise().sum().transpose();
    Matrix gz1 = gs * w2;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < gz1.cols(); ++j) gz1(i, j) *= ActDeriv(act, z1(i, j), h1(i, j));
    w1 -= cfg.learning_rate * (gz1.transpose() * data.x);
    b1 -= cfg.learning_rate * gz1.colwise().sum().transpose();
    w2 -= cfg.learning_rate * gw2;
    b2 -= cfg.learning_rate * gb2;
  }
  return MlpModel({{w1, b1}, {w2, b2}}, act);
}

double Accuracy(const ScoreModel& model, const Dataset& data) {
  Require(data.x.rows() > 0, "empty dataset");
  int correct = 0;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
    const Vector s = model.Scores(data.x.row(i).transpose());
    if (!IsFooled(s, data.y[i])) ++correct;
  }
  return double(correct) / double(data.x.rows());
}

}  // namespace latclimb
