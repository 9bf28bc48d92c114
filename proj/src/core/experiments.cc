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

#include "core/experiments.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include "core/error.h"
#include "core/lattice_oracle.h"
#include "core/multiclass.h"

namespace latclimb {

namespace {

using Clock = std::chrono::steady_clock;

double Seconds(Clock::time_point start) {
  return std::max(std::chrono::duration<double>(Clock::now() - start).count(), 1e-9);
}

[[noreturn]] void BadField(const std::string& key, const std::string& what) {
  Fail(ErrorCode::kInvalidInput, "config field '" + key + "': " + what);
}

// Reads known fields from a JSON object and rejects everything else.
class ConfigReader {
 public:
  explicit ConfigReader(const Json& j) : j_(j) {
    if (!j_.is_null() && !j_.is_object()) BadField("<root>", "expected a JSON object");
  }

  void Int(const char* key, int* out, int lo, int hi = std::numeric_limits<int>::max()) {
    if (const Json* v = Get(key)) {
      if (!v->is_number_integer()) BadField(key, "expected an integer");
      const long long x = v->get<long long>();
      if (x < lo || x > hi) {
        BadField(key, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
      }
      *out = int(x);
    }
  }

  void Double(const char* key, double* out, double lo, bool open_lo = false) {
    if (const Json* v = Get(key)) {
      if (!v->is_number()) BadField(key, "expected a number");
      const double x = v->get<double>();
      if (!std::isfinite(x) || x < lo || (open_lo && x == lo)) {
        BadField(key, std::string("must be ") + (open_lo ? "> " : ">= ") + FormatNumber(lo));
      }
      *out = x;
    }
  }

  void Bool(const char* key, bool* out) {
    if (const Json* v = Get(key)) {
      if (!v->is_boolean()) BadField(key, "expected true or false");
      *out = v->get<bool>();
    }
  }

  void Seed(const char* key, uint64_t* out) {
    if (const Json* v = Get(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
        BadField(key, "expected a non-negative integer");
      }
      *out = v->get<uint64_t>();
    }
  }

  void NormField(const char* key, Norm* out) {
    if (const Json* v = Get(key)) {
      if (!v->is_string()) BadField(key, "expected \"l2\" or \"linf\"");
      try {
        *out = ParseNorm(v->get<std::string>());
      } catch (const Error& e) {
        BadField(key, e.what());
      }
    }
  }

  void Strings(const char* key, std::vector<std::string>* out, const std::set<std::string>& allowed) {
    if (const Json* v = Get(key)) {
      if (!v->is_array() || v->empty()) BadField(key, "expected a non-empty array of strings");
      out->clear();
      for (const auto& e : *v) {
        if (!e.is_string() || !allowed.count(e.get<std::string>())) {
          BadField(key, "unknown entry " + e.dump());
        }
        out->push_back(e.get<std::string>());
      }
    }
  }

  void ArcCandidateField(const char* key, ArcCandidate* out) {
    if (const Json* v = Get(key)) {
      const std::string s = v->is_string() ? v->get<std::string>() : "";
      if (s == "full-budget") {
        *out = ArcCandidate::kFullBudget;
      } else if (s == "projected") {
        *out = ArcCandidate::kProjected;
      } else {
        BadField(key, "expected \"full-budget\" or \"projected\"");
      }
    }
  }

  void Finish() const {
    if (!j_.is_object()) return;
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) BadField(item.key(), "not a recognized field");
    }
  }

 private:
  const Json* Get(const char* key) {
    seen_.insert(key);
    if (!j_.is_object()) return nullptr;
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const Json& j_;
  std::set<std::string> seen_;
};

const char* ArcCandidateName(ArcCandidate c) {
  return c == ArcCandidate::kFullBudget ? "full-budget" : "projected";
}

// Distance from x to the closest classifier boundary is at most epsilon.
bool AnyVulnerable(const Mixture& mix, const LabeledPoint& pt, const ThreatModel& tm) {
  for (const auto& h : mix.classifiers) {
    if (SignedMargin(h, pt.x, pt.y) / DualNorm(h.w, tm.norm) <= tm.epsilon) return true;
  }
  return false;
}

}  // namespace

void ParallelFor(int n, int jobs, const std::function<void(int)>& fn) {
  Require(jobs >= 1, "jobs must be >= 1");
  if (n <= 0) return;
  const int workers = std::min(jobs, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::string FormatNumber(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// ---- angle sweep ----

AngleSweepConfig AngleSweepConfig::FromJson(const Json& j) {
  AngleSweepConfig c;
  ConfigReader r(j);
  r.Double("theta_step_deg", &c.theta_step_deg, 0.0, true);
  r.Double("distance", &c.distance, 0.0);
  r.Double("epsilon", &c.epsilon, 0.0);
  r.NormField("norm", &c.norm);
  r.ArcCandidateField("arc_candidate", &c.arc_candidate);
  r.Int("pgd_multiplier", &c.pgd_multiplier, 1, 1000);
  r.Seed("seed", &c.seed);
  r.Finish();
  if (c.theta_step_deg > 180.0) BadField("theta_step_deg", "must be <= 180");
  return c;
}

Json AngleSweepConfig::ToJson() const {
  return {{"theta_step_deg", theta_step_deg}, {"distance", distance}, {"epsilon", epsilon},
          {"norm", NormName(norm)}, {"arc_candidate", ArcCandidateName(arc_candidate)},
          {"pgd_multiplier", pgd_multiplier}, {"seed", seed}};
}

Mixture AngleMixture(double theta_deg, double distance, int d) {
  Require(d >= 2, "angle mixture needs d >= 2");
  const double half = theta_deg * std::numbers::pi / 360.0;
  Vector w1 = Vector::Zero(d), w2 = Vector::Zero(d);
  w1[0] = std::cos(-half);
  w1[1] = std::sin(-half);
  w2[0] = std::cos(half);
  w2[1] = std::sin(half);
  return Mixture::Make({{w1, -distance}, {w2, -distance}}, {});
}

std::vector<AngleRow> RunAngleSweep(const AngleSweepConfig& cfg) {
  const ThreatModel tm = ThreatModel::Make(cfg.norm, cfg.epsilon);
  const int count = int(std::floor(180.0 / cfg.theta_step_deg + 1e-9)) + 1;
  std::vector<AngleRow> rows;
  for (int k = 0; k < count; ++k) {
    const double theta = k * cfg.theta_step_deg;
    const Mixture mix = AngleMixture(theta, cfg.distance);
    const LabeledPoint pt{Vector::Zero(2), -1};
    const PgdConfig pgd = PgdConfig::ForMixture(mix.size(), std::max(cfg.epsilon, 1e-12), cfg.pgd_multiplier);
    const auto order = WeightOrder(mix.weights);
    auto start = Clock::now();
    const OptimalAttack opt = OptimalAttackBruteForce(mix, pt, tm);
    const double oracle_time = Seconds(start);
    const AttackResult eol = EolPgdLinear(mix, pt, tm, pgd);
    const AttackResult arc = ArcLinear(mix, pt, tm, order, {1e-6, cfg.arc_candidate});
    const AttackResult lca = LcaLinear(mix, pt, tm, pgd, order);
    rows.push_back({theta, "eol-pgd", eol.error, opt.error, eol.grad_evals, eol.wall_time});
    rows.push_back({theta, "arc", arc.error, opt.error, arc.grad_evals, arc.wall_time});
    rows.push_back({theta, "lca", lca.error, opt.error, lca.grad_evals, lca.wall_time});
    rows.push_back({theta, "oracle", opt.error, opt.error, 0, oracle_time});
  }
  return rows;
}

std::string AngleSweepCsv(const std::vector<AngleRow>& rows) {
  std::ostringstream out;
  out << "theta_deg,attack,error,oracle_error,grad_evals,wall_time_s\n";
  for (const auto& r : rows) {
    out << FormatNumber(r.theta_deg) << ',' << r.attack << ',' << FormatNumber(r.error) << ','
        << FormatNumber(r.oracle_error) << ',' << r.grad_evals << ',' << FormatNumber(r.wall_time)
        << '\n';
  }
  return out.str();
}

// ---- random linear ----

RandomLinearConfig RandomLinearConfig::FromJson(const Json& j) {
  RandomLinearConfig c;
  ConfigReader r(j);
  r.Int("d", &c.d, 1, 1 << 20);
  r.Int("m_min", &c.m_min, 1, kMaxMixtureSize);
  r.Int("m_max", &c.m_max, 1, kMaxMixtureSize);
  r.Int("trials", &c.trials, 1);
  r.Double("alpha", &c.alpha, -std::numeric_limits<double>::max());
  r.Double("beta", &c.beta, 0.0, true);
  r.Double("temperature", &c.temperature, 0.0, true);
  r.Double("epsilon", &c.epsilon, 0.0);
  r.NormField("norm", &c.norm);
  r.Strings("attacks", &c.attacks, {"eol-pgd", "arc", "lca"});
  r.Int("pgd_multiplier", &c.pgd_multiplier, 1, 1000);
  r.Seed("seed", &c.seed);
  r.Int("jobs", &c.jobs, 1, 1024);
  r.Finish();
  if (c.m_max < c.m_min) BadField("m_max", "must be >= m_min");
  return c;
}

Json RandomLinearConfig::ToJson() const {
  return {{"d", d}, {"m_min", m_min}, {"m_max", m_max}, {"trials", trials}, {"alpha", alpha},
          {"beta", beta}, {"temperature", temperature}, {"epsilon", epsilon},
          {"norm", NormName(norm)}, {"attacks", attacks}, {"pgd_multiplier", pgd_multiplier},
          {"seed", seed}, {"jobs", jobs}};
}

RandomLinearOutput RunRandomLinear(const RandomLinearConfig& cfg) {
  const ThreatModel tm = ThreatModel::Make(cfg.norm, cfg.epsilon);
  struct Job {
    int m, trial;
  };
  std::vector<Job> jobs;
  for (int m = cfg.m_min; m <= cfg.m_max; ++m)
    for (int t = 0; t < cfg.trials; ++t) jobs.push_back({m, t});
  const size_t na = cfg.attacks.size();
  std::vector<TrialRecord> records(jobs.size() * na);
  std::vector<char> vulnerable(jobs.size(), 0);
  ParallelFor(int(jobs.size()), cfg.jobs, [&](int k) {
    const auto [m, trial] = jobs[k];
    Rng rng = Rng::Stream(cfg.seed, {0x11ea5, uint64_t(m), uint64_t(trial)});
    const Mixture mix = SampleRandomMixture(cfg.d, m, cfg.alpha, cfg.beta, cfg.temperature, rng);
    const LabeledPoint pt{Vector::Zero(cfg.d), -1};
    vulnerable[k] = AnyVulnerable(mix, pt, tm);
    const PgdConfig pgd = PgdConfig::ForMixture(m, std::max(cfg.epsilon, 1e-12), cfg.pgd_multiplier);
    const auto order = WeightOrder(mix.weights);
    for (size_t a = 0; a < na; ++a) {
      const std::string& name = cfg.attacks[a];
      AttackResult r;
      if (name == "eol-pgd") {
        r = EolPgdLinear(mix, pt, tm, pgd);
      } else if (name == "arc") {
        r = ArcLinear(mix, pt, tm, order);
      } else {
        r = LcaLinear(mix, pt, tm, pgd, order);
      }
      records[k * na + a] = {m, trial, name, r.error, r.grad_evals, r.wall_time};
    }
  });
  RandomLinearOutput out;
  out.records = std::move(records);
  for (size_t k = 0; k < jobs.size(); ++k) {
    if (vulnerable[k]) out.vulnerable_trials.emplace_back(jobs[k].m, jobs[k].trial);
  }
  out.summary = Summarize(out.records, cfg.attacks);
  return out;
}

std::vector<SummaryRow> Summarize(const std::vector<TrialRecord>& records,
                                  const std::vector<std::string>& attacks) {
  constexpr double kZ99 = 2.5758293035489004;
  std::set<int> ms;
  for (const auto& r : records) ms.insert(r.m);
  std::vector<SummaryRow> rows;
  for (int m : ms) {
    std::map<int, double> lca;
    for (const auto& r : records)
      if (r.m == m && r.attack == "lca") lca[r.trial] = r.error;
    for (const auto& attack : attacks) {
      std::vector<double> errors, ratios;
      double time = 0.0;
      for (const auto& r : records) {
        if (r.m != m || r.attack != attack) continue;
        errors.push_back(r.error);
        time += r.wall_time;
        const auto it = lca.find(r.trial);
        if (it != lca.end() && it->second > 0.0) ratios.push_back(r.error / it->second);
      }
      if (errors.empty()) continue;
      const double n = double(errors.size());
      double mean = 0.0;
      for (double e : errors) mean += e;
      mean /= n;
      double var = 0.0;
      for (double e : errors) var += (e - mean) * (e - mean);
      const double sd = errors.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      const double half = kZ99 * sd / std::sqrt(n);
      double ratio = std::numeric_limits<double>::quiet_NaN();
      if (!ratios.empty()) {
        ratio = 0.0;
        for (double v : ratios) ratio += v;
        ratio /= double(ratios.size());
      }
      rows.push_back({m, attack, mean, mean - half, mean + half, ratio, time / n});
    }
  }
  return rows;
}

std::string RandomLinearCsv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "m,trial,attack,error,grad_evals,wall_time_s\n";
  for (const auto& r : records) {
    out << r.m << ',' << r.trial << ',' << r.attack << ',' << FormatNumber(r.error) << ','
        << r.grad_evals << ',' << FormatNumber(r.wall_time) << '\n';
  }
  return out.str();
}

std::string SummaryCsv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "m,attack,mean_error,ci99_lo,ci99_hi,mean_ratio_to_lca,mean_time_s\n";
  for (const auto& r : rows) {
    out << r.m << ',' << r.attack << ',' << FormatNumber(r.mean_error) << ','
        << FormatNumber(r.ci99_lo) << ',' << FormatNumber(r.ci99_hi) << ','
        << FormatNumber(r.mean_ratio_to_lca) << ',' << FormatNumber(r.mean_time) << '\n';
  }
  return out.str();
}

// ---- maximality audit ----

AuditConfig AuditConfig::FromJson(const Json& j) {
  AuditConfig c;
  ConfigReader r(j);
  r.Int("trials", &c.trials, 1);
  r.Int("m_min", &c.m_min, 1, 8);
  r.Int("m_max", &c.m_max, 1, 8);
  r.Int("d_min", &c.d_min, 1, 1 << 16);
  r.Int("d_max", &c.d_max, 1, 1 << 16);
  r.Double("alpha", &c.alpha, -std::numeric_limits<double>::max());
  r.Double("beta", &c.beta, 0.0, true);
  r.Double("temperature", &c.temperature, 0.0, true);
  r.Double("epsilon", &c.epsilon, 0.0, true);
  r.NormField("norm", &c.norm);
  r.Int("pgd_multiplier", &c.pgd_multiplier, 1, 1000);
  r.Bool("late_halving", &c.late_halving);
  r.Int("steps_override", &c.steps_override, 0);
  r.Seed("seed", &c.seed);
  r.Int("jobs", &c.jobs, 1, 1024);
  r.Finish();
  if (c.m_max < c.m_min) BadField("m_max", "must be >= m_min");
  if (c.d_max < c.d_min) BadField("d_max", "must be >= d_min");
  return c;
}

Json AuditConfig::ToJson() const {
  return {{"trials", trials}, {"m_min", m_min}, {"m_max", m_max}, {"d_min", d_min},
          {"d_max", d_max}, {"alpha", alpha}, {"beta", beta}, {"temperature", temperature},
          {"epsilon", epsilon}, {"norm", NormName(norm)}, {"pgd_multiplier", pgd_multiplier},
          {"late_halving", late_halving}, {"steps_override", steps_override}, {"seed", seed},
          {"jobs", jobs}};
}

PgdConfig AuditConfig::Pgd(int m) const {
  PgdConfig p = PgdConfig::ForMixture(m, epsilon, pgd_multiplier);
  if (steps_override > 0) {
    p.steps = steps_override;
    p.eta = epsilon / std::sqrt(double(p.steps));
  }
  if (late_halving) p.SetLateHalving();
  return p;
}

Json AuditReport::ToJson() const {
  Json failures = Json::array();
  for (const auto& t : trials) {
    if (!t.degenerate && !t.maximal) failures.push_back(t.dump);
  }
  return {{"pass_fraction", pass_fraction},
          {"evaluated", evaluated},
          {"passed", passed},
          {"excluded_degenerate", excluded_degenerate},
          {"grad_bound_violations", grad_bound_violations},
          {"ball_violations", ball_violations},
          {"oracle_violations", oracle_violations},
          {"failures", failures}};
}

AuditReport RunMaximalityAudit(const AuditConfig& cfg) {
  const ThreatModel tm = ThreatModel::Make(cfg.norm, cfg.epsilon);
  auto run_trial = [&](int trial) {
    Rng rng = Rng::Stream(cfg.seed, {0xa0d17, uint64_t(trial)});
    AuditTrial t;
    t.trial = trial;
    t.m = cfg.m_min + int(rng.Below(uint64_t(cfg.m_max - cfg.m_min + 1)));
    t.d = cfg.d_min + int(rng.Below(uint64_t(cfg.d_max - cfg.d_min + 1)));
    const Mixture mix = SampleRandomMixture(t.d, t.m, cfg.alpha, cfg.beta, cfg.temperature, rng);
    const LabeledPoint pt{Vector::Zero(t.d), -1};
    const auto start = Clock::now();
    const AdversarialLattice lattice = BuildLattice(mix, pt, tm);
    t.degenerate = lattice.degenerate;
    for (const auto& n : lattice.nodes) t.oracle_error = std::max(t.oracle_error, n.mass);
    const PgdConfig pgd = cfg.Pgd(t.m);
    t.steps = pgd.steps;
    const auto order = WeightOrder(mix.weights);
    const AttackResult lca = LcaLinear(mix, pt, tm, pgd, order);
    const AttackResult eol = EolPgdLinear(mix, pt, tm, pgd);
    t.wall_time = Seconds(start);
    t.lca_error = lca.error;
    t.eol_error = eol.error;
    t.lca_grad_evals = lca.grad_evals;
    t.eol_grad_evals = eol.grad_evals;
    const long T = pgd.steps, m = t.m;
    t.grad_bounds_ok = eol.grad_evals == T * m && lca.grad_evals <= T * m * (m + 1) / 2;
    t.within_ball = LpNorm(lca.delta, tm.norm) <= tm.epsilon + 1e-9 &&
                    LpNorm(eol.delta, tm.norm) <= tm.epsilon + 1e-9;
    const auto maximal = MaximalElements(lattice);
    const bool in_max = std::find(maximal.begin(), maximal.end(), lca.pool) != maximal.end();
    t.maximal = in_max && lca.fooled == lca.pool;
    if (!t.maximal) {
      Json max_json = Json::array();
      for (SubsetId s : maximal) max_json.push_back(s.Indices());
      t.dump = {{"trial", trial}, {"m", t.m}, {"d", t.d}, {"steps", pgd.steps},
                {"mixture", latclimb::ToJson(mix)}, {"point", latclimb::ToJson(pt)},
                {"pool", lca.pool.Indices()}, {"fooled", lca.fooled.Indices()},
                {"maximal", max_json}, {"lattice", latclimb::ToJson(lattice)},
                {"degenerate", t.degenerate}};
    }
    return t;
  };

  AuditReport report;
  const int chunk = std::max(cfg.trials, 1);
  const int cap = 20 * cfg.trials;
  for (int begin = 0; report.evaluated < cfg.trials && begin < cap; begin += chunk) {
    std::vector<AuditTrial> batch(chunk);
    ParallelFor(chunk, cfg.jobs, [&](int k) { batch[k] = run_trial(begin + k); });
    for (auto& t : batch) {
      if (report.evaluated >= cfg.trials) break;
      if (t.degenerate) {
        ++report.excluded_degenerate;
      } else {
        ++report.evaluated;
        if (t.maximal) ++report.passed;
        if (t.lca_error > t.oracle_error + 1e-9 || t.eol_error > t.oracle_error + 1e-9) {
          ++report.oracle_violations;
        }
      }
      if (!t.grad_bounds_ok) ++report.grad_bound_violations;
      if (!t.within_ball) ++report.ball_violations;
      report.trials.push_back(std::move(t));
    }
  }
  report.pass_fraction = report.evaluated > 0 ? double(report.passed) / report.evaluated : 0.0;
  return report;
}

std::string AuditCsv(const AuditReport& report) {
  std::ostringstream out;
  out << "trial,m,d,steps,degenerate,maximal,lca_error,eol_error,oracle_error,lca_grad_evals,"
         "eol_grad_evals,wall_time_s\n";
  for (const auto& t : report.trials) {
    out << t.trial << ',' << t.m << ',' << t.d << ',' << t.steps << ',' << int(t.degenerate) << ','
        << int(t.maximal) << ',' << FormatNumber(t.lca_error) << ',' << FormatNumber(t.eol_error)
        << ',' << FormatNumber(t.oracle_error) << ',' << t.lca_grad_evals << ','
        << t.eol_grad_evals << ',' << FormatNumber(t.wall_time) << '\n';
  }
  return out.str();
}

// ---- multiclass demo ----

MulticlassDemoConfig MulticlassDemoConfig::FromJson(const Json& j) {
  MulticlassDemoConfig c;
  ConfigReader r(j);
  r.Int("m", &c.m, 1, kMaxMixtureSize);
  r.Int("classes", &c.classes, 2, 64);
  r.Int("d", &c.d, 2, 4096);
  r.Int("train_per_class", &c.train_per_class, 1);
  r.Int("test_per_class", &c.test_per_class, 1);
  r.Double("blob_radius", &c.blob_radius, 0.0, true);
  r.Double("blob_std", &c.blob_std, 0.0);
  r.Int("hidden", &c.hidden, 1, 64);
  r.Int("epochs", &c.epochs, 0);
  r.Double("learning_rate", &c.learning_rate, 0.0, true);
  r.Double("epsilon", &c.epsilon, 0.0);
  r.NormField("norm", &c.norm);
  r.Int("steps", &c.steps, 1);
  r.Int("restarts", &c.restarts, 1);
  r.Bool("low_alignment", &c.low_alignment);
  r.Int("low_alignment_m", &c.low_alignment_m, 1, kMaxMixtureSize);
  r.Double("low_alignment_angle_deg", &c.low_alignment_angle_deg, 0.0);
  r.Double("low_alignment_distance", &c.low_alignment_distance, 0.0, true);
  r.Double("low_alignment_std", &c.low_alignment_std, 0.0);
  r.Seed("seed", &c.seed);
  r.Int("jobs", &c.jobs, 1, 1024);
  r.Finish();
  return c;
}

Json MulticlassDemoConfig::ToJson() const {
  return {{"m", m}, {"classes", classes}, {"d", d}, {"train_per_class", train_per_class},
          {"test_per_class", test_per_class}, {"blob_radius", blob_radius},
          {"blob_std", blob_std}, {"hidden", hidden}, {"epochs", epochs},
          {"learning_rate", learning_rate}, {"epsilon", epsilon}, {"norm", NormName(norm)},
          {"steps", steps}, {"restarts", restarts}, {"low_alignment", low_alignment},
          {"low_alignment_m", low_alignment_m},
          {"low_alignment_angle_deg", low_alignment_angle_deg},
          {"low_alignment_distance", low_alignment_distance},
          {"low_alignment_std", low_alignment_std}, {"seed", seed}, {"jobs", jobs}};
}

const std::vector<std::string>& DemoAttacks() {
  static const std::vector<std::string> names = {"eol-pgd", "loe-pgd", "arc-greedy", "lca"};
  return names;
}

namespace {

TrainConfig DemoTrainConfig(const MulticlassDemoConfig& cfg) {
  TrainConfig t;
  t.hidden = cfg.hidden;
  t.epochs = cfg.epochs;
  t.learning_rate = cfg.learning_rate;
  return t;
}

DemoRow EvaluateDemo(const std::string& name, const MulticlassMixture& mix,
                     const std::vector<LabeledPoint>& points, const MulticlassDemoConfig& cfg,
                     uint64_t stream) {
  const ThreatModel tm = ThreatModel::Make(cfg.norm, cfg.epsilon);
  const size_t na = DemoAttacks().size();
  std::vector<double> clean(points.size());
  std::vector<std::vector<double>> acc(points.size(), std::vector<double>(na));
  const auto order = WeightOrder(mix.weights);
  ParallelFor(int(points.size()), cfg.jobs, [&](int p) {
    const LabeledPoint& pt = points[p];
    MulticlassConfig mc = MulticlassConfig::Defaults(cfg.epsilon);
    mc.pgd.steps = cfg.steps;
    mc.restarts = cfg.restarts;
    mc.random_init = cfg.restarts > 1;
    mc.seed = Rng::Stream(cfg.seed, {0xde70, stream, uint64_t(p)}).engine()();
    clean[p] = 1.0 - MulticlassError(mix, pt.x, pt.y);
    acc[p][0] = 1.0 - EolPgdMulticlass(mix, pt, tm, mc).error;
    acc[p][1] = 1.0 - LoePgdMulticlass(mix, pt, tm, mc).error;
    acc[p][2] = 1.0 - ArcGreedyMulticlass(mix, pt, tm, mc, order).error;
    acc[p][3] = 1.0 - LcaMulticlass(mix, pt, tm, mc, order).error;
  });
  DemoRow row{name, mix.size(), 0.0, std::vector<double>(na, 0.0)};
  for (size_t p = 0; p < points.size(); ++p) {
    row.clean += clean[p];
    for (size_t a = 0; a < na; ++a) row.accuracy[a] += acc[p][a];
  }
  const double n = double(points.size());
  row.clean /= n;
  for (double& a : row.accuracy) a /= n;
  return row;
}

std::vector<LabeledPoint> ToPoints(const Dataset& data) {
  std::vector<LabeledPoint> pts;
  for (Eigen::Index i = 0; i < data.x.rows(); ++i) pts.push_back({data.x.row(i).transpose(), data.y[i]});
  return pts;
}

}  // namespace

LowAlignmentFixture MakeLowAlignmentFixture(const MulticlassDemoConfig& cfg) {
  const int m = cfg.low_alignment_m;
  const double spread = cfg.low_alignment_angle_deg * std::numbers::pi / 180.0;
  std::vector<std::shared_ptr<const ScoreModel>> models;
  for (int i = 0; i < m; ++i) {
    const double angle = m == 1 ? 0.0 : spread * (double(i) - 0.5 * double(m - 1));
    Matrix centers = Matrix::Zero(2, 2);
    centers(1, 0) = cfg.low_alignment_distance * std::cos(angle);
    centers(1, 1) = cfg.low_alignment_distance * std::sin(angle);
    Rng rng = Rng::Stream(cfg.seed, {0x10a1, 1, uint64_t(i)});
    const Dataset data = MakeBlobs(centers, cfg.train_per_class, cfg.low_alignment_std, rng);
    models.push_back(std::make_shared<MlpModel>(TrainMlp(data, 2, DemoTrainConfig(cfg), rng)));
  }
  Rng test_rng = Rng::Stream(cfg.seed, {0x10a1, 2});
  std::vector<LabeledPoint> points;
  for (int k = 0; k < cfg.test_per_class; ++k) {
    Vector x(2);
    x << test_rng.Normal(0.0, cfg.low_alignment_std), test_rng.Normal(0.0, cfg.low_alignment_std);
    points.push_back({x, 0});
  }
  return {MulticlassMixture::Make(std::move(models), {}), std::move(points)};
}

std::vector<DemoRow> RunMulticlassDemo(const MulticlassDemoConfig& cfg) {
  Matrix centers = Matrix::Zero(cfg.classes, cfg.d);
  for (int k = 0; k < cfg.classes; ++k) {
    const double a = 2.0 * std::numbers::pi * k / cfg.classes;
    centers(k, 0) = cfg.blob_radius * std::cos(a);
    centers(k, 1) = cfg.blob_radius * std::sin(a);
  }
  std::vector<std::shared_ptr<const ScoreModel>> models;
  for (int i = 0; i < cfg.m; ++i) {
    Rng rng = Rng::Stream(cfg.seed, {0xb10b, 1, uint64_t(i)});
    const Dataset data = MakeBlobs(centers, cfg.train_per_class, cfg.blob_std, rng);
    models.push_back(std::make_shared<MlpModel>(TrainMlp(data, cfg.classes, DemoTrainConfig(cfg), rng)));
  }
  Rng test_rng = Rng::Stream(cfg.seed, {0xb10b, 2});
  const Dataset test = MakeBlobs(centers, cfg.test_per_class, cfg.blob_std, test_rng);
  std::vector<DemoRow> rows;
  rows.push_back(EvaluateDemo("blobs", MulticlassMixture::Make(std::move(models), {}), ToPoints(test), cfg, 1));
  if (cfg.low_alignment) {
    const LowAlignmentFixture fx = MakeLowAlignmentFixture(cfg);
    rows.push_back(EvaluateDemo("low-alignment", fx.mixture, fx.points, cfg, 2));
  }
  return rows;
}

std::string MulticlassDemoCsv(const std::vector<DemoRow>& rows) {
  std::ostringstream out;
  out << "mixture,m,clean";
  for (const auto& a : DemoAttacks()) out << ',' << a;
  out << '\n';
  for (const auto& r : rows) {
    out << r.mixture << ',' << r.m << ',' << FormatNumber(r.clean);
    for (double a : r.accuracy) out << ',' << FormatNumber(a);
    out << '\n';
  }
  return out.str();
}

// ---- orchestration ----

Json RunExperiment(const std::string& name, const Json& config, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) Fail(ErrorCode::kIo, "cannot create " + out_dir + ": " + ec.message());
  const auto path = [&](const char* file) { return (fs::path(out_dir) / file).string(); };
  Json manifest = {{"experiment", name}, {"version", LATCLIMB_VERSION}};
  Json outputs = Json::array();
  auto emit = [&](const char* file, const std::string& content) {
    WriteTextFile(path(file), content);
    outputs.push_back(file);
  };
  if (name == "sweep-angle") {
    const auto cfg = AngleSweepConfig::FromJson(config);
    manifest["config"] = cfg.ToJson();
    manifest["seed"] = cfg.seed;
    emit("angle_sweep.csv", AngleSweepCsv(RunAngleSweep(cfg)));
  } else if (name == "random-linear") {
    const auto cfg = RandomLinearConfig::FromJson(config);
    manifest["config"] = cfg.ToJson();
    manifest["seed"] = cfg.seed;
    const RandomLinearOutput out = RunRandomLinear(cfg);
    emit("random_linear.csv", RandomLinearCsv(out.records));
    emit("random_linear_summary.csv", SummaryCsv(out.summary));
    // Trials with some boundary within epsilon of x, per m.
    std::map<int, int> counts;
    for (int m = cfg.m_min; m <= cfg.m_max; ++m) counts[m] = 0;
    for (const auto& v : out.vulnerable_trials) ++counts[v.first];
    Json vul = Json::array();
    for (const auto& [m, n] : counts) vul.push_back({{"m", m}, {"vulnerable_trials", n}});
    manifest["vulnerability"] = vul;
  } else if (name == "maximality-audit") {
    const auto cfg = AuditConfig::FromJson(config);
    manifest["config"] = cfg.ToJson();
    manifest["seed"] = cfg.seed;
    const AuditReport report = RunMaximalityAudit(cfg);
    emit("maximality_audit.csv", AuditCsv(report));
    emit("maximality_report.json", report.ToJson().dump(2) + "\n");
    manifest["pass_fraction"] = report.pass_fraction;
  } else if (name == "multiclass-demo") {
    const auto cfg = MulticlassDemoConfig::FromJson(config);
    manifest["config"] = cfg.ToJson();
    manifest["seed"] = cfg.seed;
    emit("multiclass_demo.csv", MulticlassDemoCsv(RunMulticlassDemo(cfg)));
  } else {
    Fail(ErrorCode::kInvalidInput,
         "unknown experiment '" + name +
             "' (expected sweep-angle, random-linear, maximality-audit or multiclass-demo)");
  }
  manifest["outputs"] = outputs;
  WriteTextFile(path("manifest.json"), manifest.dump(2) + "\n");
  return manifest;
}

}  // namespace latclimb
