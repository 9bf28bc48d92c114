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

// latclimb command-line front end. Talks to the library only through the C
// interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "latclimb/latclimb.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitResource = 2;

struct Failure {
  lc_status status;
};

void Check(lc_status s) {
  if (s != LC_OK) throw Failure{s};
}

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using Model = Handle<lc_model, lc_model_free>;
using Point = Handle<lc_point, lc_point_free>;
using Result = Handle<lc_result, lc_result_free>;
using Lattice = Handle<lc_lattice, lc_lattice_free>;

std::string TakeString(char* s) {
  std::string out = s ? s : "";
  lc_string_free(s);
  return out;
}

void WriteFile(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path);
}

struct PointArgs {
  std::string file;
  std::string x;
  int y = 0;
  bool y_set = false;
};

void AddPointOptions(CLI::App* cmd, PointArgs* p) {
  cmd->add_option("--point", p->file, "Point JSON file {\"x\":[...],\"y\":label}");
  cmd->add_option("--x", p->x, "Inline point coordinates, comma separated");
  cmd->add_option("--y", p->y, "Inline point label")->each([p](const std::string&) { p->y_set = true; });
}

void LoadPoint(const PointArgs& args, Point* out) {
  if (!args.file.empty()) {
    if (!args.x.empty()) throw CLI::ValidationError("--point", "use either --point or --x/--y");
    Check(lc_point_load_file(args.file.c_str(), &out->p));
    return;
  }
  if (args.x.empty() || !args.y_set) throw CLI::ValidationError("--point", "a point is required (--point FILE or --x and --y)");
  std::vector<double> x;
  std::stringstream ss(args.x);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used = 0;
      x.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--x", "not a number: '" + item + "'");
    }
  }
  Check(lc_point_create(x.data(), int(x.size()), args.y, &out->p));
}

std::string FooledList(const lc_result* r) {
  std::vector<int> idx(64);
  const int n = lc_result_fooled(r, idx.data(), int(idx.size()));
  std::string s = "[";
  for (int i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(idx[i]);
  return s + "]";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial attacks on mixtures of classifiers"};
  app.set_version_flag("--version", std::string(lc_version()));
  app.require_subcommand(1);

  // attack
  std::string model_file, attack = "lca", norm = "l2", order = "weight", out, surrogate = "cross-entropy";
  double eps = 1.0, eta = 0.0;
  int steps = 0, restarts = 1;
  uint64_t seed = 42;
  bool frozen = false, random_init = false, trace = false;
  std::string step_mode = "default";
  PointArgs point;
  auto* cmd_attack = app.add_subcommand("attack", "Attack one point and write an AttackResult JSON");
  cmd_attack->add_option("--model", model_file, "Mixture JSON file")->required();
  AddPointOptions(cmd_attack, &point);
  cmd_attack->add_option("--attack", attack, "Attack name")
      ->check(CLI::IsMember({"eol-pgd", "loe-pgd", "arc", "arc-greedy", "lca"}));
  cmd_attack->add_option("--norm", norm, "Threat model norm")->check(CLI::IsMember({"l2", "linf"}));
  cmd_attack->add_option("--eps", eps, "Perturbation budget")->check(CLI::NonNegativeNumber);
  cmd_attack->add_option("--steps", steps, "PGD iterations (0: default)")->check(CLI::NonNegativeNumber);
  cmd_attack->add_option("--eta", eta, "PGD step size (0: default)")->check(CLI::NonNegativeNumber);
  cmd_attack->add_option("--order", order, "weight, random, or comma-separated indices");
  cmd_attack->add_option("--seed", seed, "Master seed");
  cmd_attack->add_option("--restarts", restarts, "Restarts")->check(CLI::PositiveNumber);
  cmd_attack->add_option("--surrogate", surrogate, "Multiclass EOL/LOE surrogate")
      ->check(CLI::IsMember({"cross-entropy", "rev-hinge"}));
  cmd_attack->add_option("--step-mode", step_mode, "PGD step rule")
      ->check(CLI::IsMember({"default", "raw", "steepest"}));
  cmd_attack->add_flag("--frozen-target", frozen, "Fix rival classes at the clean point");
  cmd_attack->add_flag("--random-init", random_init, "Random start inside the ball (EOL/LOE)");
  cmd_attack->add_flag("--trace", trace, "Include the per-step error trace");
  cmd_attack->add_option("--out", out, "Output JSON path (default: stdout)");

  // lattice
  std::string lat_model, lat_norm = "l2", lat_out;
  double lat_eps = 1.0;
  PointArgs lat_point;
  auto* cmd_lattice = app.add_subcommand("lattice", "Enumerate the adversarial lattice of a linear mixture");
  cmd_lattice->add_option("--model", lat_model, "Linear mixture JSON file")->required();
  AddPointOptions(cmd_lattice, &lat_point);
  cmd_lattice->add_option("--eps", lat_eps, "Perturbation budget")->check(CLI::NonNegativeNumber);
  cmd_lattice->add_option("--norm", lat_norm, "Threat model norm")->check(CLI::IsMember({"l2", "linf"}));
  cmd_lattice->add_option("--out", lat_out, "Output JSON path (default: stdout)");

  // experiment
  std::string exp_name, exp_config, exp_out = "results";
  std::vector<std::string> exp_set;
  int exp_jobs = 0, exp_trials = 0;
  uint64_t exp_seed = 0;
  bool exp_seed_set = false;
  auto* cmd_exp = app.add_subcommand("experiment", "Run an experiment and write CSV/JSON outputs");
  cmd_exp->add_option("name", exp_name, "Experiment")
      ->required()
      ->check(CLI::IsMember({"sweep-angle", "random-linear", "maximality-audit", "multiclass-demo"}));
  cmd_exp->add_option("--config", exp_config, "JSON config file");
  cmd_exp->add_option("--out", exp_out, "Output directory");
  cmd_exp->add_option("--seed", exp_seed, "Master seed")->each([&](const std::string&) { exp_seed_set = true; });
  cmd_exp->add_option("--jobs", exp_jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd_exp->add_option("--trials", exp_trials, "Trial count")->check(CLI::PositiveNumber);
  cmd_exp->add_option("--set", exp_set, "Config override key=value (value parsed as JSON when possible)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_attack) {
      Model model;
      Point pt;
      Check(lc_model_load_file(model_file.c_str(), &model.p));
      LoadPoint(point, &pt);
      lc_attack_options o;
      lc_attack_options_init(&o);
      o.attack = attack.c_str();
      o.norm = norm.c_str();
      o.epsilon = eps;
      o.steps = steps;
      o.eta = eta;
      o.order = order.c_str();
      o.seed = seed;
      o.restarts = restarts;
      o.surrogate = surrogate.c_str();
      o.frozen_target = frozen;
      o.random_init = random_init;
      o.steepest = step_mode == "raw" ? 0 : step_mode == "steepest" ? 1 : -1;
      Result r;
      Check(lc_attack(model.p, pt.p, &o, &r.p));
      char* json = nullptr;
      Check(lc_result_to_json(r.p, trace, &json));
      const std::string text = TakeString(json) + "\n";
      char summary[128];
      std::snprintf(summary, sizeof(summary), "error=%.6g", lc_result_error(r.p));
      const std::string line = std::string(summary) + " fooled=" + FooledList(r.p);
      if (out.empty()) {
        std::cout << text;
        std::cerr << line << "\n";
      } else {
        WriteFile(out, text);
        std::cout << line << "\n";
      }
    } else if (*cmd_lattice) {
      Model model;
      Point pt;
      Check(lc_model_load_file(lat_model.c_str(), &model.p));
      LoadPoint(lat_point, &pt);
      Lattice lat;
      Check(lc_lattice_build(model.p, pt.p, lat_norm.c_str(), lat_eps, &lat.p));
      char* json = nullptr;
      Check(lc_lattice_to_json(lat.p, &json));
      const std::string text = TakeString(json) + "\n";
      const std::string line = "nodes=" + std::to_string(lc_lattice_node_count(lat.p)) +
                               " maximal=" + std::to_string(lc_lattice_maximal_count(lat.p));
      if (lat_out.empty()) {
        std::cout << text;
        std::cerr << line << "\n";
      } else {
        WriteFile(lat_out, text);
        std::cout << line << "\n";
      }
    } else if (*cmd_exp) {
      std::string config = "{}";
      if (!exp_config.empty()) {
        std::ifstream in(exp_config, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open config " + exp_config);
        std::ostringstream ss;
        ss << in.rdbuf();
        config = ss.str();
      }
      std::vector<std::string> overrides;
      if (exp_seed_set) overrides.push_back("seed=" + std::to_string(exp_seed));
      if (exp_jobs > 0) overrides.push_back("jobs=" + std::to_string(exp_jobs));
      if (exp_trials > 0) overrides.push_back("trials=" + std::to_string(exp_trials));
      overrides.insert(overrides.end(), exp_set.begin(), exp_set.end());
      std::vector<const char*> raw;
      for (const auto& o : overrides) raw.push_back(o.c_str());
      char* manifest = nullptr;
      Check(lc_run_experiment(exp_name.c_str(), config.c_str(), raw.data(), int(raw.size()),
                              exp_out.c_str(), &manifest));
      lc_string_free(manifest);
      std::cout << "wrote " << exp_out << "/manifest.json\n";
    }
  } catch (const Failure& f) {
    std::cerr << "latclimb: " << lc_last_error() << "\n";
    return f.status == LC_ERR_RESOURCE_LIMIT ? kExitResource : kExitUsage;
  } catch (const CLI::Error& e) {
    std::cerr << "latclimb: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "latclimb: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}
