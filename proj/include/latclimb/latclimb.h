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

/* C interface to the latclimb library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every function returning lc_status stores a message retrievable with
 * lc_last_error() on failure; the message is per thread. Strings returned
 * through char** must be released with lc_string_free(). */

#ifndef LATCLIMB_LATCLIMB_H_
#define LATCLIMB_LATCLIMB_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LC_API __declspec(dllexport)
#else
#define LC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lc_status {
  LC_OK = 0,
  LC_ERR_INVALID_INPUT = 1,
  LC_ERR_CONTRACT = 2,
  LC_ERR_RESOURCE_LIMIT = 3,
  LC_ERR_IO = 4,
  LC_ERR_PARSE = 5,
  LC_ERR_INCOMPATIBLE = 6,
  LC_ERR_INTERNAL = 7
} lc_status;

typedef enum lc_model_kind { LC_MODEL_LINEAR = 0, LC_MODEL_MULTICLASS = 1 } lc_model_kind;

typedef struct lc_model lc_model;
typedef struct lc_point lc_point;
typedef struct lc_result lc_result;
typedef struct lc_lattice lc_lattice;

LC_API const char* lc_version(void);
LC_API const char* lc_last_error(void);
LC_API const char* lc_status_name(lc_status status);
LC_API void lc_string_free(char* s);

/* Models: binary linear mixtures {"classifiers":...} or MLP mixtures
 * {"models":...} / a single {"layers":...}. */
LC_API lc_status lc_model_load_file(const char* path, lc_model** out);
LC_API lc_status lc_model_from_json(const char* json, lc_model** out);
/* w is m x d row-major; weights may be NULL for uniform. */
LC_API lc_status lc_model_create_linear(int m, int d, const double* w, const double* b,
                                        const double* weights, lc_model** out);
LC_API void lc_model_free(lc_model* model);
LC_API lc_status lc_model_info(const lc_model* model, lc_model_kind* kind, int* m, int* d,
                               int* classes);
LC_API lc_status lc_model_to_json(const lc_model* model, char** json_out);

/* Points: {"x":[...],"y":label}. */
LC_API lc_status lc_point_load_file(const char* path, lc_point** out);
LC_API lc_status lc_point_from_json(const char* json, lc_point** out);
LC_API lc_status lc_point_create(const double* x, int d, int y, lc_point** out);
LC_API void lc_point_free(lc_point* point);

typedef struct lc_attack_options {
  const char* attack;    /* eol-pgd | loe-pgd | arc | arc-greedy | lca */
  const char* norm;      /* l2 | linf */
  double epsilon;
  int steps;             /* 0: default for the model kind */
  double eta;            /* 0: default for the model kind */
  const char* order;     /* weight | random | comma-separated indices */
  uint64_t seed;
  int restarts;          /* >= 1 */
  const char* surrogate; /* cross-entropy | rev-hinge (multiclass EOL/LOE) */
  int frozen_target;     /* multiclass: fix the rival class at the clean point */
  int random_init;       /* multiclass EOL/LOE: start each run at a random ball point */
  int steepest;          /* -1: default, 0: raw steps, 1: steepest steps */
} lc_attack_options;

/* Fills defaults: lca, l2, epsilon 1, weight order, seed 42, one restart. */
LC_API void lc_attack_options_init(lc_attack_options* opts);

LC_API lc_status lc_attack(const lc_model* model, const lc_point* point,
                           const lc_attack_options* opts, lc_result** out);
LC_API void lc_result_free(lc_result* result);
LC_API double lc_result_error(const lc_result* result);
LC_API long lc_result_grad_evals(const lc_result* result);
/* Writes up to cap fooled indices; returns the total count. */
LC_API int lc_result_fooled(const lc_result* result, int* indices, int cap);
/* Writes up to cap coordinates of delta; returns the dimension. */
LC_API int lc_result_delta(const lc_result* result, double* delta, int cap);
LC_API lc_status lc_result_to_json(const lc_result* result, int include_trace, char** json_out);

/* Adversarial lattice of a binary linear mixture; m <= 20. */
LC_API lc_status lc_lattice_build(const lc_model* model, const lc_point* point, const char* norm,
                                  double epsilon, lc_lattice** out);
LC_API void lc_lattice_free(lc_lattice* lattice);
LC_API size_t lc_lattice_node_count(const lc_lattice* lattice);
LC_API size_t lc_lattice_maximal_count(const lc_lattice* lattice);
LC_API lc_status lc_lattice_to_json(const lc_lattice* lattice, char** json_out);

/* Brute-force optimal attack; x_out (length d) may be NULL. */
LC_API lc_status lc_optimal_attack(const lc_model* model, const lc_point* point, const char* norm,
                                   double epsilon, double* error_out, double* x_out);

/* Runs sweep-angle | random-linear | maximality-audit | multiclass-demo with
 * a JSON config (NULL or "" for defaults) and writes outputs to out_dir.
 * Each override is "key=value"; value is parsed as JSON, else taken as a
 * string. manifest_out may be NULL. */
LC_API lc_status lc_run_experiment(const char* name, const char* config_json,
                                   const char* const* overrides, int n_overrides,
                                   const char* out_dir, char** manifest_out);

#ifdef __cplusplus
}
#endif

#endif /* LATCLIMB_LATCLIMB_H_ */
