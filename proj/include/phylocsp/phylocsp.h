// Copyright 2026 The phylocsp Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PHYLOCSP_PHYLOCSP_H_
#define PHYLOCSP_PHYLOCSP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(PHYLOCSP_BUILDING_LIBRARY)
#define PCSP_API __attribute__((visibility("default")))
#else
#define PCSP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pcsp_status {
  PCSP_OK = 0,
  PCSP_INCONSISTENT = 1,
  PCSP_ARGUMENT_ERROR = 2,
  PCSP_RESOURCE_ERROR = 3,
  PCSP_NOT_FOUND = 4,
  PCSP_INTERNAL_ERROR = 5
} pcsp_status;

typedef struct pcsp_registry pcsp_registry;
typedef struct pcsp_instance pcsp_instance;
typedef struct pcsp_tree pcsp_tree;

/* Library version string, statically allocated. */
PCSP_API const char* pcsp_version(void);
/* Message of the last failed call on this thread; "" if none. */
PCSP_API const char* pcsp_last_error(void);
/* Frees strings returned through char** out-parameters. */
PCSP_API void pcsp_string_free(char* s);

/* Wherever a registry is taken, NULL means the built-in payoffs only. */
PCSP_API pcsp_status pcsp_registry_new(pcsp_registry** out);
PCSP_API pcsp_status pcsp_registry_load(pcsp_registry* reg, const char* text);
PCSP_API pcsp_status pcsp_registry_contains(const pcsp_registry* reg, const char* name, int* out);
PCSP_API pcsp_status pcsp_payoff_arity(const pcsp_registry* reg, const char* name, int* out);
/* Pattern table of a payoff in registry file syntax. */
PCSP_API pcsp_status pcsp_registry_describe(const pcsp_registry* reg, const char* name, char** out);
PCSP_API void pcsp_registry_free(pcsp_registry* reg);

PCSP_API pcsp_status pcsp_tree_parse(const char* newick, pcsp_tree** out);
PCSP_API pcsp_status pcsp_tree_newick(const pcsp_tree* tree, char** out);
PCSP_API pcsp_status pcsp_tree_num_leaves(const pcsp_tree* tree, size_t* out);
PCSP_API void pcsp_tree_free(pcsp_tree* tree);

PCSP_API pcsp_status pcsp_instance_parse(const pcsp_registry* reg, const char* text,
                                         pcsp_instance** out);
PCSP_API pcsp_status pcsp_instance_format(const pcsp_instance* inst, char** out);
PCSP_API pcsp_status pcsp_instance_num_vars(const pcsp_instance* inst, size_t* out);
PCSP_API pcsp_status pcsp_instance_num_constraints(const pcsp_instance* inst, size_t* out);
/* Value of a solution tree whose leaf labels are the variable names. */
PCSP_API pcsp_status pcsp_instance_value(const pcsp_instance* inst, const pcsp_tree* tree,
                                         double* out);
PCSP_API void pcsp_instance_free(pcsp_instance* inst);

PCSP_API pcsp_status pcsp_gen_gap(const pcsp_registry* reg, const char* payoff, int d,
                                  pcsp_instance** out);
PCSP_API pcsp_status pcsp_gen_random(const pcsp_registry* reg, const char* payoff, int n,
                                     int constraints, uint64_t seed, pcsp_instance** out);
/* Builds a tree from triplet constraints; PCSP_INCONSISTENT if none exists.
   Every constraint must use the triplet payoff. */
PCSP_API pcsp_status pcsp_aho_build(const pcsp_instance* inst, pcsp_tree** out);
/* Quartet instance plus the name of the added variable. */
PCSP_API pcsp_status pcsp_triplets_to_quartets(const pcsp_instance* inst, pcsp_instance** out,
                                               char** gamma);

/* The functions below return JSON reports carrying the seed, caps and
   library version. The exact solvers and the search do not consume the seed;
   it is only recorded. */
PCSP_API pcsp_status pcsp_solve_brute(const pcsp_instance* inst, int cap, uint64_t seed,
                                      char** json);
/* `order` lists variable names separated by spaces; NULL means declaration order. */
PCSP_API pcsp_status pcsp_solve_order(const pcsp_instance* inst, const char* order, int cap,
                                      uint64_t seed, char** json);
PCSP_API pcsp_status pcsp_solve_random_instance(const pcsp_instance* inst, uint64_t trials,
                                                uint64_t seed, char** json);
PCSP_API pcsp_status pcsp_solve_random_payoff(const pcsp_registry* reg, const char* payoff,
                                              uint64_t trials, uint64_t seed, char** json);

typedef struct pcsp_search_options {
  int depth_cap;
  int grid_steps;
  int refine_rounds;
  int caterpillar_depth_cap;
  int include_caterpillars;
} pcsp_search_options;

PCSP_API void pcsp_search_options_default(pcsp_search_options* opts);
PCSP_API pcsp_status pcsp_alpha_search(const pcsp_registry* reg, const char* payoff,
                                       const pcsp_search_options* opts, uint64_t seed,
                                       char** json);

PCSP_API pcsp_status pcsp_experiment_gap_order(const pcsp_registry* reg, const char* payoff,
                                               int d, int num_orders, int all_orders,
                                               uint64_t seed, char** json);
/* `inst` may be NULL, in which case the gap instance of (payoff, d) is used. */
PCSP_API pcsp_status pcsp_experiment_monochrome(const pcsp_registry* reg, const pcsp_instance* inst,
                                                const char* payoff, int d, double eps, int q,
                                                int num_orders, double m_star_constant,
                                                uint64_t seed, char** json);
/* `labeling` is "random", "adversarial" or "all". */
PCSP_API pcsp_status pcsp_experiment_divergence(int k, int d, int q, const char* labeling,
                                                int trials, uint64_t seed, char** json);
PCSP_API pcsp_status pcsp_experiment_coupling(int M, int dprime, int k, uint64_t trials,
                                              double eta, uint64_t seed, char** json);

/* Runs the invariant suite; `filter` may be NULL. Sets *passed to 0 or 1. */
PCSP_API pcsp_status pcsp_verify(const char* filter, uint64_t seed, int* passed, char** json);
PCSP_API pcsp_status pcsp_verify_instance(const pcsp_registry* reg, const char* text,
                                          int* passed, char** json);

#ifdef __cplusplus
}
#endif

#endif  /* PHYLOCSP_PHYLOCSP_H_ */
