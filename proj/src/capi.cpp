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

#include "phylocsp/phylocsp.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "phylocsp/error.hpp"
#include "phylocsp/gap_instance.hpp"
#include "phylocsp/phylo_problems.hpp"
#include "phylocsp/registry.hpp"
#include "reports.hpp"

struct pcsp_registry {
  phylocsp::PayoffRegistry reg;
};
struct pcsp_instance {
  phylocsp::Instance inst;
};
struct pcsp_tree {
  phylocsp::Tree tree;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
pcsp_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const phylocsp::ArgumentError& e) {
    g_last_error = e.what();
    return PCSP_ARGUMENT_ERROR;
  } catch (const phylocsp::NotFoundError& e) {
    g_last_error = e.what();
    return PCSP_NOT_FOUND;
  } catch (const phylocsp::ResourceError& e) {
    g_last_error = e.what();
    return PCSP_RESOURCE_ERROR;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return PCSP_RESOURCE_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PCSP_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return PCSP_INTERNAL_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw phylocsp::ArgumentError(std::string(what) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

pcsp_status emit(const nlohmann::json& j, char** out) {
  *out = dup_string(j.dump(2));
  return PCSP_OK;
}

const phylocsp::PayoffRegistry& registry_of(const pcsp_registry* reg) {
  static const phylocsp::PayoffRegistry builtins;
  return reg != nullptr ? reg->reg : builtins;
}

std::shared_ptr<const phylocsp::PayoffFunction> payoff_of(const pcsp_registry* reg,
                                                           const char* name) {
  require(name, "payoff name");
  return registry_of(reg).get(name);
}

}  // namespace

extern "C" {

const char* pcsp_version(void) { return PHYLOCSP_VERSION; }

const char* pcsp_last_error(void) { return g_last_error.c_str(); }

void pcsp_string_free(char* s) { std::free(s); }

pcsp_status pcsp_registry_new(pcsp_registry** out) {
  return guarded([&] {
    require(out, "out");
    *out = new pcsp_registry();
    return PCSP_OK;
  });
}

pcsp_status pcsp_registry_load(pcsp_registry* reg, const char* text) {
  return guarded([&] {
    require(reg, "registry");
    require(text, "text");
    reg->reg.load(text);
    return PCSP_OK;
  });
}

pcsp_status pcsp_registry_contains(const pcsp_registry* reg, const char* name, int* out) {
  return guarded([&] {
    require(reg, "registry");
    require(name, "name");
    require(out, "out");
    *out = reg->reg.contains(name) ? 1 : 0;
    return PCSP_OK;
  });
}

pcsp_status pcsp_payoff_arity(const pcsp_registry* reg, const char* name, int* out) {
  return guarded([&] {
    require(out, "out");
    *out = payoff_of(reg, name)->arity();
    return PCSP_OK;
  });
}

pcsp_status pcsp_registry_describe(const pcsp_registry* reg, const char* name, char** out) {
  return guarded([&] {
    require(out, "out");
    auto f = payoff_of(reg, name);
    std::ostringstream s;
    s << "payoff " << f->name() << " " << f->arity();
    if (f->default_payoff() != 0.0) s << " default " << f->default_payoff();
    s << "\n" << phylocsp::format_pattern_table(f->table()) << "end\n";
    *out = dup_string(s.str());
    return PCSP_OK;
  });
}

void pcsp_registry_free(pcsp_registry* reg) { delete reg; }

pcsp_status pcsp_tree_parse(const char* newick, pcsp_tree** out) {
  return guarded([&] {
    require(newick, "newick");
    require(out, "out");
    *out = new pcsp_tree{phylocsp::Tree::parse_newick(newick)};
    return PCSP_OK;
  });
}

pcsp_status pcsp_tree_newick(const pcsp_tree* tree, char** out) {
  return guarded([&] {
    require(tree, "tree");
    require(out, "out");
    *out = dup_string(tree->tree.to_newick());
    return PCSP_OK;
  });
}

pcsp_status pcsp_tree_num_leaves(const pcsp_tree* tree, size_t* out) {
  return guarded([&] {
    require(tree, "tree");
    require(out, "out");
    *out = tree->tree.num_leaves();
    return PCSP_OK;
  });
}

void pcsp_tree_free(pcsp_tree* tree) { delete tree; }

pcsp_status pcsp_instance_parse(const pcsp_registry* reg, const char* text, pcsp_instance** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new pcsp_instance{phylocsp::parse_instance(text, registry_of(reg))};
    return PCSP_OK;
  });
}

pcsp_status pcsp_instance_format(const pcsp_instance* inst, char** out) {
  return guarded([&] {
    require(inst, "instance");
    require(out, "out");
    *out = dup_string(phylocsp::format_instance(inst->inst));
    return PCSP_OK;
  });
}

pcsp_status pcsp_instance_num_vars(const pcsp_instance* inst, size_t* out) {
  return guarded([&] {
    require(inst, "instance");
    require(out, "out");
    *out = static_cast<size_t>(inst->inst.num_vars());
    return PCSP_OK;
  });
}

pcsp_status pcsp_instance_num_constraints(const pcsp_instance* inst, size_t* out) {
  return guarded([&] {
    require(inst, "instance");
    require(out, "out");
    *out = inst->inst.constraints().size();
    return PCSP_OK;
  });
}

pcsp_status pcsp_instance_value(const pcsp_instance* inst, const pcsp_tree* tree, double* out) {
  return guarded([&] {
    require(inst, "instance");
    require(tree, "tree");
    require(out, "out");
    *out = phylocsp::value(phylocsp::solution_from_tree(tree->tree, inst->inst), inst->inst);
    return PCSP_OK;
  });
}

void pcsp_instance_free(pcsp_instance* inst) { delete inst; }

pcsp_status pcsp_gen_gap(const pcsp_registry* reg, const char* payoff, int d, pcsp_instance** out) {
  return guarded([&] {
    require(out, "out");
    phylocsp::GapSpec spec{payoff_of(reg, payoff), d};
    *out = new pcsp_instance{phylocsp::build_gap(spec)};
    return PCSP_OK;
  });
}

pcsp_status pcsp_gen_random(const pcsp_registry* reg, const char* payoff, int n, int constraints,
                            uint64_t seed, pcsp_instance** out) {
  return guarded([&] {
    require(out, "out");
    *out = new pcsp_instance{phylocsp::random_instance(payoff_of(reg, payoff), n, constraints, seed)};
    return PCSP_OK;
  });
}

pcsp_status pcsp_aho_build(const pcsp_instance* inst, pcsp_tree** out) {
  return guarded([&] {
    require(inst, "instance");
    require(out, "out");
    std::vector<phylocsp::TripletConstraint> ts;
    const auto& vars = inst->inst.variables();
    for (const auto& c : inst->inst.constraints()) {
      if (c.payoff->name() != "triplet") {
        throw phylocsp::ArgumentError("BUILD needs triplet constraints, got '" + c.payoff->name() + "'");
      }
      ts.push_back({vars[c.vars[0]], vars[c.vars[1]], vars[c.vars[2]]});
    }
    auto tree = phylocsp::aho_build(ts, vars);
    *out = nullptr;
    if (!tree) {
      g_last_error = "triplets are inconsistent";
      return PCSP_INCONSISTENT;
    }
    *out = new pcsp_tree{std::move(*tree)};
    return PCSP_OK;
  });
}

pcsp_status pcsp_triplets_to_quartets(const pcsp_instance* inst, pcsp_instance** out, char** gamma) {
  return guarded([&] {
    require(inst, "instance");
    require(out, "out");
    require(gamma, "gamma");
    auto red = phylocsp::triplets_to_quartets(inst->inst);
    auto holder = std::make_unique<pcsp_instance>(pcsp_instance{std::move(red.instance)});
    *gamma = dup_string(red.gamma);
    *out = holder.release();
    return PCSP_OK;
  });
}

pcsp_status pcsp_solve_brute(const pcsp_instance* inst, int cap, uint64_t seed, char** json) {
  return guarded([&] {
    require(inst, "instance");
    require(json, "json");
    return emit(phylocsp::reports::solve_brute(inst->inst, cap, seed), json);
  });
}

pcsp_status pcsp_solve_order(const pcsp_instance* inst, const char* order, int cap, uint64_t seed,
                             char** json) {
  return guarded([&] {
    require(inst, "instance");
    require(json, "json");
    std::vector<int> pi;
    if (order == nullptr) {
      for (int i = 0; i < inst->inst.num_vars(); ++i) pi.push_back(i);
    } else {
      std::istringstream in(order);
      for (std::string name; in >> name;) pi.push_back(inst->inst.var_index(name));
    }
    return emit(phylocsp::reports::solve_order(inst->inst, pi, cap, seed), json);
  });
}

pcsp_status pcsp_solve_random_instance(const pcsp_instance* inst, uint64_t trials, uint64_t seed,
                                       char** json) {
  return guarded([&] {
    require(inst, "instance");
    require(json, "json");
    return emit(phylocsp::reports::solve_random(inst->inst, trials, seed), json);
  });
}

pcsp_status pcsp_solve_random_payoff(const pcsp_registry* reg, const char* payoff, uint64_t trials,
                                     uint64_t seed, char** json) {
  return guarded([&] {
    require(json, "json");
    return emit(phylocsp::reports::solve_random(*payoff_of(reg, payoff), trials, seed), json);
  });
}

void pcsp_search_options_default(pcsp_search_options* opts) {
  if (opts == nullptr) return;
  phylocsp::SearchOptions d;
  opts->depth_cap = d.depth_cap;
  opts->grid_steps = d.grid_steps;
  opts->refine_rounds = d.refine_rounds;
  opts->caterpillar_depth_cap = d.caterpillar_depth_cap;
  opts->include_caterpillars = d.include_caterpillars ? 1 : 0;
}

pcsp_status pcsp_alpha_search(const pcsp_registry* reg, const char* payoff,
                              const pcsp_search_options* opts, uint64_t seed, char** json) {
  return guarded([&] {
    require(json, "json");
    phylocsp::SearchOptions o;
    if (opts != nullptr) {
      o.depth_cap = opts->depth_cap;
      o.grid_steps = opts->grid_steps;
      o.refine_rounds = opts->refine_rounds;
      o.caterpillar_depth_cap = opts->caterpillar_depth_cap;
      o.include_caterpillars = opts->include_caterpillars != 0;
    }
    return emit(phylocsp::reports::alpha_search(*payoff_of(reg, payoff), o, seed), json);
  });
}

pcsp_status pcsp_experiment_gap_order(const pcsp_registry* reg, const char* payoff, int d,
                                      int num_orders, int all_orders, uint64_t seed, char** json) {
  return guarded([&] {
    require(json, "json");
    phylocsp::GapSpec spec{payoff_of(reg, payoff), d};
    return emit(phylocsp::reports::gap_order(spec, num_orders, all_orders != 0, seed), json);
  });
}

pcsp_status pcsp_experiment_monochrome(const pcsp_registry* reg, const pcsp_instance* inst,
                                       const char* payoff, int d, double eps, int q,
                                       int num_orders, double m_star_constant, uint64_t seed,
                                       char** json) {
  return guarded([&] {
    require(json, "json");
    phylocsp::MonochromeOptions opt;
    opt.eps = eps;
    opt.q = q;
    opt.num_orders = num_orders;
    opt.m_star_constant = m_star_constant;
    opt.seed = seed;
    if (inst != nullptr) return emit(phylocsp::reports::monochrome(inst->inst, "input", opt), json);
    phylocsp::GapSpec spec{payoff_of(reg, payoff), d};
    std::string source = "gap " + spec.payoff->name() + " d=" + std::to_string(d);
    return emit(phylocsp::reports::monochrome(phylocsp::build_gap(spec), source, opt), json);
  });
}

pcsp_status pcsp_experiment_divergence(int k, int d, int q, const char* labeling, int trials,
                                       uint64_t seed, char** json) {
  return guarded([&] {
    require(labeling, "labeling");
    require(json, "json");
    return emit(phylocsp::reports::divergence(k, d, q, labeling, trials, seed), json);
  });
}

pcsp_status pcsp_experiment_coupling(int M, int dprime, int k, uint64_t trials, double eta,
                                     uint64_t seed, char** json) {
  return guarded([&] {
    require(json, "json");
    return emit(phylocsp::reports::coupling(M, dprime, k, trials, eta, seed), json);
  });
}

pcsp_status pcsp_verify(const char* filter, uint64_t seed, int* passed, char** json) {
  return guarded([&] {
    require(passed, "passed");
    require(json, "json");
    std::string f = filter ? filter : "";
    auto rep = phylocsp::run_verify(f, seed);
    *passed = rep.passed() ? 1 : 0;
    return emit(phylocsp::reports::verify(rep, f, seed), json);
  });
}

pcsp_status pcsp_verify_instance(const pcsp_registry* reg, const char* text, int* passed,
                                 char** json) {
  return guarded([&] {
    require(reg, "registry");
    require(text, "text");
    require(passed, "passed");
    require(json, "json");
    auto rep = phylocsp::verify_instance_text(text, reg->reg);
    *passed = rep.passed() ? 1 : 0;
    return emit(phylocsp::reports::verify(rep, "instance", 0), json);
  });
}

}  // extern "C"
