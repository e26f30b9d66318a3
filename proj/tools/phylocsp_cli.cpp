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

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "phylocsp/phylocsp.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInconsistent = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;
constexpr int kExitInternal = 4;

struct CliError {
  int code;
  std::string message;
};

int exit_code(pcsp_status s) {
  switch (s) {
    case PCSP_OK:
      return kExitOk;
    case PCSP_INCONSISTENT:
      return kExitInconsistent;
    case PCSP_ARGUMENT_ERROR:
    case PCSP_NOT_FOUND:
      return kExitUsage;
    case PCSP_RESOURCE_ERROR:
      return kExitResource;
    default:
      return kExitInternal;
  }
}

void check(pcsp_status s) {
  if (s != PCSP_OK) throw CliError{exit_code(s), pcsp_last_error()};
}

struct RegistryDeleter {
  void operator()(pcsp_registry* r) const { pcsp_registry_free(r); }
};
struct InstanceDeleter {
  void operator()(pcsp_instance* i) const { pcsp_instance_free(i); }
};
struct TreeDeleter {
  void operator()(pcsp_tree* t) const { pcsp_tree_free(t); }
};
struct StringDeleter {
  void operator()(char* s) const { pcsp_string_free(s); }
};
using RegistryPtr = std::unique_ptr<pcsp_registry, RegistryDeleter>;
using InstancePtr = std::unique_ptr<pcsp_instance, InstanceDeleter>;
using TreePtr = std::unique_ptr<pcsp_tree, TreeDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), {});
  }
  std::ifstream in(path);
  if (!in) throw CliError{kExitUsage, "cannot open " + path};
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw CliError{kExitUsage, "cannot write " + path};
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string take(char* s) {
  StringPtr p(s);
  return p ? std::string(p.get()) : std::string();
}

std::uint64_t default_seed() {
  const char* env = std::getenv("PHYLOCSP_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    std::uint64_t v = std::stoull(env, &used, 0);
    if (used != std::strlen(env)) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw CliError{kExitUsage, std::string("PHYLOCSP_SEED is not an unsigned integer: ") + env};
  }
}

struct Options {
  std::uint64_t seed = 0;
  std::string registry;
  std::string input = "-";
  std::string output = "-";
  std::string payoff;
  std::string order;
  std::string tree;
  std::string labeling = "random";
  std::string filter;
  std::string instance;
  int k = 0;
  int d = 1;
  int n = 0;
  int constraints = 0;
  int brute_cap = 10;
  int order_cap = 13;
  int q = 4;
  std::string mono_payoff = "triplet";
  int mono_d = 2;
  int mono_orders = 100;
  int div_k = 3;
  int div_d = 4;
  int div_q = 2;
  std::uint64_t coupling_trials = 1000000;
  int orders = 200;
  int trials_small = 50;
  int M = 4;
  int dprime = 3;
  int coupling_k = 2;
  bool all_orders = false;
  bool no_caterpillars = false;
  std::uint64_t trials = 100000;
  double eps = 0.5;
  double eta = 0.0;
  double m_star_c = 1.0;
  pcsp_search_options search{};
};

RegistryPtr load_registry(const Options& o) {
  pcsp_registry* r = nullptr;
  check(pcsp_registry_new(&r));
  RegistryPtr reg(r);
  if (!o.registry.empty()) check(pcsp_registry_load(reg.get(), read_input(o.registry).c_str()));
  return reg;
}

InstancePtr load_instance(const pcsp_registry* reg, const std::string& path) {
  pcsp_instance* inst = nullptr;
  check(pcsp_instance_parse(reg, read_input(path).c_str(), &inst));
  return InstancePtr(inst);
}

void check_k(const pcsp_registry* reg, const Options& o) {
  int arity = 0;
  check(pcsp_payoff_arity(reg, o.payoff.c_str(), &arity));
  if (o.k != 0 && o.k != arity) {
    throw CliError{kExitUsage, "--k " + std::to_string(o.k) + " does not match the arity " +
                                   std::to_string(arity) + " of payoff " + o.payoff};
  }
}

std::string instance_text(const pcsp_instance* inst) {
  char* out = nullptr;
  check(pcsp_instance_format(inst, &out));
  return take(out);
}

}  // namespace

int main(int argc, char** argv) {
  Options o;
  pcsp_search_options_default(&o.search);
  CLI::App app{"Phylogenetic CSP toolkit"};
  app.set_version_flag("--version", std::string(pcsp_version()));
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "Random seed (default: $PHYLOCSP_SEED or 0)");
  app.add_option("--registry", o.registry, "Payoff registry file");

  auto* gen_gap = app.add_subcommand("gen-gap", "Write the gap instance of a payoff");
  gen_gap->add_option("--payoff", o.payoff)->required();
  gen_gap->add_option("--k", o.k, "Payoff arity (checked)");
  gen_gap->add_option("--d", o.d)->required();
  gen_gap->add_option("-o,--output", o.output);

  auto* gen_random = app.add_subcommand("gen-random", "Write a random instance");
  gen_random->add_option("--payoff", o.payoff)->required();
  gen_random->add_option("--n", o.n)->required();
  gen_random->add_option("--constraints", o.constraints)->required();
  gen_random->add_option("-o,--output", o.output);

  auto* solve_brute = app.add_subcommand("solve-brute", "Exact optimum over all trees");
  solve_brute->add_option("input", o.input, "Instance file, - for stdin");
  solve_brute->add_option("--cap", o.brute_cap, "Variable cap");
  solve_brute->add_option("-o,--output", o.output);

  auto* solve_order = app.add_subcommand("solve-order", "Exact optimum for a fixed leaf order");
  solve_order->add_option("input", o.input);
  solve_order->add_option("--order", o.order, "Variable names, space separated");
  solve_order->add_option("--cap", o.order_cap, "Variable cap");
  solve_order->add_option("-o,--output", o.output);

  auto* solve_random = app.add_subcommand("solve-random", "Monte-Carlo uniform recursive splitting");
  solve_random->add_option("input", o.input);
  solve_random->add_option("--payoff", o.payoff, "Estimate a single payoff instead");
  solve_random->add_option("--trials", o.trials);
  solve_random->add_option("-o,--output", o.output);

  auto* alpha = app.add_subcommand("alpha-search", "Best biased random assignment for a payoff");
  alpha->add_option("--payoff", o.payoff)->required();
  alpha->add_option("--depth-cap", o.search.depth_cap);
  alpha->add_option("--grid", o.search.grid_steps);
  alpha->add_option("--refine", o.search.refine_rounds);
  alpha->add_option("--caterpillar-depth-cap", o.search.caterpillar_depth_cap);
  alpha->add_flag("--no-caterpillars", o.no_caterpillars);
  alpha->add_option("-o,--output", o.output);

  auto* reduce = app.add_subcommand("triplets-to-quartets", "Reduce a triplet instance to quartets");
  reduce->add_option("input", o.input);
  reduce->add_option("-o,--output", o.output);

  auto* aho = app.add_subcommand("aho-build", "Tree consistent with all triplets, if any");
  aho->add_option("input", o.input);
  aho->add_option("-o,--output", o.output);

  auto* evaluate = app.add_subcommand("evaluate", "Value of a solution tree");
  evaluate->add_option("input", o.input);
  evaluate->add_option("--tree", o.tree, "Newick tree labeled by variable names")->required();

  auto* experiment = app.add_subcommand("experiment", "Experiment suites");
  experiment->require_subcommand(1);
  experiment->fallthrough();
  auto* gap_order = experiment->add_subcommand("gap-order", "opt given random orders on a gap instance");
  gap_order->add_option("--payoff", o.payoff)->required();
  gap_order->add_option("--k", o.k);
  gap_order->add_option("--d", o.d)->required();
  gap_order->add_option("--orders", o.orders);
  gap_order->add_flag("--all-orders", o.all_orders);
  gap_order->add_option("-o,--output", o.output);

  auto* mono = experiment->add_subcommand("monochrome", "Max monochromatic weight over coarse colorings");
  mono->add_option("--instance", o.instance, "Instance file (default: gap instance)");
  mono->add_option("--payoff", o.mono_payoff);
  mono->add_option("--k", o.k);
  mono->add_option("--d", o.mono_d);
  mono->add_option("--eps", o.eps);
  mono->add_option("--q", o.q);
  mono->add_option("--orders", o.mono_orders);
  mono->add_option("--m-star-constant", o.m_star_c);
  mono->add_option("-o,--output", o.output);

  auto* div = experiment->add_subcommand("divergence", "Child-label divergence against its bound");
  div->add_option("--k", o.div_k);
  div->add_option("--d", o.div_d);
  div->add_option("--q", o.div_q);
  div->add_option("--labeling", o.labeling)->check(CLI::IsMember({"random", "adversarial", "all"}));
  div->add_option("--trials", o.trials_small);
  div->add_option("-o,--output", o.output);

  auto* coup = experiment->add_subcommand("coupling", "Coupled random map statistics");
  coup->add_option("--M", o.M);
  coup->add_option("--dprime", o.dprime);
  coup->add_option("--k", o.coupling_k);
  coup->add_option("--trials", o.coupling_trials);
  coup->add_option("--eta", o.eta);
  coup->add_option("-o,--output", o.output);

  auto* verify = app.add_subcommand("verify", "Run the invariant suite or validate an instance");
  verify->add_option("--filter", o.filter, "Comma-separated module names");
  verify->add_option("--instance", o.instance, "Validate an instance file instead");
  verify->add_option("-o,--output", o.output);

  try {
    o.seed = default_seed();
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    RegistryPtr reg = load_registry(o);
    char* json = nullptr;
    if (gen_gap->parsed()) {
      check_k(reg.get(), o);
      pcsp_instance* inst = nullptr;
      check(pcsp_gen_gap(reg.get(), o.payoff.c_str(), o.d, &inst));
      write_output(o.output, instance_text(InstancePtr(inst).get()));
    } else if (gen_random->parsed()) {
      pcsp_instance* inst = nullptr;
      check(pcsp_gen_random(reg.get(), o.payoff.c_str(), o.n, o.constraints, o.seed, &inst));
      write_output(o.output, instance_text(InstancePtr(inst).get()));
    } else if (solve_brute->parsed()) {
      auto inst = load_instance(reg.get(), o.input);
      check(pcsp_solve_brute(inst.get(), o.brute_cap, o.seed, &json));
      write_output(o.output, take(json));
    } else if (solve_order->parsed()) {
      auto inst = load_instance(reg.get(), o.input);
      check(pcsp_solve_order(inst.get(), o.order.empty() ? nullptr : o.order.c_str(), o.order_cap,
                             o.seed, &json));
      write_output(o.output, take(json));
    } else if (solve_random->parsed()) {
      if (!o.payoff.empty()) {
        check(pcsp_solve_random_payoff(reg.get(), o.payoff.c_str(), o.trials, o.seed, &json));
      } else {
        auto inst = load_instance(reg.get(), o.input);
        check(pcsp_solve_random_instance(inst.get(), o.trials, o.seed, &json));
      }
      write_output(o.output, take(json));
    } else if (alpha->parsed()) {
      o.search.include_caterpillars = o.no_caterpillars ? 0 : 1;
      check(pcsp_alpha_search(reg.get(), o.payoff.c_str(), &o.search, o.seed, &json));
      write_output(o.output, take(json));
    } else if (reduce->parsed()) {
      auto inst = load_instance(reg.get(), o.input);
      pcsp_instance* out = nullptr;
      char* gamma = nullptr;
      check(pcsp_triplets_to_quartets(inst.get(), &out, &gamma));
      InstancePtr quartets(out);
      std::string name = take(gamma);
      std::cerr << "gamma: " << name << "\n";
      write_output(o.output, "# gamma " + name + "\n" + instance_text(quartets.get()));
    } else if (aho->parsed()) {
      auto inst = load_instance(reg.get(), o.input);
      pcsp_tree* tree = nullptr;
      pcsp_status s = pcsp_aho_build(inst.get(), &tree);
      if (s == PCSP_INCONSISTENT) {
        write_output(o.output, "Inconsistent");
        return kExitInconsistent;
      }
      check(s);
      TreePtr t(tree);
      check(pcsp_tree_newick(t.get(), &json));
      write_output(o.output, take(json));
    } else if (evaluate->parsed()) {
      auto inst = load_instance(reg.get(), o.input);
      pcsp_tree* tree = nullptr;
      check(pcsp_tree_parse(o.tree.c_str(), &tree));
      TreePtr t(tree);
      double v = 0.0;
      check(pcsp_instance_value(inst.get(), t.get(), &v));
      std::ostringstream s;
      s.precision(17);
      s << v;
      write_output("-", s.str());
    } else if (gap_order->parsed()) {
      check_k(reg.get(), o);
      check(pcsp_experiment_gap_order(reg.get(), o.payoff.c_str(), o.d, o.orders,
                                      o.all_orders ? 1 : 0, o.seed, &json));
      write_output(o.output, take(json));
    } else if (mono->parsed()) {
      InstancePtr inst;
      if (!o.instance.empty()) {
        inst = load_instance(reg.get(), o.instance);
      } else {
        o.payoff = o.mono_payoff;
        check_k(reg.get(), o);
      }
      check(pcsp_experiment_monochrome(reg.get(), inst.get(), o.mono_payoff.c_str(), o.mono_d,
                                       o.eps, o.q, o.mono_orders, o.m_star_c, o.seed, &json));
      write_output(o.output, take(json));
    } else if (div->parsed()) {
      check(pcsp_experiment_divergence(o.div_k, o.div_d, o.div_q, o.labeling.c_str(),
                                       o.trials_small, o.seed, &json));
      write_output(o.output, take(json));
    } else if (coup->parsed()) {
      check(pcsp_experiment_coupling(o.M, o.dprime, o.coupling_k, o.coupling_trials, o.eta,
                                     o.seed, &json));
      write_output(o.output, take(json));
    } else if (verify->parsed()) {
      int passed = 0;
      if (!o.instance.empty()) {
        check(pcsp_verify_instance(reg.get(), read_input(o.instance).c_str(), &passed, &json));
      } else {
        check(pcsp_verify(o.filter.empty() ? nullptr : o.filter.c_str(), o.seed, &passed, &json));
      }
      write_output(o.output, take(json));
      if (!passed) return kExitInconsistent;
    }
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  }
  return kExitOk;
}
