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

#include "reports.hpp"

#include <algorithm>
#include <random>

#include "phylocsp/coupling.hpp"
#include "phylocsp/error.hpp"

namespace phylocsp::reports {

namespace {

json measure_json(const BiasedMeasure& m) {
  return {{"skeleton", m.skeleton.to_newick()}, {"leaf_probs", m.leaf_probs}};
}

json instance_summary(const Instance& inst) {
  return {{"num_vars", inst.num_vars()}, {"num_constraints", inst.constraints().size()}};
}

json mc_json(const McEstimate& e) {
  return {{"mean", e.mean}, {"half_width", e.half_width}, {"trials", e.trials}};
}

}  // namespace

json header(const std::string& command, std::uint64_t seed, json caps) {
  return {{"command", command},
          {"version", PHYLOCSP_VERSION},
          {"seed", seed},
          {"caps", std::move(caps)}};
}

json solve_brute(const Instance& inst, int cap, std::uint64_t seed) {
  OptResult r = brute_force_opt(inst, cap);
  json j = header("solve-brute", seed, {{"brute_force_vars", cap}});
  j["instance"] = instance_summary(inst);
  j["value"] = r.value;
  j["tree"] = r.solution.tree.to_newick();
  j["nodes_visited"] = r.visited;
  return j;
}

json solve_order(const Instance& inst, std::span<const int> order, int cap,
                 std::uint64_t seed) {
  OptResult r = opt_given_order(inst, order, cap);
  json j = header("solve-order", seed, {{"order_vars", cap}});
  j["instance"] = instance_summary(inst);
  std::vector<std::string> names;
  for (int v : order) names.push_back(inst.variables()[v]);
  j["order"] = names;
  j["value"] = r.value;
  j["tree"] = r.solution.tree.to_newick();
  j["nodes_visited"] = r.visited;
  return j;
}

json solve_random(const Instance& inst, std::uint64_t trials, std::uint64_t seed) {
  json j = header("solve-random", seed, {{"trials", trials}});
  j["instance"] = instance_summary(inst);
  j["measure"] = "uniform";
  j["estimate"] = mc_json(instance_mc(uniform_measure(), inst, trials, seed));
  return j;
}

json solve_random(const PayoffFunction& f, std::uint64_t trials, std::uint64_t seed) {
  json j = header("solve-random", seed, {{"trials", trials}});
  j["payoff"] = f.name();
  j["measure"] = "uniform";
  j["estimate"] = mc_json(alpha_mc(uniform_measure(), f, trials, seed));
  j["exact"] = alpha_exact(uniform_measure(), f);
  return j;
}

json alpha_search(const PayoffFunction& f, const SearchOptions& opts, std::uint64_t seed) {
  ThresholdReport r = alpha_opt_search(f, opts);
  json j = header("alpha-search", seed,
                  {{"depth_cap", opts.depth_cap},
                   {"grid_steps", opts.grid_steps},
                   {"refine_rounds", opts.refine_rounds},
                   {"caterpillar_depth_cap", opts.caterpillar_depth_cap},
                   {"include_caterpillars", opts.include_caterpillars}});
  j["payoff"] = f.name();
  j["alpha"] = r.alpha;
  j["uniform_alpha"] = alpha_exact(uniform_measure(), f);
  j["family"] = r.family;
  if (r.family.rfind("caterpillar", 0) == 0) j["caterpillar_delta"] = r.caterpillar_delta;
  j["measure"] = measure_json(r.best);
  j["evaluations"] = r.evaluations;
  return j;
}

json gap_order(const GapSpec& spec, int num_orders, bool exhaustive, std::uint64_t seed) {
  OrderExperiment e = order_experiment(spec, num_orders, seed, exhaustive);
  json j = header("experiment gap-order", seed,
                  {{"order_vars", kDefaultOrderCap}, {"gap_leaves", kGapLeafCap}});
  j["payoff"] = spec.payoff->name();
  j["k"] = spec.k();
  j["d"] = spec.d;
  j["num_vars"] = spec.num_leaves();
  j["exhaustive"] = exhaustive;
  j["num_orders"] = e.values.size();
  j["mean"] = e.mean;
  j["stderr"] = e.stderr_;
  j["uniform_alpha"] = alpha_exact(uniform_measure(), *spec.payoff);
  j["values"] = e.values;
  return j;
}

json monochrome(const Instance& inst, const std::string& source, const MonochromeOptions& opt) {
  MonochromeReport r = monochrome_experiment(inst, opt);
  json j = header("experiment monochrome", opt.seed, {{"exact_q", 5}});
  j["instance"] = source;
  j["num_vars"] = inst.num_vars();
  j["eps"] = opt.eps;
  j["q"] = opt.q;
  j["num_orders"] = opt.num_orders;
  j["regular"] = r.regular;
  j["exact"] = r.exact;
  j["weight"] = r.weight;
  j["mean"] = r.mean;
  j["mean_fraction"] = r.weight > 0 ? r.mean / r.weight : 0.0;
  j["bound"] = r.bound;
  j["m_star_constant"] = opt.m_star_constant;
  j["m_star"] = r.m_star;
  j["bound_applies"] = r.bound_applies;
  j["bound_holds"] = r.bound_holds;
  j["pointwise_checks"] = r.pointwise_checks;
  j["pointwise_violations"] = r.pointwise_violations;
  j["per_order_max"] = r.per_order_max;
  return j;
}

json divergence(int k, int d, int q, const std::string& labeling, int trials, std::uint64_t seed) {
  if (labeling != "random" && labeling != "adversarial" && labeling != "all") {
    throw ArgumentError("labeling must be random, adversarial or all");
  }
  const bool random = labeling != "adversarial";
  if (random && trials < 1) throw ArgumentError("trials must be >= 1");
  const double bound = divergence_bound(q, d);
  json j = header("experiment divergence", seed, {{"trials", random ? trials : 0}});
  j["k"] = k;
  j["d"] = d;
  j["q"] = q;
  j["labeling"] = labeling;
  j["bound"] = bound;
  json values = json::array();
  double worst = 0.0;
  auto record = [&](const std::string& name, const std::vector<int>& labels) {
    double v = child_label_divergence(k, d, labels, q);
    worst = std::max(worst, v);
    values.push_back({{"labeling", name}, {"value", v}, {"within_bound", v <= bound}});
  };
  if (random) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, q - 1);
    std::size_t m = 1;
    for (int i = 0; i < d; ++i) m *= k;
    std::vector<int> labels(m);
    for (int t = 0; t < trials; ++t) {
      for (int& x : labels) x = pick(rng);
      record("random-" + std::to_string(t), labels);
    }
  }
  if (labeling != "random") {
    for (const auto& l : adversarial_labelings(k, d, q)) record(l.name, l.labels);
  }
  j["values"] = values;
  j["max"] = worst;
  j["all_within_bound"] = worst <= bound;
  return j;
}

json coupling(int M, int dprime, int k, std::uint64_t trials, double eta, std::uint64_t seed) {
  CouplingExperiment e = coupling_experiment(M, dprime, k, trials, seed, eta);
  json j = header("experiment coupling", seed, {{"shortcut_leaves", kShortcutLeafCap}});
  j["M"] = M;
  j["dprime"] = dprime;
  j["k"] = k;
  j["N"] = e.N;
  j["eta"] = eta;
  j["trials"] = trials;
  j["tv"] = e.tv;
  j["max_tv"] = e.max_tv;
  j["marginal_max_error"] = e.marginal_error;
  j["chi2"] = {{"statistic", e.chi2}, {"p_value", e.chi2_p}, {"dof", e.N - 1},
               {"alpha", kChi2Alpha}, {"pass", e.chi2_pass}};
  j["cousins"] = {{"shortcut_rate", e.shortcut_rate},
                  {"coupled_rates", e.tuple_rates},
                  {"coupled_min_rate", e.coupled_min_rate},
                  {"bound", e.bound},
                  {"pass", e.preservation_pass}};
  return j;
}

json verify(const VerifyReport& rep, const std::string& filter, std::uint64_t seed) {
  json j = header("verify", seed, json::object());
  j["filter"] = filter;
  json checks = json::array();
  for (const auto& c : rep.checks) {
    checks.push_back({{"module", c.module}, {"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  j["checks"] = checks;
  j["passed"] = rep.passed();
  return j;
}

}  // namespace phylocsp::reports
