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

// Acceptance checks. Prints one PASS/FAIL line per criterion; with an
// argument N only criterion N runs. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "phylocsp/coarse.hpp"
#include "phylocsp/coupling.hpp"
#include "phylocsp/gap_instance.hpp"
#include "phylocsp/instance.hpp"
#include "phylocsp/pattern.hpp"
#include "phylocsp/phylo_problems.hpp"
#include "phylocsp/random_assignment.hpp"
#include "phylocsp/registry.hpp"

namespace {

using namespace phylocsp;

// Tolerances and limits, one block per criterion.
constexpr double kC1Tol = 0.01;
constexpr std::uint64_t kC1Trials = 100000;
constexpr double kC1Seconds = 10;
constexpr double kC2Seconds = 5;
constexpr double kC3ExactTol = 1e-12;
constexpr int kC3Orders = 200;
constexpr double kC3Seconds = 300;
constexpr double kC4Seconds = 120;
constexpr int kC5Pairs = 100;
constexpr double kC5Eps = 0.5;
constexpr int kC5MaxLabels = 32;
constexpr int kC5MaxColors = 8;
constexpr double kC5Seconds = 60;
constexpr int kC6Orders = 1000;
constexpr double kC6Sigmas = 3;
constexpr double kC6Seconds = 60;
constexpr int kC7Random = 50;
constexpr double kC7Seconds = 30;
constexpr double kC8ExactTol = 1e-12;
constexpr std::uint64_t kC8Trials = 1000000;
constexpr double kC8Seconds = 60;
constexpr int kC9Instances = 50;
constexpr double kC9Seconds = 120;
constexpr int kC10Sets = 100;
constexpr double kC10Seconds = 10;
constexpr double kC11UniformMax = 0.2;
constexpr double kC11BiasedMin = 0.8;
constexpr double kC11Delta = 0.05;
constexpr std::uint64_t kC11Trials = 1000000;
constexpr double kC11Sigmas = 3;
constexpr double kC11Seconds = 60;

struct Outcome {
  bool ok = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(double x) {
  std::ostringstream s;
  s.precision(6);
  s << x;
  return s.str();
}

PayoffRegistry& registry() {
  static PayoffRegistry reg;
  return reg;
}

Outcome c1() {
  std::vector<std::pair<std::string, Instance>> cases;
  cases.emplace_back("gap-d2", build_gap({registry().get("triplet"), 2}));
  cases.emplace_back("random-20x60", random_instance(registry().get("triplet"), 20, 60, 1));
  cases.emplace_back("random-6x10", random_instance(registry().get("triplet"), 6, 10, 2));
  Outcome o;
  for (const auto& [name, inst] : cases) {
    McEstimate e = instance_mc(uniform_measure(), inst, kC1Trials, 11);
    bool ok = std::fabs(e.mean - 1.0 / 3.0) <= kC1Tol;
    o.ok &= ok;
    o.detail += name + " mean=" + fmt(e.mean) + (ok ? "" : " (out of range)") + "; ";
  }
  return o;
}

Outcome c2() {
  Outcome o;
  int runs = 0;
  for (const char* f : {"triplet", "fstar-0.1", "split-right-4", "split-right-2", "split-right-3"}) {
    for (int d = 1; d <= 2; ++d) {
      GapSpec s{registry().get(f), d};
      double v = value(satisfying_solution(s), build_gap(s));
      ++runs;
      if (v != 1.0) {
        o.ok = false;
        o.detail += std::string(f) + " d=" + std::to_string(d) + " value=" + fmt(v) + "; ";
      }
    }
  }
  o.detail += std::to_string(runs) + " (payoff, d) pairs with k in {2,3,4}";
  return o;
}

Outcome c3() {
  GapSpec s1{registry().get("triplet"), 1}, s2{registry().get("triplet"), 2};
  OrderExperiment e1 = order_experiment(s1, 0, 0, true);
  OrderExperiment e2 = order_experiment(s2, kC3Orders, 3);
  Outcome o;
  o.ok = std::fabs(e1.mean - 2.0 / 3.0) <= kC3ExactTol && e2.mean < 2.0 / 3.0 && e2.mean > 1.0 / 3.0;
  o.detail = "d=1 mean=" + fmt(e1.mean) + ", d=2 mean=" + fmt(e2.mean) + " +- " + fmt(e2.stderr_) +
             " over " + std::to_string(e2.values.size()) + " orders";
  return o;
}

Outcome c4() {
  std::uint64_t checks = 0, mismatches = 0;
  for (int k : {3, 4}) {
    auto pats = enumerate_patterns(k, 2);
    std::vector<std::vector<BracketPredicate>> comp;
    for (const auto& p : pats) comp.push_back(compile_to_brackets(p));
    for (int n = k; n <= 5; ++n) {
      for (const Tree& t : oracle::all_trees(oracle::names(n))) {
        std::vector<NodeId> a;
        std::vector<bool> used(n, false);
        std::function<void()> rec = [&] {
          if (static_cast<int>(a.size()) == k) {
            Pattern m = match_pattern(t, a);
            for (std::size_t i = 0; i < pats.size(); ++i) {
              ++checks;
              mismatches += (pats[i] == m) != eval_brackets(comp[i], t, a);
            }
            return;
          }
          for (int i = 0; i < n; ++i) {
            if (used[i]) continue;
            used[i] = true;
            a.push_back(t.leaves()[i]);
            rec();
            a.pop_back();
            used[i] = false;
          }
        };
        rec();
      }
    }
  }
  Outcome o;
  o.ok = mismatches == 0 && checks > 0;
  o.detail = std::to_string(checks) + " checks, " + std::to_string(mismatches) + " mismatches";
  return o;
}

Outcome c5() {
  std::mt19937_64 rng(5);
  const char* payoffs[] = {"triplet", "quartet", "fstar-0.2", "split-right-3"};
  int good = 0, max_labels = 0, max_colors = 0;
  for (int i = 0; i < kC5Pairs; ++i) {
    int n = 4 + i % 9;
    Instance inst = random_instance(registry().get(payoffs[i % 4]), n, 3 * n, 100 + i);
    Solution phi = solution_from_tree(oracle::random_tree(inst.variables(), rng), inst);
    CoarsenResult r = coarsen(phi, kC5Eps);
    good += val_pm(r.xi, inst).plus >= value(phi, inst) - 1e-12;
    max_labels = std::max(max_labels, r.labels_created);
    max_colors = std::max(max_colors, r.colors);
  }
  Outcome o;
  o.ok = good == kC5Pairs && max_labels <= kC5MaxLabels && max_colors <= kC5MaxColors;
  o.detail = "val+>=value in " + std::to_string(good) + "/" + std::to_string(kC5Pairs) +
             ", max labels " + std::to_string(max_labels) + ", max colors " + std::to_string(max_colors);
  return o;
}

Outcome c6() {
  Instance inst = build_gap({registry().get("triplet"), 3});
  std::vector<int> chi(inst.num_vars());
  for (int i = 0; i < inst.num_vars(); ++i) chi[i] = i / 9;
  FixedColoringReport r = fixed_coloring_experiment(inst, chi, kC6Orders, 6);
  Outcome o;
  double limit = r.eps * r.weight + kC6Sigmas * r.stderr_;
  o.ok = r.mean <= limit;
  o.detail = "eps=" + fmt(r.eps) + " mean mc=" + fmt(r.mean) + " limit=" + fmt(limit) +
             " (eps*weight=" + fmt(r.eps * r.weight) + ")";
  return o;
}

Outcome c7() {
  std::mt19937_64 rng(7);
  Outcome o;
  int count = 0;
  for (int q : {2, 3}) {
    double bound = divergence_bound(q, 4), worst = 0.0;
    std::vector<std::vector<int>> labs;
    for (int i = 0; i < kC7Random; ++i) {
      std::vector<int> l(81);
      for (int& x : l) x = static_cast<int>(rng() % q);
      labs.push_back(l);
    }
    for (const auto& a : adversarial_labelings(3, 4, q)) labs.push_back(a.labels);
    for (const auto& l : labs) {
      double v = child_label_divergence(3, 4, l, q);
      worst = std::max(worst, v);
      o.ok &= v <= bound;
      ++count;
    }
    o.detail += "q=" + std::to_string(q) + " max=" + fmt(worst) + " bound=" + fmt(bound) + "; ";
  }
  o.detail += std::to_string(count) + " labelings";
  return o;
}

Outcome c8() {
  Outcome o;
  for (int k : {2, 4}) {
    CouplingExperiment e = coupling_experiment(4, 3, k, kC8Trials, 8);
    bool ok = e.marginal_error <= kC8ExactTol && e.coupled_min_rate >= e.bound;
    o.ok &= ok;
    o.detail += "k=" + std::to_string(k) + " marginal err=" + fmt(e.marginal_error) + " min rate=" +
                fmt(e.coupled_min_rate) + " >= " + fmt(e.bound) + "; ";
  }
  return o;
}

Outcome c9() {
  std::uint64_t trees = 0, mismatches = 0;
  for (int i = 0; i < kC9Instances; ++i) {
    int n = 3 + i % 4;
    Instance inst = random_instance(registry().get("triplet"), n, 2 * n, 900 + i);
    QuartetReduction r = triplets_to_quartets(inst);
    const auto& v = inst.variables();
    for (const Tree& t : oracle::all_trees(v)) {
      Tree s = attach_root_leaf(t, r.gamma);
      Tree back = root_at_leaf(s, r.gamma);
      int a = 0, b = 0, c = 0;
      for (const auto& con : inst.constraints()) {
        TripletConstraint tc{v[con.vars[0]], v[con.vars[1]], v[con.vars[2]]};
        a += triplet_satisfied(t, tc);
        b += quartet_satisfied(s, {tc.a, tc.b, tc.c, r.gamma});
        c += triplet_satisfied(back, tc);
      }
      ++trees;
      mismatches += a != b || a != c;
    }
  }
  Outcome o;
  o.ok = mismatches == 0;
  o.detail = std::to_string(trees) + " (instance, tree) pairs, " + std::to_string(mismatches) + " mismatches";
  return o;
}

Outcome c10() {
  std::mt19937_64 rng(10);
  int full = 0;
  for (int i = 0; i < kC10Sets; ++i) {
    Tree t = oracle::random_tree(oracle::names(8), rng);
    auto trips = induced_triplets(t);
    auto built = aho_build(trips, t.leaf_labels());
    bool all = built.has_value();
    for (const auto& tr : trips) all = all && triplet_satisfied(*built, tr);
    full += all;
  }
  std::vector<TripletConstraint> clash{{"a", "b", "c"}, {"a", "c", "b"}};
  std::vector<std::string> abc{"a", "b", "c"};
  bool inconsistent = !aho_build(clash, abc).has_value();
  Outcome o;
  o.ok = full == kC10Sets && inconsistent;
  o.detail = std::to_string(full) + "/" + std::to_string(kC10Sets) + " fully satisfied; clash " +
             (inconsistent ? "reported Inconsistent" : "NOT reported");
  return o;
}

Outcome c11() {
  PayoffFunction f = *registry().get("split-right-6");
  double uni = alpha_exact(uniform_measure(), f);
  // Deep enough that the bottom leaf carries (1-delta)^depth < 1e-12.
  const int depth = static_cast<int>(std::ceil(std::log(1e-12) / std::log1p(-kC11Delta)));
  BiasedMeasure best;
  double biased = -1.0;
  std::string side;
  for (Side s : {Side::kLeft, Side::kRight}) {
    BiasedMeasure m = biased_caterpillar(kC11Delta, depth, s);
    double v = alpha_exact(m, f);
    if (v > biased) {
      biased = v;
      best = m;
      side = s == Side::kLeft ? "left" : "right";
    }
  }
  McEstimate mu = alpha_mc(uniform_measure(), f, kC11Trials, 21);
  McEstimate mb = alpha_mc(best, f, kC11Trials, 22);
  const double z = 1.959963984540054;
  bool mc_ok = std::fabs(mu.mean - uni) <= kC11Sigmas * mu.half_width / z &&
               std::fabs(mb.mean - biased) <= kC11Sigmas * mb.half_width / z;
  Outcome o;
  o.ok = uni <= kC11UniformMax && biased >= kC11BiasedMin && mc_ok;
  o.detail = "uniform=" + fmt(uni) + " (mc " + fmt(mu.mean) + "), delta=" + fmt(kC11Delta) + " " + side +
             " caterpillar depth " + std::to_string(depth) + " = " + fmt(biased) + " (mc " + fmt(mb.mean) +
             ")" + (biased >= kC11BiasedMin ? "" : ", below " + fmt(kC11BiasedMin));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> all = {
      {1, "random-assignment baseline 1/3", kC1Seconds, c1},
      {2, "gap satisfiability", kC2Seconds, c2},
      {3, "order experiment", kC3Seconds, c3},
      {4, "bracket compiler equivalence", kC4Seconds, c4},
      {5, "coarsening", kC5Seconds, c5},
      {6, "monochromatic step", kC6Seconds, c6},
      {7, "divergence bound", kC7Seconds, c7},
      {8, "coupled map", kC8Seconds, c8},
      {9, "triplet to quartet reduction", kC9Seconds, c9},
      {10, "Aho BUILD", kC10Seconds, c10},
      {11, "biased assignment necessity", kC11Seconds, c11},
  };
  int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failed = 0;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = secs <= c.limit_seconds;
    bool ok = o.ok && in_time;
    failed += !ok;
    std::printf("%s criterion %d (%s): %s [%.2fs, limit %.0fs%s]\n", ok ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.limit_seconds, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
