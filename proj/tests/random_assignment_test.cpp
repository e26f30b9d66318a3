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

#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "phylocsp/error.hpp"
#include "phylocsp/phylo_problems.hpp"
#include "phylocsp/random_assignment.hpp"
#include "phylocsp/registry.hpp"

namespace phylocsp {
namespace {

using Dist = std::map<std::string, double>;

// Pattern law of the items in `slots` under fair splitting: the first split
// that separates them is uniform over the 2^j - 2 ordered bipartitions.
Dist split_dist(const std::vector<int>& slots) {
  if (slots.size() == 1) return {{"x" + std::to_string(slots[0]), 1.0}};
  Dist out;
  const int j = static_cast<int>(slots.size());
  const double w = 1.0 / (std::ldexp(1.0, j) - 2);
  for (int mask = 1; mask < (1 << j) - 1; ++mask) {
    std::vector<int> l, r;
    for (int i = 0; i < j; ++i) (mask >> i & 1 ? l : r).push_back(slots[i]);
    Dist dl = split_dist(l), dr = split_dist(r);
    for (const auto& [a, pa] : dl) {
      for (const auto& [b, pb] : dr) out["(" + a + "," + b + ")"] += w * pa * pb;
    }
  }
  return out;
}

// Joins per-skeleton-leaf subtree strings along the skeleton.
std::string compose(const Tree& s, NodeId v, const std::map<NodeId, std::string>& sub) {
  if (s.is_leaf(v)) {
    auto it = sub.find(v);
    return it == sub.end() ? "" : it->second;
  }
  std::string a = compose(s, s.children(v)[0], sub), b = compose(s, s.children(v)[1], sub);
  if (a.empty()) return b;
  if (b.empty()) return a;
  return "(" + a + "," + b + ")";
}

// E[f] by enumerating skeleton leaves for each of the k items.
double oracle_alpha(const BiasedMeasure& m, const PayoffFunction& f) {
  const int k = f.arity();
  const auto& lv = m.skeleton.leaves();
  const int L = static_cast<int>(lv.size());
  std::vector<int> at(k, 0);
  double total = 0.0;
  while (true) {
    double p = 1.0;
    for (int i = 0; i < k; ++i) p *= m.leaf_probs[at[i]];
    if (p > 0.0) {
      std::vector<std::vector<int>> groups(L);
      for (int i = 0; i < k; ++i) groups[at[i]].push_back(i + 1);
      // Product over the groups' distributions.
      std::vector<std::pair<std::map<NodeId, std::string>, double>> combos{{{}, p}};
      for (int g = 0; g < L; ++g) {
        if (groups[g].empty()) continue;
        Dist d = split_dist(groups[g]);
        std::vector<std::pair<std::map<NodeId, std::string>, double>> next;
        for (const auto& [sub, q] : combos) {
          for (const auto& [s, pr] : d) {
            auto sub2 = sub;
            sub2[lv[g]] = s;
            next.emplace_back(std::move(sub2), q * pr);
          }
        }
        combos = std::move(next);
      }
      for (const auto& [sub, q] : combos) {
        total += q * f.payoff_by_canonical(compose(m.skeleton, m.skeleton.root(), sub));
      }
    }
    int i = 0;
    while (i < k && ++at[i] == L) at[i++] = 0;
    if (i == k) break;
  }
  return total;
}

PayoffFunction named(const char* name) {
  PayoffRegistry reg;
  return *reg.get(name);
}

TEST(Sample, SingleVariableAndValidity) {
  Rng rng(1);
  std::vector<std::string> one{"a"};
  BiasedMeasure cat = biased_caterpillar(0.3, 5);
  EXPECT_EQ(sample_tree(cat, one, rng).canonical(), "a");
  auto labels = oracle::names(12);
  for (int i = 0; i < 200; ++i) {
    Tree t = sample_tree(cat, labels, rng);
    EXPECT_TRUE(t.is_full_binary());
    EXPECT_EQ(t.num_leaves(), 12u);
  }
}

TEST(Sample, UniformTripletThird) {
  PayoffRegistry reg;
  auto f = reg.get("triplet");
  McEstimate e = alpha_mc(uniform_measure(), *f, 100000, 5);
  EXPECT_NEAR(e.mean, 1.0 / 3.0, 0.01);
}

TEST(Sample, RespectsSkeletonOrder) {
  // Two skeleton leaves with equal mass: variables on the left skeleton leaf
  // precede those on the right one.
  std::vector<double> half{0.5};
  BiasedMeasure m = measure_from_splits(1, half);
  auto labels = oracle::names(2);
  Rng rng(2);
  int first = 0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) first += sample_tree(m, labels, rng).leaf_labels()[0] == "v1";
  EXPECT_NEAR(static_cast<double>(first) / n, 0.5, 0.01);
  std::vector<double> all_left{1.0};
  BiasedMeasure left = measure_from_splits(1, all_left);
  EXPECT_EQ(left.leaf_probs, (std::vector<double>{1.0, 0.0}));
}

TEST(SplitDist, SmallArities) {
  auto d2 = uniform_split_pattern_dist(2);
  double s2 = 0.0;
  for (const auto& [p, pr] : d2) s2 += pr;
  EXPECT_NEAR(s2, 1.0, 1e-15);
  auto d3 = uniform_split_pattern_dist(3);
  ASSERT_EQ(d3.size(), 12u);
  for (const auto& [p, pr] : d3) EXPECT_NEAR(pr, 1.0 / 12.0, 1e-15);
  for (int k = 1; k <= 6; ++k) {
    auto d = uniform_split_pattern_dist(k);
    std::vector<int> slots;
    for (int i = 1; i <= k; ++i) slots.push_back(i);
    Dist ref = split_dist(slots);
    double total = 0.0;
    for (const auto& [p, pr] : d) {
      total += pr;
      ASSERT_NEAR(pr, ref.at(p.canonical()), 1e-15) << p.canonical();
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
  EXPECT_THROW(uniform_split_pattern_dist(7), ResourceError);
}

TEST(SplitDist, MonteCarloAgreesForThree) {
  Rng rng(9);
  std::vector<std::string> labels{"x1", "x2", "x3"};
  std::map<std::string, int> hits;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) ++hits[sample_tree(uniform_measure(), labels, rng).canonical()];
  ASSERT_EQ(hits.size(), 12u);
  for (const auto& [s, c] : hits) EXPECT_NEAR(static_cast<double>(c) / n, 1.0 / 12.0, 0.003) << s;
}

TEST(SplitDist, Exchangeable) {
  auto d = uniform_split_pattern_dist(4);
  std::map<std::string, double> by;
  for (const auto& [p, pr] : d) by[p.canonical()] = pr;
  // Relabel slots by the cycle 1->2->3->4->1.
  for (const auto& [s, pr] : by) {
    std::string t = s;
    for (char& c : t) {
      if (c >= '1' && c <= '4') c = static_cast<char>('1' + (c - '1' + 1) % 4);
    }
    EXPECT_NEAR(by.at(t), pr, 1e-15);
  }
}

TEST(AlphaExact, MatchesEnumerationOracle) {
  std::vector<double> splits{0.3, 0.8, 0.1};
  std::vector<BiasedMeasure> ms{uniform_measure(), biased_caterpillar(0.2, 3),
                                biased_caterpillar(0.4, 2, Side::kRight), measure_from_splits(2, splits)};
  for (const char* name : {"triplet", "fstar-0.3", "quartet", "split-right-4", "split-left-4"}) {
    PayoffFunction f = named(name);
    for (const auto& m : ms) {
      EXPECT_NEAR(alpha_exact(m, f), oracle_alpha(m, f), 1e-12) << name;
    }
  }
}

TEST(AlphaExact, Examples) {
  EXPECT_NEAR(alpha_exact(uniform_measure(), named("triplet")), 1.0 / 3.0, 1e-15);
  PayoffFunction s6 = named("split-right-6");
  double u = alpha_exact(uniform_measure(), s6);
  EXPECT_LE(u, 0.2);
  EXPECT_NEAR(u, oracle_alpha(uniform_measure(), s6), 1e-15);
  EXPECT_EQ(alpha_exact(biased_caterpillar(0.3, 4), named("one-3")), 1.0);
  EXPECT_THROW(alpha_exact(uniform_measure(), PayoffFunction("big", 7, {}, 1.0)), ResourceError);
}

TEST(AlphaExact, SplitRightDecaysWithK) {
  // A split of three or more sends exactly one variable right.
  EXPECT_EQ(alpha_exact(uniform_measure(), named("split-right-2")), 1.0);
  EXPECT_NEAR(alpha_exact(uniform_measure(), named("split-right-3")), 0.5, 1e-15);
  double prev = 1.0;
  for (int k = 3; k <= 6; ++k) {
    double v = alpha_exact(uniform_measure(), named(("split-right-" + std::to_string(k)).c_str()));
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(AlphaExact, ScalesLinearly) {
  PayoffFunction f = named("fstar-0.2");
  PayoffFunction g = f.scaled(0.5, "half");
  BiasedMeasure m = biased_caterpillar(0.25, 6);
  EXPECT_NEAR(alpha_exact(m, g), 0.5 * alpha_exact(m, f), 1e-15);
  SearchOptions o;
  o.depth_cap = 1;
  o.grid_steps = 4;
  o.refine_rounds = 1;
  o.caterpillar_depth_cap = 64;
  ThresholdReport a = alpha_opt_search(f, o), b = alpha_opt_search(g, o);
  EXPECT_NEAR(b.alpha, 0.5 * a.alpha, 1e-12);
  EXPECT_EQ(a.family, b.family);
  EXPECT_EQ(a.best.leaf_probs, b.best.leaf_probs);
}

TEST(AlphaMc, ConsistentWithExact) {
  std::vector<BiasedMeasure> ms{uniform_measure(), biased_caterpillar(0.2, 8)};
  for (const char* name : {"triplet", "split-right-4", "quartet"}) {
    PayoffFunction f = named(name);
    for (const auto& m : ms) {
      McEstimate e = alpha_mc(m, f, 200000, 17);
      EXPECT_LE(std::fabs(e.mean - alpha_exact(m, f)), 4 * e.half_width + 1e-12) << name;
    }
  }
}

TEST(AlphaMc, DeterministicAndSingleTrial) {
  PayoffFunction f = named("fstar-0.5");
  McEstimate a = alpha_mc(uniform_measure(), f, 5000, 3), b = alpha_mc(uniform_measure(), f, 5000, 3);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.half_width, b.half_width);
  McEstimate one = alpha_mc(uniform_measure(), f, 1, 3);
  EXPECT_TRUE(one.mean == 0.0 || one.mean == 0.5 || one.mean == 1.0);
  EXPECT_THROW(alpha_mc(uniform_measure(), f, 0, 3), ArgumentError);
}

TEST(Measure, Validation) {
  BiasedMeasure bad = biased_caterpillar(0.5, 2);
  bad.leaf_probs[0] += 0.1;
  EXPECT_THROW(validate_measure(bad), ArgumentError);
  EXPECT_THROW(biased_caterpillar(0.0, 3), ArgumentError);
  BiasedMeasure cat = biased_caterpillar(0.1, 3);
  ASSERT_EQ(cat.leaf_probs.size(), 4u);
  // Left caterpillar: bottom leaf first, then leaves hanging at depth 3, 2, 1.
  EXPECT_NEAR(cat.leaf_probs[0], std::pow(0.9, 3), 1e-15);
  EXPECT_NEAR(cat.leaf_probs[3], 0.1, 1e-15);
}

TEST(Search, TripletUniformIsOptimal) {
  SearchOptions o;
  o.depth_cap = 2;
  o.grid_steps = 10;
  o.refine_rounds = 2;
  o.caterpillar_depth_cap = 200;
  ThresholdReport r = alpha_opt_search(named("triplet"), o);
  EXPECT_NEAR(r.alpha, 1.0 / 3.0, 1e-9);
  EXPECT_LE(r.alpha, 1.0 / 3.0 + 1e-9);
  EXPECT_EQ(alpha_opt_search(named("one-4"), o).alpha, 1.0);
}

TEST(Search, SplitRightFindsBias) {
  SearchOptions o;
  o.depth_cap = 0;
  o.caterpillar_depth_cap = 2000;
  ThresholdReport r = alpha_opt_search(named("split-right-6"), o);
  EXPECT_GE(r.alpha, 0.8);
  EXPECT_NEAR(r.alpha, alpha_exact(r.best, named("split-right-6")), 1e-12);
}

TEST(Mixture, Examples) {
  SearchOptions o;
  o.depth_cap = 1;
  o.grid_steps = 5;
  o.refine_rounds = 1;
  o.caterpillar_depth_cap = 300;
  PayoffFunction t = named("triplet"), q = named("quartet");
  const PayoffFunction* one[] = {&t};
  const double w1[] = {1.0};
  EXPECT_NEAR(mixture_threshold(one, w1, o).alpha, alpha_opt_search(t, o).alpha, 1e-15);
  const PayoffFunction* two[] = {&t, &q};
  const double w10[] = {1.0, 0.0};
  EXPECT_NEAR(mixture_threshold(two, w10, o).alpha, alpha_opt_search(t, o).alpha, 1e-15);
  PayoffFunction l = named("split-left-4"), r = named("split-right-4");
  const PayoffFunction* lr[] = {&l, &r};
  const double half[] = {0.5, 0.5};
  double mix = mixture_threshold(lr, half, o).alpha;
  double solo = std::max(alpha_opt_search(l, o).alpha, alpha_opt_search(r, o).alpha);
  EXPECT_LE(mix, solo + 1e-12);
  const double bad[] = {0.7, 0.7};
  EXPECT_THROW(mixture_threshold(lr, bad, o), ArgumentError);
}

}  // namespace
}  // namespace phylocsp
