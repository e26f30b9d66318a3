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
#include <random>

#include "oracles.hpp"
#include "phylocsp/error.hpp"
#include "phylocsp/gap_instance.hpp"
#include "phylocsp/registry.hpp"

namespace phylocsp {
namespace {

using Tuple = std::vector<int>;

GapSpec spec(const char* name, int d) {
  PayoffRegistry reg;
  return GapSpec{reg.get(name), d};
}

// Law of the level-sampling map, by enumerating level, node and one leaf
// per child subtree. Leaves are 1-based.
std::map<Tuple, Rational> map_law(int k, int d) {
  std::map<Tuple, Rational> out;
  int m = 1;
  for (int i = 0; i < d; ++i) m *= k;
  for (int i = 0; i < d; ++i) {
    int nodes = 1;
    for (int j = 0; j < i; ++j) nodes *= k;
    const int span = m / nodes, sub = span / k;
    for (int u = 0; u < nodes; ++u) {
      Tuple t(k);
      std::function<void(int, Rational)> rec = [&](int j, Rational p) {
        if (j == k) {
          out[t] += p;
          return;
        }
        for (int x = 0; x < sub; ++x) {
          t[j] = u * span + j * sub + x + 1;
          rec(j + 1, p / sub);
        }
      };
      rec(0, Rational(1, d * nodes));
    }
  }
  return out;
}

TEST(LkmWeight, Examples) {
  GapSpec s1 = spec("triplet", 1);
  std::vector<int> t123{1, 2, 3}, t213{2, 1, 3};
  EXPECT_EQ(lkm_weight(t123, s1), Rational(1));
  EXPECT_EQ(lkm_weight(t213, s1), Rational(0));
  GapSpec s2 = spec("triplet", 2);
  std::vector<int> top{1, 4, 9}, low{1, 2, 3}, none{1, 2, 4};
  EXPECT_EQ(lkm_weight(top, s2), Rational(1, 54));
  EXPECT_EQ(lkm_weight(low, s2), Rational(1, 6));
  EXPECT_EQ(lkm_weight(none, s2), Rational(0));
}

TEST(LkmWeight, MatchesMapLaw) {
  for (auto [name, k, d] : {std::tuple{"split-right-2", 2, 3}, std::tuple{"triplet", 3, 2},
                            std::tuple{"quartet", 4, 2}}) {
    GapSpec s = spec(name, d);
    auto law = map_law(k, d);
    int m = s.num_leaves();
    Tuple t(k, 1);
    Rational total = 0;
    while (true) {
      Rational w = lkm_weight(t, s);
      auto it = law.find(t);
      ASSERT_EQ(w, it == law.end() ? Rational(0) : it->second);
      total += w;
      int j = k - 1;
      while (j >= 0 && ++t[j] > m) t[j--] = 1;
      if (j < 0) break;
    }
    EXPECT_EQ(total, Rational(1));
  }
}

TEST(LkmWeight, MonteCarloOfMap) {
  GapSpec s = spec("triplet", 2);
  std::mt19937_64 rng(4);
  std::map<Tuple, int> hits;
  const int n = 1000000;
  for (int r = 0; r < n; ++r) {
    int i = static_cast<int>(rng() % 2);
    int u = i == 0 ? 0 : static_cast<int>(rng() % 3);
    int span = i == 0 ? 9 : 3, sub = span / 3;
    Tuple t(3);
    for (int j = 0; j < 3; ++j) t[j] = u * span + j * sub + static_cast<int>(rng() % sub) + 1;
    ++hits[t];
  }
  std::vector<int> top{1, 4, 9};
  double p = static_cast<double>(hits[top]) / n;
  EXPECT_NEAR(p, 1.0 / 54, 4 * std::sqrt(p * (1 - p) / n));
}

TEST(BuildGap, Counts) {
  EXPECT_EQ(build_gap(spec("triplet", 2)).constraints().size(), 30u);
  EXPECT_EQ(build_gap(spec("split-right-2", 2)).constraints().size(), 6u);
  EXPECT_EQ(gap_constraint_count(3, 2), 30u);
  EXPECT_EQ(gap_constraint_count(2, 2), 6u);
  EXPECT_EQ(gap_constraint_count(4, 2), 260u);
  for (int k = 2; k <= 4; ++k) {
    for (int d = 1; d <= 3; ++d) {
      std::uint64_t expect = 0;
      for (int i = 0; i < d; ++i) {
        expect += static_cast<std::uint64_t>(std::llround(std::pow(k, i) * std::pow(std::pow(k, d - i - 1), k)));
      }
      EXPECT_EQ(gap_constraint_count(k, d), expect);
    }
  }
  EXPECT_THROW(build_gap(spec("triplet", 9)), ResourceError);
  EXPECT_THROW(build_gap(spec("triplet", 0)), ArgumentError);
}

TEST(BuildGap, ConstraintsAreCousinsWithMapWeights) {
  for (auto [name, d] : {std::pair{"triplet", 2}, std::pair{"quartet", 2}, std::pair{"split-right-2", 3}}) {
    GapSpec s = spec(name, d);
    Instance inst = build_gap(s);
    Tree base = gap_base_tree(s);
    auto law = map_law(s.k(), d);
    EXPECT_EQ(inst.constraints().size(), law.size());
    Rational total = 0;
    for (const auto& c : inst.constraints()) {
      std::vector<NodeId> leaves;
      Tuple t;
      for (int v : c.vars) {
        leaves.push_back(base.leaf(inst.variables()[v]));
        t.push_back(v + 1);
      }
      EXPECT_TRUE(cousins(base, leaves));
      EXPECT_EQ(c.weight, law.at(t));
      total += c.weight;
    }
    EXPECT_EQ(total, Rational(1));
    EXPECT_TRUE(is_regular(inst));
  }
}

TEST(Cousins, Examples) {
  Tree t = build_perfect(3, 1);
  auto ids = [&](const Tree& tr, std::initializer_list<const char*> ls) {
    std::vector<NodeId> out;
    for (const char* l : ls) out.push_back(tr.leaf(l));
    return out;
  };
  EXPECT_TRUE(cousins(t, ids(t, {"1", "2", "3"})));
  EXPECT_FALSE(cousins(t, ids(t, {"2", "1", "3"})));
  Tree t2 = build_perfect(3, 2);
  EXPECT_TRUE(cousins(t2, ids(t2, {"1", "4", "9"})));
  EXPECT_FALSE(cousins(t2, ids(t2, {"1", "2", "9"})));
}

TEST(Satisfying, ValueOneAcrossRegistry) {
  for (const char* name : {"triplet", "fstar-0.1", "split-right-2", "split-right-3", "split-right-4",
                           "split-left-3", "quartet", "one-3"}) {
    for (int d = 1; d <= 2; ++d) {
      GapSpec s = spec(name, d);
      Instance inst = build_gap(s);
      Solution sol = satisfying_solution(s);
      EXPECT_TRUE(sol.tree.is_full_binary());
      EXPECT_EQ(value(sol, inst), 1.0) << name << " d=" << d;
    }
  }
}

TEST(Satisfying, UnsatisfiableRejected) {
  auto f = std::make_shared<const PayoffFunction>("half", 3, std::vector<PatternEntry>{}, 0.5);
  EXPECT_THROW(satisfying_solution(GapSpec{f, 1}), ArgumentError);
}

TEST(OrderExperiment, ExhaustiveTwoThirds) {
  OrderExperiment e = order_experiment(spec("triplet", 1), 0, 0, true);
  EXPECT_TRUE(e.exhaustive);
  EXPECT_EQ(e.values.size(), 6u);
  EXPECT_NEAR(e.mean, 2.0 / 3.0, 1e-15);
  int ones = 0;
  for (double v : e.values) ones += v == 1.0;
  EXPECT_EQ(ones, 4);
}

TEST(OrderExperiment, DeeperIsLower) {
  OrderExperiment e1 = order_experiment(spec("triplet", 1), 0, 0, true);
  OrderExperiment e2 = order_experiment(spec("triplet", 2), 40, 7);
  EXPECT_EQ(e2.values.size(), 40u);
  EXPECT_LT(e2.mean, e1.mean);
  EXPECT_GT(e2.mean, 1.0 / 3.0);
  OrderExperiment again = order_experiment(spec("triplet", 2), 40, 7);
  EXPECT_EQ(again.values, e2.values);
  EXPECT_THROW(order_experiment(spec("split-right-2", 4), 1, 0), ResourceError);
}

// Direct evaluation of the divergence sum for one node by walking leaves.
double oracle_divergence(int k, int d, const std::vector<int>& labels, int q) {
  Tree t = build_perfect(k, d);
  auto mu = [&](NodeId v) {
    std::vector<double> f(q, 0.0);
    auto ls = t.subtree_leaves(v);
    for (NodeId l : ls) f[labels[t.leaf_position(l)]] += 1.0 / ls.size();
    return f;
  };
  std::vector<std::vector<NodeId>> level(d);
  for (NodeId v = 0; v < t.num_nodes(); ++v) {
    if (!t.is_leaf(v)) level[t.depth(v)].push_back(v);
  }
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    double lv = 0.0;
    for (NodeId u : level[i]) {
      auto mu_u = mu(u);
      double s = 0.0;
      for (NodeId y : t.children(u)) {
        auto mu_y = mu(y);
        for (int c = 0; c < q; ++c) s += std::fabs(mu_y[c] - mu_u[c]);
      }
      lv += s / k;
    }
    total += lv / level[i].size();
  }
  return total / d;
}

TEST(Divergence, Examples) {
  std::vector<int> zero(81, 0);
  EXPECT_EQ(child_label_divergence(3, 4, zero, 1), 0.0);
  std::vector<int> mod(81);
  for (int i = 0; i < 81; ++i) mod[i] = i % 3;
  double v = child_label_divergence(3, 4, mod, 3);
  EXPECT_NEAR(v, oracle_divergence(3, 4, mod, 3), 1e-12);
  EXPECT_LE(v, divergence_bound(3, 4));
  EXPECT_NEAR(divergence_bound(2, 4), std::sqrt(0.5), 1e-15);
}

TEST(Divergence, RandomAndAdversarialWithinBound) {
  std::mt19937_64 rng(6);
  for (int q : {2, 3}) {
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<int> lab(81);
      for (int& x : lab) x = static_cast<int>(rng() % q);
      double v = child_label_divergence(3, 4, lab, q);
      EXPECT_NEAR(v, oracle_divergence(3, 4, lab, q), 1e-12);
      EXPECT_LE(v, divergence_bound(q, 4));
    }
    auto adv = adversarial_labelings(3, 4, q);
    EXPECT_EQ(adv.size(), 3u);
    for (const auto& a : adv) {
      double v = child_label_divergence(3, 4, a.labels, q);
      EXPECT_GT(v, 0.0) << a.name;
      EXPECT_LE(v, divergence_bound(q, 4)) << a.name;
      EXPECT_NEAR(v, oracle_divergence(3, 4, a.labels, q), 1e-12);
    }
  }
}

}  // namespace
}  // namespace phylocsp
