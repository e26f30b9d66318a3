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

#include <numeric>
#include <random>
#include <set>

#include "oracles.hpp"
#include "phylocsp/error.hpp"
#include "phylocsp/pattern.hpp"
#include "phylocsp/phylo_problems.hpp"

namespace phylocsp {
namespace {

std::vector<NodeId> leaves_of(const Tree& t, std::initializer_list<const char*> names) {
  std::vector<NodeId> out;
  for (const char* n : names) out.push_back(t.leaf(n));
  return out;
}

// Ordered injective k-tuples of leaf ids.
void for_each_tuple(const Tree& t, int k, const std::function<void(std::vector<NodeId>&)>& fn) {
  std::vector<NodeId> cur;
  std::vector<bool> used(t.num_leaves(), false);
  std::function<void()> rec = [&] {
    if (static_cast<int>(cur.size()) == k) {
      fn(cur);
      return;
    }
    for (std::size_t i = 0; i < t.num_leaves(); ++i) {
      if (used[i]) continue;
      used[i] = true;
      cur.push_back(t.leaves()[i]);
      rec();
      cur.pop_back();
      used[i] = false;
    }
  };
  rec();
}

TEST(MatchPattern, MatchAndNoMatch) {
  Pattern p = Pattern::parse("((x1,x2),x3)");
  Tree one = Tree::parse_newick("((a,(b,e)),(c,d));");
  EXPECT_EQ(match_pattern(one, leaves_of(one, {"a", "b", "c"})), p);
  Tree two = Tree::parse_newick("((b,a),(c,d));");
  Pattern q = match_pattern(two, leaves_of(two, {"a", "b", "c"}));
  EXPECT_NE(q, p);
  EXPECT_EQ(q.canonical(), "((x2,x1),x3)");
}

TEST(MatchPattern, PatternIsItself) {
  Tree t = Tree::parse_newick("((x,y),z);");
  EXPECT_EQ(match_pattern(t, leaves_of(t, {"x", "y", "z"})).canonical(), "((x1,x2),x3)");
}

TEST(MatchPattern, NonInjectiveRejected) {
  Tree t = Tree::parse_newick("((x,y),z);");
  EXPECT_THROW(match_pattern(t, leaves_of(t, {"x", "x", "z"})), ArgumentError);
}

TEST(MatchPattern, AgreesWithStringRestriction) {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    Tree t = oracle::random_tree(oracle::names(7), rng);
    for (int k = 1; k <= 4; ++k) {
      for_each_tuple(t, k, [&](std::vector<NodeId>& a) {
        Pattern p = match_pattern(t, a);
        ASSERT_EQ(p.canonical(), oracle::matched(t, a));
        ASSERT_EQ(p.code(), pattern_code(t, a));
      });
    }
  }
}

TEST(EvaluatePayoff, AnimalsTriplet) {
  PayoffFunction f = triplet_payoff();
  Tree t = Tree::parse_newick("((lion,tiger),(tuna,(whale,dolphin)));");
  EXPECT_EQ(evaluate_payoff(f, t, leaves_of(t, {"whale", "dolphin", "tuna"})), 1.0);
  EXPECT_EQ(f.evaluate(t, leaves_of(t, {"whale", "dolphin", "tuna"})), 1.0);
}

TEST(EvaluatePayoff, ViolatedTriplet) {
  PayoffFunction f = triplet_payoff();
  Tree t = Tree::parse_newick("((a,b),c);");
  EXPECT_EQ(evaluate_payoff(f, t, leaves_of(t, {"a", "c", "b"})), 0.0);
}

TEST(EvaluatePayoff, EmptyTableDefaultZero) {
  PayoffFunction f("none", 3, {}, 0.0);
  Tree t = Tree::parse_newick("((a,b),c);");
  EXPECT_EQ(evaluate_payoff(f, t, leaves_of(t, {"a", "b", "c"})), 0.0);
  EXPECT_EQ(f.evaluate(t, leaves_of(t, {"c", "b", "a"})), 0.0);
}

TEST(EvaluatePayoff, CodePathMatchesCanonicalPath) {
  PayoffFunction f = quartet_payoff();
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 10; ++rep) {
    Tree t = oracle::random_tree(oracle::names(6), rng);
    for_each_tuple(t, 4, [&](std::vector<NodeId>& a) {
      ASSERT_EQ(f.evaluate(t, a), evaluate_payoff(f, t, a));
    });
  }
}

TEST(Brackets, TripletStrings) {
  auto first = compile_to_brackets(Pattern::parse("((x1,x2),x3)"));
  std::vector<std::string> s1;
  for (const auto& b : first) s1.push_back(b.to_string());
  EXPECT_EQ(s1, (std::vector<std::string>{"[x1,x2<x3]", "[x1<x2]"}));
  auto third = compile_to_brackets(Pattern::parse("(x3,(x1,x2))"));
  std::vector<std::string> s3;
  for (const auto& b : third) s3.push_back(b.to_string());
  EXPECT_EQ(s3, (std::vector<std::string>{"[x3<x1,x2]", "[x1<x2]"}));
}

TEST(Brackets, SingleLeafIsEmpty) {
  Pattern p = Pattern::parse("x1");
  EXPECT_TRUE(compile_to_brackets(p).empty());
  Tree t = Tree::parse_newick("((a,b),c);");
  EXPECT_TRUE(eval_brackets({}, t, leaves_of(t, {"b"})));
}

TEST(Brackets, Evaluation) {
  Tree t = Tree::parse_newick("((a,b),c);");
  std::vector<BracketPredicate> lt{BracketPredicate::pair_order(1, 2)};
  EXPECT_TRUE(eval_brackets(lt, t, leaves_of(t, {"a", "b"})));
  std::vector<BracketPredicate> split{BracketPredicate::triple_split({1, 2, 3}, {1, 1, 2})};
  Tree one = Tree::parse_newick("((a,(b,e)),(c,d));");
  EXPECT_TRUE(eval_brackets(split, one, leaves_of(one, {"a", "b", "c"})));
  Tree bad = Tree::parse_newick("((a,c),b);");
  EXPECT_FALSE(eval_brackets(split, bad, leaves_of(bad, {"a", "b", "c"})));
}

// Equivalence of compiled brackets and direct matching. Host leaf labels do
// not matter since every injective tuple is tried, so one tree per shape
// covers all labeled trees.
TEST(Brackets, ExhaustiveEquivalence) {
  std::uint64_t checked = 0;
  for (int r : {2, 3}) {
    for (int k = 1; k <= 4; ++k) {
      auto pats = enumerate_patterns(k, r);
      std::vector<std::vector<BracketPredicate>> compiled;
      for (const auto& p : pats) compiled.push_back(compile_to_brackets(p));
      for (int n = k; n <= 6; ++n) {
        for (const Tree& t : oracle::shape_trees(oracle::names(n), r)) {
          for_each_tuple(t, k, [&](std::vector<NodeId>& a) {
            std::string m = oracle::matched(t, a);
            int hits = 0;
            for (std::size_t i = 0; i < pats.size(); ++i) {
              bool holds = eval_brackets(compiled[i], t, a);
              hits += holds;
              ASSERT_EQ(pats[i].canonical() == m, holds)
                  << t.canonical() << " " << pats[i].canonical();
            }
            ASSERT_EQ(hits, 1);
            checked += pats.size();
          });
        }
      }
    }
  }
  EXPECT_GT(checked, 1000000u);
}

TEST(Enumerate, Counts) {
  EXPECT_EQ(enumerate_patterns(1, 2).size(), 1u);
  EXPECT_EQ(enumerate_patterns(2, 2).size(), 2u);
  EXPECT_EQ(enumerate_patterns(3, 2).size(), 12u);
  EXPECT_EQ(enumerate_patterns(4, 2).size(), 120u);
  EXPECT_EQ(enumerate_patterns(5, 2).size(), 1680u);
  // Ordered trees with 2..3 children on 3 leaves: 2 binary + 1 ternary shape.
  EXPECT_EQ(enumerate_patterns(3, 3).size(), 18u);
  EXPECT_THROW(enumerate_patterns(7, 2), ResourceError);
}

TEST(Enumerate, NoDuplicatesAndCodesDistinct) {
  for (int k = 1; k <= 5; ++k) {
    auto pats = enumerate_patterns(k, 2);
    std::set<std::string> canon;
    std::set<PatternCode> codes;
    for (const auto& p : pats) {
      canon.insert(p.canonical());
      codes.insert(p.code());
      EXPECT_EQ(Pattern::from_code(p.code()), p);
    }
    EXPECT_EQ(canon.size(), pats.size());
    EXPECT_EQ(codes.size(), pats.size());
  }
}

TEST(Enumerate, ExactlyOneMatch) {
  auto pats = enumerate_patterns(4, 2);
  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 10; ++rep) {
    Tree t = oracle::random_tree(oracle::names(7), rng);
    for_each_tuple(t, 4, [&](std::vector<NodeId>& a) {
      Pattern m = match_pattern(t, a);
      int hits = 0;
      for (const auto& p : pats) hits += p == m;
      ASSERT_EQ(hits, 1);
    });
  }
}

TEST(TripletTable, FourOfTwelveAndSymmetric) {
  PayoffFunction f = triplet_payoff();
  int ones = 0;
  for (const auto& p : enumerate_patterns(3, 2)) {
    double v = f.payoff(p);
    ones += v == 1.0;
    Tree t = p.tree();
    std::vector<NodeId> a{p.leaf_of_slot(1), p.leaf_of_slot(2), p.leaf_of_slot(3)};
    std::vector<NodeId> b{p.leaf_of_slot(2), p.leaf_of_slot(1), p.leaf_of_slot(3)};
    EXPECT_EQ(f.evaluate(t, a), f.evaluate(t, b));
  }
  EXPECT_EQ(ones, 4);
  EXPECT_TRUE(is_swap_invariant(f));
  EXPECT_FALSE(is_swap_invariant(split_right_payoff(3)));
}

TEST(Table, TextRoundTrip) {
  auto table = parse_pattern_table("# comment\n((x1,x2),x3) 1.0\n(x3,(x1,x2)) 0.5\n");
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[1].payoff, 0.5);
  auto again = parse_pattern_table(format_pattern_table(table));
  ASSERT_EQ(again.size(), 2u);
  EXPECT_EQ(again[0].pattern, table[0].pattern);
  EXPECT_THROW(parse_pattern_table("((x1,x2),x3) 1.5\n"), ArgumentError);
}

TEST(Table, CloseUnderSwaps) {
  std::vector<PatternEntry> t{{Pattern::parse("((x1,x2),x3)"), 1.0}};
  auto closed = close_under_swaps(t);
  EXPECT_EQ(closed.size(), 4u);
  PayoffFunction f("t", 3, closed);
  EXPECT_TRUE(is_swap_invariant(f));
  EXPECT_THROW(PayoffFunction("dup", 3, {t[0], t[0]}), ArgumentError);
}

}  // namespace
}  // namespace phylocsp
