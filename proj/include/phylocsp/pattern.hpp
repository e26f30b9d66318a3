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

#ifndef PHYLOCSP_PATTERN_HPP_
#define PHYLOCSP_PATTERN_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "phylocsp/tree.hpp"

namespace phylocsp {

inline constexpr int kMaxPatternArity = 8;

// Compact key of an ordered pattern on k <= 8 slots: the slots in leaf order
// plus the depth, inside the pattern, of the LCA of every consecutive pair.
using PatternCode = std::uint64_t;

// `slot_order` lists 0-based slots left to right; `lca_depths[i]` is any
// depth measure of lca(slot_order[i], slot_order[i+1]) in the host tree.
PatternCode encode_pattern(std::span<const int> slot_order,
                           std::span<const int> lca_depths);
// Code of the pattern induced by `assignment` (slot i -> leaf id).
PatternCode pattern_code(const Tree& tree, std::span<const NodeId> assignment);
int pattern_code_arity(PatternCode code);

// A tree whose leaves are labeled x1..xk, each exactly once.
class Pattern {
 public:
  explicit Pattern(Tree tree);
  static Pattern parse(std::string_view text);
  static Pattern from_code(PatternCode code);

  const Tree& tree() const { return tree_; }
  int arity() const { return static_cast<int>(leaf_of_slot_.size()); }
  const std::string& canonical() const { return canonical_; }
  // Slots are 1-based.
  NodeId leaf_of_slot(int slot) const { return leaf_of_slot_.at(slot - 1); }
  int slot_of(NodeId leaf) const;
  PatternCode code() const { return code_; }
  bool is_binary() const { return tree_.max_arity() <= 2; }

  friend bool operator==(const Pattern& a, const Pattern& b) {
    return a.canonical_ == b.canonical_;
  }

 private:
  Tree tree_;
  std::vector<NodeId> leaf_of_slot_;
  std::string canonical_;
  PatternCode code_ = 0;
};

std::string slot_label(int slot);

// Restriction of `tree` to the assigned leaves, relabeled by slot.
Pattern match_pattern(const Tree& tree, std::span<const NodeId> assignment);

struct PatternEntry {
  Pattern pattern;
  double payoff;
};

class PayoffFunction {
 public:
  PayoffFunction(std::string name, int arity, std::vector<PatternEntry> table,
                 double default_payoff = 0.0);

  const std::string& name() const { return name_; }
  int arity() const { return arity_; }
  double default_payoff() const { return default_payoff_; }
  const std::vector<PatternEntry>& table() const { return table_; }
  double max_payoff() const;
  bool is_satisfiable() const { return max_payoff() == 1.0; }

  double payoff(PatternCode code) const;
  double payoff(const Pattern& p) const;
  // Looks up the canonical serialization of the pattern.
  double payoff_by_canonical(const std::string& canonical) const;
  // Fast path through pattern_code().
  double evaluate(const Tree& tree, std::span<const NodeId> assignment) const;
  PayoffFunction scaled(double c, std::string name) const;

 private:
  std::string name_;
  int arity_;
  std::vector<PatternEntry> table_;
  double default_payoff_;
  std::unordered_map<PatternCode, double> by_code_;
  std::unordered_map<std::string, double> by_canonical_;
};

// Table lookup of match_pattern(tree, assignment).
double evaluate_payoff(const PayoffFunction& f, const Tree& tree,
                       std::span<const NodeId> assignment);

// Adds every child-order variant of each entry with the same payoff.
std::vector<PatternEntry> close_under_swaps(
    const std::vector<PatternEntry>& table);

// True iff reordering children anywhere never changes the payoff.
bool is_swap_invariant(const PayoffFunction& f);

// All ordered patterns on k slots whose internal nodes have 2..r children.
std::vector<Pattern> enumerate_patterns(int k, int r);

// Lines of the form `((x1,x2),x3) 1.0`; '#' starts a comment.
std::vector<PatternEntry> parse_pattern_table(std::string_view text);
std::string format_pattern_table(const std::vector<PatternEntry>& table);

struct BracketPredicate {
  enum class Kind { kPairOrder, kTripleSplit };
  Kind kind;
  std::array<int, 3> slots{};  // 1-based; pairs use the first two
  std::array<int, 3> child{};  // 1-based child ranks at the LCA (triples)

  static BracketPredicate pair_order(int a, int b);
  static BracketPredicate triple_split(std::array<int, 3> slots,
                                       std::array<int, 3> child);
  std::string to_string() const;
  friend bool operator==(const BracketPredicate&,
                         const BracketPredicate&) = default;
};

// A conjunction that holds exactly on trees where match_pattern(.) == p.
std::vector<BracketPredicate> compile_to_brackets(const Pattern& p);
bool eval_brackets(std::span<const BracketPredicate> conjunction,
                   const Tree& tree, std::span<const NodeId> assignment);

}  // namespace phylocsp

#endif  // PHYLOCSP_PATTERN_HPP_
