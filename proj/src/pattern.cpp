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

#include "phylocsp/pattern.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "phylocsp/error.hpp"

namespace phylocsp {

namespace {

void check_arity(int k) {
  if (k < 1 || k > kMaxPatternArity) {
    throw ResourceError("pattern arity " + std::to_string(k) +
                        " outside supported range 1.." +
                        std::to_string(kMaxPatternArity));
  }
}

// Rewrites raw LCA depths into depths within the pattern itself.
void normalize_depths(std::span<const int> raw, std::span<int> out, int base) {
  if (raw.empty()) return;
  int lo = *std::min_element(raw.begin(), raw.end());
  std::size_t start = 0;
  for (std::size_t i = 0; i <= raw.size(); ++i) {
    if (i == raw.size() || raw[i] == lo) {
      normalize_depths(raw.subspan(start, i - start),
                       out.subspan(start, i - start), base + 1);
      if (i < raw.size()) out[i] = base;
      start = i + 1;
    }
  }
}

NodeId build_from_code(TreeBuilder& b, std::span<const int> order,
                       std::span<const int> depths, int base) {
  if (order.size() == 1) return b.add_leaf(slot_label(order[0] + 1));
  std::vector<NodeId> children;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= depths.size(); ++i) {
    if (i == depths.size() || depths[i] == base) {
      children.push_back(build_from_code(b, order.subspan(start, i + 1 - start),
                                         depths.subspan(start, i - start),
                                         base + 1));
      start = i + 1;
    }
  }
  return b.add_internal(std::move(children));
}

int parse_slot(const std::string& label, int k) {
  int slot = 0;
  if (label.size() < 2 || label[0] != 'x') return 0;
  auto [ptr, ec] =
      std::from_chars(label.data() + 1, label.data() + label.size(), slot);
  if (ec != std::errc() || ptr != label.data() + label.size()) return 0;
  return slot >= 1 && slot <= k ? slot : 0;
}

// Ordered shapes with n leaves; leaves are written as '*'.
std::vector<std::string> shapes(int n, int r) {
  if (n == 1) return {"*"};
  std::vector<std::string> out;
  std::vector<std::vector<std::string>> memo(n);
  for (int m = 1; m < n; ++m) memo[m] = shapes(m, r);
  // Compositions of n into c parts, c = 2..r, parts enumerated
  // lexicographically by size of the first part.
  std::vector<int> parts;
  auto rec = [&](auto& self, int remaining, int c) -> void {
    if (c == 1) {
      parts.push_back(remaining);
      std::vector<std::string> acc{""};
      for (std::size_t i = 0; i < parts.size(); ++i) {
        std::vector<std::string> next;
        for (const auto& prefix : acc) {
          for (const auto& s : memo[parts[i]]) {
            next.push_back(prefix + (i ? "," : "") + s);
          }
        }
        acc = std::move(next);
      }
      for (auto& s : acc) out.push_back("(" + s + ")");
      parts.pop_back();
      return;
    }
    for (int first = 1; first <= remaining - (c - 1); ++first) {
      parts.push_back(first);
      self(self, remaining - first, c - 1);
      parts.pop_back();
    }
  };
  for (int c = 2; c <= std::min(r, n); ++c) rec(rec, n, c);
  return out;
}

void swap_variants(const Tree& t, NodeId v, std::vector<std::string>& out) {
  if (t.is_leaf(v)) {
    out = {t.label(v)};
    return;
  }
  std::vector<std::vector<std::string>> parts;
  for (NodeId c : t.children(v)) {
    parts.emplace_back();
    swap_variants(t, c, parts.back());
  }
  std::vector<int> perm(parts.size());
  std::iota(perm.begin(), perm.end(), 0);
  out.clear();
  do {
    std::vector<std::string> acc{""};
    for (std::size_t i = 0; i < perm.size(); ++i) {
      std::vector<std::string> next;
      for (const auto& prefix : acc) {
        for (const auto& s : parts[perm[i]]) {
          next.push_back(prefix + (i ? "," : "") + s);
        }
      }
      acc = std::move(next);
    }
    for (auto& s : acc) out.push_back("(" + s + ")");
  } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace

PatternCode encode_pattern(std::span<const int> slot_order,
                           std::span<const int> lca_depths) {
  int k = static_cast<int>(slot_order.size());
  check_arity(k);
  if (static_cast<int>(lca_depths.size()) != k - 1) {
    throw ArgumentError("encode_pattern: need k-1 LCA depths");
  }
  std::array<int, kMaxPatternArity> norm{};
  normalize_depths(lca_depths, std::span<int>(norm.data(), k - 1), 0);
  PatternCode code = static_cast<PatternCode>(k);
  for (int i = 0; i < k; ++i) {
    code |= static_cast<PatternCode>(slot_order[i]) << (4 + 4 * i);
  }
  for (int i = 0; i + 1 < k; ++i) {
    code |= static_cast<PatternCode>(norm[i]) << (36 + 4 * i);
  }
  return code;
}

int pattern_code_arity(PatternCode code) { return static_cast<int>(code & 15); }

PatternCode pattern_code(const Tree& tree, std::span<const NodeId> assignment) {
  int k = static_cast<int>(assignment.size());
  check_arity(k);
  std::array<std::pair<std::size_t, int>, kMaxPatternArity> pos;
  for (int i = 0; i < k; ++i) pos[i] = {tree.leaf_position(assignment[i]), i};
  std::sort(pos.begin(), pos.begin() + k);
  std::array<int, kMaxPatternArity> order{};
  std::array<int, kMaxPatternArity> depth{};
  for (int i = 0; i < k; ++i) {
    if (i > 0 && pos[i].first == pos[i - 1].first) {
      throw ArgumentError("assignment is not injective");
    }
    order[i] = pos[i].second;
  }
  for (int i = 0; i + 1 < k; ++i) {
    depth[i] = tree.depth(
        tree.lca(assignment[order[i]], assignment[order[i + 1]]));
  }
  return encode_pattern(std::span<const int>(order.data(), k),
                        std::span<const int>(depth.data(), k - 1));
}

std::string slot_label(int slot) { return "x" + std::to_string(slot); }

Pattern::Pattern(Tree tree) : tree_(std::move(tree)) {
  int k = static_cast<int>(tree_.num_leaves());
  check_arity(k);
  leaf_of_slot_.assign(k, kNoNode);
  for (NodeId l : tree_.leaves()) {
    int slot = parse_slot(tree_.label(l), k);
    if (slot == 0) {
      throw ArgumentError("pattern leaf '" + tree_.label(l) +
                          "' is not one of x1..x" + std::to_string(k));
    }
    leaf_of_slot_[slot - 1] = l;
  }
  canonical_ = tree_.canonical();
  code_ = pattern_code(tree_, leaf_of_slot_);
}

Pattern Pattern::parse(std::string_view text) {
  return Pattern(Tree::parse_newick(text));
}

Pattern Pattern::from_code(PatternCode code) {
  int k = pattern_code_arity(code);
  check_arity(k);
  std::array<int, kMaxPatternArity> order{};
  std::array<int, kMaxPatternArity> depth{};
  for (int i = 0; i < k; ++i) order[i] = static_cast<int>((code >> (4 + 4 * i)) & 15);
  for (int i = 0; i + 1 < k; ++i) depth[i] = static_cast<int>((code >> (36 + 4 * i)) & 15);
  TreeBuilder b;
  NodeId root = build_from_code(b, std::span<const int>(order.data(), k),
                                std::span<const int>(depth.data(), k - 1), 0);
  return Pattern(std::move(b).build(root));
}

int Pattern::slot_of(NodeId leaf) const {
  for (std::size_t i = 0; i < leaf_of_slot_.size(); ++i) {
    if (leaf_of_slot_[i] == leaf) return static_cast<int>(i) + 1;
  }
  throw NotFoundError("node is not a pattern leaf");
}

Pattern match_pattern(const Tree& tree, std::span<const NodeId> assignment) {
  std::vector<NodeId> sorted(assignment.begin(), assignment.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ArgumentError("assignment is not injective");
  }
  std::vector<int> slot_at(tree.num_nodes(), 0);
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= tree.num_nodes() || !tree.is_leaf(assignment[i])) {
      throw NotFoundError("assignment target is not a leaf");
    }
    slot_at[assignment[i]] = static_cast<int>(i) + 1;
  }
  // Same homeomorphic reduction as restrict(), but emitting slot labels.
  TreeBuilder b;
  std::vector<NodeId> image(tree.num_nodes(), kNoNode);
  for (NodeId v : tree.post_order()) {
    if (tree.is_leaf(v)) {
      if (slot_at[v]) image[v] = b.add_leaf(slot_label(slot_at[v]));
      continue;
    }
    std::vector<NodeId> ch;
    for (NodeId c : tree.children(v)) {
      if (image[c] != kNoNode) ch.push_back(image[c]);
    }
    if (ch.size() == 1) {
      image[v] = ch[0];
    } else if (ch.size() > 1) {
      image[v] = b.add_internal(std::move(ch));
    }
  }
  if (image[tree.root()] == kNoNode) throw ArgumentError("empty assignment");
  return Pattern(std::move(b).build(image[tree.root()]));
}

PayoffFunction::PayoffFunction(std::string name, int arity,
                               std::vector<PatternEntry> table,
                               double default_payoff)
    : name_(std::move(name)),
      arity_(arity),
      table_(std::move(table)),
      default_payoff_(default_payoff) {
  check_arity(arity_);
  if (!(default_payoff_ >= 0.0 && default_payoff_ <= 1.0)) {
    throw ArgumentError("default payoff outside [0,1] in '" + name_ + "'");
  }
  for (const auto& e : table_) {
    if (e.pattern.arity() != arity_) {
      throw ArgumentError("pattern " + e.pattern.canonical() + " has arity " +
                          std::to_string(e.pattern.arity()) + ", expected " +
                          std::to_string(arity_));
    }
    if (!(e.payoff >= 0.0 && e.payoff <= 1.0)) {
      throw ArgumentError("payoff outside [0,1] for " + e.pattern.canonical());
    }
    if (!by_code_.emplace(e.pattern.code(), e.payoff).second) {
      throw ArgumentError("duplicate pattern " + e.pattern.canonical() +
                          " in '" + name_ + "'");
    }
    by_canonical_.emplace(e.pattern.canonical(), e.payoff);
  }
}

double PayoffFunction::max_payoff() const {
  double m = default_payoff_;
  for (const auto& e : table_) m = std::max(m, e.payoff);
  return m;
}

double PayoffFunction::payoff(PatternCode code) const {
  auto it = by_code_.find(code);
  return it == by_code_.end() ? default_payoff_ : it->second;
}

double PayoffFunction::payoff(const Pattern& p) const {
  return payoff_by_canonical(p.canonical());
}

double PayoffFunction::payoff_by_canonical(const std::string& canonical) const {
  auto it = by_canonical_.find(canonical);
  return it == by_canonical_.end() ? default_payoff_ : it->second;
}

double PayoffFunction::evaluate(const Tree& tree,
                                std::span<const NodeId> assignment) const {
  if (static_cast<int>(assignment.size()) != arity_) {
    throw ArgumentError("payoff '" + name_ + "' expects " +
                        std::to_string(arity_) + " arguments");
  }
  return payoff(pattern_code(tree, assignment));
}

PayoffFunction PayoffFunction::scaled(double c, std::string name) const {
  if (!(c >= 0.0 && c <= 1.0)) throw ArgumentError("scale outside [0,1]");
  std::vector<PatternEntry> t = table_;
  for (auto& e : t) e.payoff *= c;
  return PayoffFunction(std::move(name), arity_, std::move(t),
                        default_payoff_ * c);
}

double evaluate_payoff(const PayoffFunction& f, const Tree& tree,
                       std::span<const NodeId> assignment) {
  if (static_cast<int>(assignment.size()) != f.arity()) {
    throw ArgumentError("payoff '" + f.name() + "' expects " +
                        std::to_string(f.arity()) + " arguments");
  }
  return f.payoff_by_canonical(match_pattern(tree, assignment).canonical());
}

std::vector<PatternEntry> close_under_swaps(
    const std::vector<PatternEntry>& table) {
  std::map<std::string, double> closed;
  std::vector<std::string> order;
  for (const auto& e : table) {
    std::vector<std::string> variants;
    swap_variants(e.pattern.tree(), e.pattern.tree().root(), variants);
    for (const auto& v : variants) {
      auto [it, inserted] = closed.emplace(v, e.payoff);
      if (inserted) {
        order.push_back(v);
      } else if (it->second != e.payoff) {
        throw ArgumentError("conflicting payoffs for swap variant " + v);
      }
    }
  }
  std::vector<PatternEntry> out;
  out.reserve(order.size());
  for (const auto& v : order) out.push_back({Pattern::parse(v), closed[v]});
  return out;
}

bool is_swap_invariant(const PayoffFunction& f) {
  std::vector<std::string> variants;
  for (const auto& e : f.table()) {
    swap_variants(e.pattern.tree(), e.pattern.tree().root(), variants);
    for (const auto& v : variants) {
      if (f.payoff_by_canonical(v) != e.payoff) return false;
    }
  }
  return true;
}

std::vector<Pattern> enumerate_patterns(int k, int r) {
  if (k < 1 || r < 2) throw ArgumentError("enumerate_patterns needs k>=1, r>=2");
  if (k > 6) {
    throw ResourceError("enumerate_patterns supports k <= 6, got " +
                        std::to_string(k));
  }
  std::vector<Pattern> out;
  std::vector<int> perm(k);
  for (const auto& shape : shapes(k, r)) {
    std::iota(perm.begin(), perm.end(), 1);
    do {
      std::string s;
      int next = 0;
      for (char c : shape) {
        if (c == '*') {
          s += slot_label(perm[next++]);
        } else {
          s += c;
        }
      }
      out.push_back(Pattern::parse(s));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

std::vector<PatternEntry> parse_pattern_table(std::string_view text) {
  std::vector<PatternEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string pat;
    if (!(ls >> pat)) continue;
    double payoff = 0.0;
    std::string extra;
    if (!(ls >> payoff) || (ls >> extra)) {
      throw ArgumentError("pattern table line " + std::to_string(lineno) +
                          ": expected '<pattern> <payoff>'");
    }
    if (!(payoff >= 0.0 && payoff <= 1.0)) {
      throw ArgumentError("pattern table line " + std::to_string(lineno) + ": payoff outside [0,1]");
    }
    out.push_back({Pattern::parse(pat), payoff});
  }
  return out;
}

std::string format_pattern_table(const std::vector<PatternEntry>& table) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& e : table) out << e.pattern.canonical() << ' ' << e.payoff << '\n';
  return out.str();
}

BracketPredicate BracketPredicate::pair_order(int a, int b) {
  if (a == b) throw ArgumentError("pair predicate needs distinct slots");
  return {Kind::kPairOrder, {a, b, 0}, {0, 0, 0}};
}

BracketPredicate BracketPredicate::triple_split(std::array<int, 3> slots,
                                                std::array<int, 3> child) {
  if (slots[0] == slots[1] || slots[0] == slots[2] || slots[1] == slots[2]) {
    throw ArgumentError("triple predicate needs distinct slots");
  }
  if (child[0] == child[1] && child[1] == child[2]) {
    throw ArgumentError("triple predicate cannot place all slots in one child");
  }
  return {Kind::kTripleSplit, slots, child};
}

std::string BracketPredicate::to_string() const {
  auto x = [](int s) { return slot_label(s); };
  if (kind == Kind::kPairOrder) return "[" + x(slots[0]) + "<" + x(slots[1]) + "]";
  int hi = *std::max_element(child.begin(), child.end());
  if (hi == 2) {
    std::string lhs, rhs;
    for (int i = 0; i < 3; ++i) {
      std::string& side = child[i] == 1 ? lhs : rhs;
      if (!side.empty()) side += ",";
      side += x(slots[i]);
    }
    return "[" + lhs + "<" + rhs + "]";
  }
  std::string s = "[";
  for (int i = 0; i < 3; ++i) {
    if (i) s += ",";
    s += x(slots[i]) + "->" + std::to_string(child[i]);
  }
  return s + "]";
}

namespace {

std::array<int, 3> dense_ranks(std::array<int, 3> idx) {
  std::array<int, 3> sorted = idx;
  std::sort(sorted.begin(), sorted.end());
  std::array<int, 3> out{};
  for (int i = 0; i < 3; ++i) {
    int rank = 1;
    for (int j = 0; j < 3; ++j) {
      if (sorted[j] < idx[i] && (j == 0 || sorted[j] != sorted[j - 1])) ++rank;
    }
    out[i] = rank;
  }
  return out;
}

std::array<int, 3> triple_ranks(const Tree& t, NodeId a, NodeId b, NodeId c) {
  NodeId u = t.lca(t.lca(a, b), c);
  return dense_ranks({t.child_index_toward(u, a), t.child_index_toward(u, b),
                      t.child_index_toward(u, c)});
}

}  // namespace

std::vector<BracketPredicate> compile_to_brackets(const Pattern& p) {
  const Tree& t = p.tree();
  int k = p.arity();
  std::vector<BracketPredicate> out;
  for (int i = 1; i <= k; ++i) {
    for (int j = i + 1; j <= k; ++j) {
      for (int l = j + 1; l <= k; ++l) {
        out.push_back(BracketPredicate::triple_split(
            {i, j, l}, triple_ranks(t, p.leaf_of_slot(i), p.leaf_of_slot(j),
                                    p.leaf_of_slot(l))));
      }
    }
  }
  // Consecutive pairs whose LCA holds a third leaf are already ordered by a
  // triple; only two-leaf cherries need an explicit order predicate.
  const auto& leaves = t.leaves();
  for (std::size_t i = 0; i + 1 < leaves.size(); ++i) {
    NodeId u = t.lca(leaves[i], leaves[i + 1]);
    if (t.subtree_leaves(u).size() == 2) {
      out.push_back(BracketPredicate::pair_order(p.slot_of(leaves[i]),
                                                 p.slot_of(leaves[i + 1])));
    }
  }
  return out;
}

bool eval_brackets(std::span<const BracketPredicate> conjunction,
                   const Tree& tree, std::span<const NodeId> assignment) {
  auto leaf_for = [&](int slot) {
    if (slot < 1 || static_cast<std::size_t>(slot) > assignment.size()) {
      throw ArgumentError("predicate slot x" + std::to_string(slot) +
                          " not covered by assignment");
    }
    return assignment[slot - 1];
  };
  for (const auto& pred : conjunction) {
    if (pred.kind == BracketPredicate::Kind::kPairOrder) {
      if (tree.leaf_position(leaf_for(pred.slots[0])) >=
          tree.leaf_position(leaf_for(pred.slots[1]))) {
        return false;
      }
      continue;
    }
    if (triple_ranks(tree, leaf_for(pred.slots[0]), leaf_for(pred.slots[1]),
                     leaf_for(pred.slots[2])) != pred.child) {
      return false;
    }
  }
  return true;
}

}  // namespace phylocsp
