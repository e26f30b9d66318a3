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

#include "phylocsp/phylo_problems.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "phylocsp/error.hpp"
#include "phylocsp/registry.hpp"

namespace phylocsp {

namespace {

std::vector<PatternEntry> entries(std::initializer_list<std::pair<const char*, double>> rows) {
  std::vector<PatternEntry> out;
  for (const auto& [p, v] : rows) out.push_back({Pattern::parse(p), v});
  return out;
}

std::string caterpillar_text(const std::vector<int>& slots, Side side) {
  std::string s = slot_label(slots[0]);
  if (side == Side::kLeft) {
    for (std::size_t i = 1; i < slots.size(); ++i) {
      s = "(" + s + "," + slot_label(slots[i]) + ")";
    }
    return s;
  }
  s = slot_label(slots.back());
  for (std::size_t i = slots.size() - 1; i-- > 0;) {
    s = "(" + slot_label(slots[i]) + "," + s + ")";
  }
  return s;
}

PayoffFunction caterpillar_payoff(int k, Side side, std::string name) {
  if (k < 1 || k > 6) throw ArgumentError(name + ": arity must be in 1..6");
  std::vector<int> slots(k);
  std::iota(slots.begin(), slots.end(), 1);
  std::vector<PatternEntry> table;
  do {
    table.push_back({Pattern::parse(caterpillar_text(slots, side)), 1.0});
  } while (std::next_permutation(slots.begin(), slots.end()));
  return PayoffFunction(std::move(name), k, std::move(table));
}

bool is_cherry(const Tree& t, NodeId x, NodeId y) {
  NodeId p = t.parent(x);
  return p != kNoNode && p == t.parent(y) && t.subtree_leaves(p).size() == 2;
}

bool quartet_rule(const Tree& r, NodeId a, NodeId b, NodeId c, NodeId d) {
  if (is_cherry(r, a, b) || is_cherry(r, c, d)) return true;
  const auto& ch = r.children(r.root());
  if (ch.size() != 2) return false;
  auto side = [&](NodeId x) { return r.child_index_toward(r.root(), x); };
  return side(a) == side(b) && side(c) == side(d) && side(a) != side(c);
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

PayoffFunction triplet_payoff() {
  return PayoffFunction("triplet", 3,
                        entries({{"((x1,x2),x3)", 1.0},
                                 {"((x2,x1),x3)", 1.0},
                                 {"(x3,(x1,x2))", 1.0},
                                 {"(x3,(x2,x1))", 1.0}}));
}

PayoffFunction fstar_payoff(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ArgumentError("fstar: delta must lie in (0,1)");
  }
  std::string name = "fstar-" + [&] {
    std::ostringstream s;
    s << delta;
    return s.str();
  }();
  return PayoffFunction(name, 3,
                        entries({{"((x1,x2),x3)", 1.0},
                                 {"((x2,x1),x3)", 1.0 - delta},
                                 {"(x3,(x1,x2))", 1.0 - delta},
                                 {"(x3,(x2,x1))", 1.0 - delta}}));
}

PayoffFunction quartet_payoff() {
  std::vector<PatternEntry> table;
  for (auto& p : enumerate_patterns(4, 2)) {
    const Tree& t = p.tree();
    if (quartet_rule(t, p.leaf_of_slot(1), p.leaf_of_slot(2), p.leaf_of_slot(3),
                     p.leaf_of_slot(4))) {
      table.push_back({std::move(p), 1.0});
    }
  }
  return PayoffFunction("quartet", 4, std::move(table));
}

PayoffFunction split_right_payoff(int k) {
  return caterpillar_payoff(k, Side::kLeft, "split-right-" + std::to_string(k));
}

PayoffFunction split_left_payoff(int k) {
  return caterpillar_payoff(k, Side::kRight, "split-left-" + std::to_string(k));
}

PayoffFunction constant_payoff(int k, double c) {
  std::ostringstream name;
  name << "const-" << k << "-" << c;
  return PayoffFunction(name.str(), k, {}, c);
}

bool triplet_satisfied(const Tree& tree, const TripletConstraint& t) {
  NodeId a = tree.leaf(t.a), b = tree.leaf(t.b), c = tree.leaf(t.c);
  if (a == b || a == c || b == c) throw ArgumentError("triplet needs distinct leaves");
  NodeId ab = tree.lca(a, b);
  return ab != tree.lca(ab, c);
}

bool quartet_satisfied(const Tree& tree, const QuartetConstraint& q) {
  std::vector<NodeId> ids;
  for (const auto* l : {&q.a, &q.b, &q.c, &q.d}) {
    auto id = tree.find_leaf(*l);
    if (!id) throw ArgumentError("quartet leaf '" + *l + "' not in tree");
    ids.push_back(*id);
  }
  Tree r = restrict(tree, ids);
  if (r.num_leaves() != 4) throw ArgumentError("quartet needs distinct leaves");
  return quartet_rule(r, r.leaf(q.a), r.leaf(q.b), r.leaf(q.c), r.leaf(q.d));
}

std::vector<TripletConstraint> induced_triplets(const Tree& tree) {
  std::vector<TripletConstraint> out;
  const auto& L = tree.leaves();
  for (std::size_t i = 0; i < L.size(); ++i) {
    for (std::size_t j = i + 1; j < L.size(); ++j) {
      for (std::size_t l = j + 1; l < L.size(); ++l) {
        int dij = tree.depth(tree.lca(L[i], L[j]));
        int dil = tree.depth(tree.lca(L[i], L[l]));
        int djl = tree.depth(tree.lca(L[j], L[l]));
        const auto &a = tree.label(L[i]), &b = tree.label(L[j]), &c = tree.label(L[l]);
        if (dij > dil) {
          out.push_back({a, b, c});
        } else if (dil > dij) {
          out.push_back({a, c, b});
        } else if (djl > dij) {
          out.push_back({b, c, a});
        }
      }
    }
  }
  return out;
}

std::optional<Tree> aho_build(std::span<const TripletConstraint> triplets,
                              std::span<const std::string> labels) {
  if (labels.empty()) throw ArgumentError("aho_build needs at least one label");
  std::map<std::string, int> id;
  for (const auto& l : labels) {
    if (!id.emplace(l, static_cast<int>(id.size())).second) {
      throw ArgumentError("duplicate label '" + l + "'");
    }
  }
  std::vector<std::array<int, 3>> trip;
  for (const auto& t : triplets) {
    std::array<int, 3> ids{};
    int i = 0;
    for (const auto* l : {&t.a, &t.b, &t.c}) {
      auto it = id.find(*l);
      if (it == id.end()) throw ArgumentError("triplet label '" + *l + "' not in label set");
      ids[i++] = it->second;
    }
    if (ids[0] == ids[1] || ids[0] == ids[2] || ids[1] == ids[2]) {
      throw ArgumentError("triplet needs distinct labels");
    }
    trip.push_back(ids);
  }
  std::vector<std::string> name(id.size());
  for (const auto& [l, i] : id) name[i] = l;

  TreeBuilder b;
  bool ok = true;
  auto build = [&](auto& self, const std::vector<int>& set) -> NodeId {
    if (set.size() == 1) return b.add_leaf(name[set[0]]);
    std::vector<int> local(id.size(), -1);
    for (std::size_t i = 0; i < set.size(); ++i) local[set[i]] = static_cast<int>(i);
    UnionFind uf(static_cast<int>(set.size()));
    for (const auto& t : trip) {
      if (local[t[0]] >= 0 && local[t[1]] >= 0 && local[t[2]] >= 0) {
        uf.unite(local[t[0]], local[t[1]]);
      }
    }
    std::map<int, std::vector<int>> comps;
    for (std::size_t i = 0; i < set.size(); ++i) {
      comps[uf.find(static_cast<int>(i))].push_back(set[i]);
    }
    if (comps.size() == 1) {
      ok = false;
      return kNoNode;
    }
    std::vector<std::vector<int>> parts;
    for (auto& [root, members] : comps) parts.push_back(std::move(members));
    auto smallest = [&](const std::vector<int>& p) {
      return *std::min_element(p.begin(), p.end(), [&](int x, int y) {
        return name[x] < name[y];
      });
    };
    std::sort(parts.begin(), parts.end(), [&](const auto& x, const auto& y) {
      return name[smallest(x)] < name[smallest(y)];
    });
    NodeId acc = kNoNode;
    for (const auto& p : parts) {
      NodeId sub = self(self, p);
      if (!ok) return kNoNode;
      acc = acc == kNoNode ? sub : b.add_internal({acc, sub});
    }
    return acc;
  };
  std::vector<int> all(id.size());
  std::iota(all.begin(), all.end(), 0);
  NodeId root = build(build, all);
  if (!ok) return std::nullopt;
  return std::move(b).build(root);
}

Solution caterpillar_embed(const Instance& inst, std::span<const int> order) {
  if (static_cast<int>(order.size()) != inst.num_vars()) {
    throw ArgumentError("caterpillar_embed: order must list every variable");
  }
  TreeBuilder b;
  NodeId acc = kNoNode;
  for (int v : order) {
    if (v < 0 || v >= inst.num_vars()) throw ArgumentError("variable index out of range");
    NodeId leaf = b.add_leaf(inst.variables()[v]);
    acc = acc == kNoNode ? leaf : b.add_internal({acc, leaf});
  }
  if (acc == kNoNode) throw ArgumentError("caterpillar_embed: no variables");
  return solution_from_tree(std::move(b).build(acc), inst);
}

QuartetReduction triplets_to_quartets(const Instance& inst) {
  std::string gamma = "gamma";
  std::set<std::string> taken(inst.variables().begin(), inst.variables().end());
  for (int i = 1; taken.count(gamma); ++i) gamma = "gamma_" + std::to_string(i);
  auto quartet = make_builtin_payoff("quartet");
  std::vector<std::string> vars = inst.variables();
  vars.push_back(gamma);
  const int g = static_cast<int>(vars.size()) - 1;
  std::vector<Constraint> cons;
  for (const auto& c : inst.constraints()) {
    if (c.payoff->name() != "triplet") {
      throw ArgumentError("triplets_to_quartets: constraint with payoff '" +
                          c.payoff->name() + "' is not a triplet");
    }
    Constraint q;
    q.payoff = quartet;
    q.vars = {c.vars[0], c.vars[1], c.vars[2], g};
    q.weight = c.weight;
    cons.push_back(std::move(q));
  }
  return {Instance(std::move(vars), std::move(cons)), gamma};
}

Tree attach_root_leaf(const Tree& rooted, const std::string& gamma) {
  if (rooted.find_leaf(gamma)) throw ArgumentError("label '" + gamma + "' already present");
  TreeBuilder b;
  std::vector<NodeId> image(rooted.num_nodes(), kNoNode);
  for (NodeId v : rooted.post_order()) {
    if (rooted.is_leaf(v)) {
      image[v] = b.add_leaf(rooted.label(v));
    } else {
      std::vector<NodeId> ch;
      for (NodeId c : rooted.children(v)) ch.push_back(image[c]);
      image[v] = b.add_internal(std::move(ch));
    }
  }
  NodeId g = b.add_leaf(gamma);
  NodeId root = b.add_internal({image[rooted.root()], g});
  return std::move(b).build(root);
}

Tree root_at_leaf(const Tree& surrogate, const std::string& gamma) {
  NodeId g = surrogate.leaf(gamma);
  if (surrogate.num_leaves() < 3) {
    throw ArgumentError("root_at_leaf needs at least 3 leaves");
  }
  // Undirected adjacency with a binary root suppressed.
  std::vector<std::vector<NodeId>> adj(surrogate.num_nodes());
  NodeId r = surrogate.root();
  const auto& rc = surrogate.children(r);
  for (NodeId v = 0; v < surrogate.num_nodes(); ++v) {
    NodeId p = surrogate.parent(v);
    if (p == kNoNode || (p == r && rc.size() == 2)) continue;
    adj[p].push_back(v);
    adj[v].push_back(p);
  }
  if (rc.size() == 2) {
    adj[rc[0]].push_back(rc[1]);
    adj[rc[1]].push_back(rc[0]);
  }
  NodeId top = adj[g].at(0);
  TreeBuilder b;
  auto build = [&](auto& self, NodeId v, NodeId from) -> NodeId {
    std::vector<NodeId> ch;
    for (NodeId u : adj[v]) {
      if (u != from && u != g) ch.push_back(self(self, u, v));
    }
    if (ch.empty()) return b.add_leaf(surrogate.label(v));
    if (ch.size() == 1) return ch[0];
    return b.add_internal(std::move(ch));
  };
  NodeId root = build(build, top, g);
  return std::move(b).build(root);
}

}  // namespace phylocsp
