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

#include "phylocsp/tree.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

#include "phylocsp/error.hpp"

namespace phylocsp {

namespace {

bool is_label_char(char c) {
  return !(c == '(' || c == ')' || c == ',' || c == ';' || c == ':' ||
           std::isspace(static_cast<unsigned char>(c)));
}

void append_canonical(const Tree& t, NodeId id, std::string& out) {
  if (t.is_leaf(id)) {
    out += t.label(id);
    return;
  }
  out += '(';
  bool first = true;
  for (NodeId c : t.children(id)) {
    if (!first) out += ',';
    first = false;
    append_canonical(t, c, out);
  }
  out += ')';
}

class NewickParser {
 public:
  explicit NewickParser(std::string_view text) : text_(text) {}

  Tree parse() {
    skip_space();
    NodeId root = parse_node();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ';') {
      ++pos_;
      skip_space();
    }
    if (pos_ != text_.size()) fail("trailing characters");
    return std::move(builder_).build(root);
  }

 private:
  NodeId parse_node() {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      ++pos_;
      std::vector<NodeId> children;
      while (true) {
        children.push_back(parse_node());
        skip_space();
        if (pos_ >= text_.size()) fail("unterminated '('");
        if (text_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        fail(std::string("unexpected '") + text_[pos_] + "'");
      }
      skip_space();
      if (pos_ < text_.size() && is_label_char(text_[pos_])) {
        fail("internal node labels are not supported");
      }
      if (pos_ < text_.size() && text_[pos_] == ':') {
        fail("edge lengths are not supported");
      }
      if (children.size() < 2) fail("internal node with fewer than 2 children");
      return builder_.add_internal(std::move(children));
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_label_char(text_[pos_])) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == ':') {
      fail("edge lengths are not supported");
    }
    return builder_.add_leaf(std::string(text_.substr(start, pos_ - start)));
  }

  void skip_space() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ArgumentError("newick parse error at offset " + std::to_string(pos_) +
                        ": " + msg);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  TreeBuilder builder_;
};

}  // namespace

Tree::Tree(std::vector<Node> nodes, NodeId root)
    : nodes_(std::move(nodes)), root_(root) {
  depth_.assign(nodes_.size(), 0);
  leaf_pos_.assign(nodes_.size(), static_cast<std::size_t>(-1));
  std::vector<NodeId> stack{root_};
  while (!stack.empty()) {
    NodeId id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[id];
    if (n.children.empty()) {
      leaf_pos_[id] = leaves_.size();
      leaves_.push_back(id);
      if (!n.label.empty()) by_label_.emplace(n.label, id);
      continue;
    }
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) {
      depth_[*it] = depth_[id] + 1;
      stack.push_back(*it);
    }
  }
}

std::size_t Tree::leaf_position(NodeId leaf) const {
  std::size_t pos = leaf_pos_.at(leaf);
  if (pos == static_cast<std::size_t>(-1)) {
    throw ArgumentError("node " + std::to_string(leaf) + " is not a leaf");
  }
  return pos;
}

int Tree::height() const {
  int h = 0;
  for (NodeId l : leaves_) h = std::max(h, depth_[l]);
  return h;
}

int Tree::max_arity() const {
  std::size_t a = 0;
  for (const Node& n : nodes_) a = std::max(a, n.children.size());
  return static_cast<int>(a);
}

std::optional<NodeId> Tree::find_leaf(std::string_view label) const {
  auto it = by_label_.find(std::string(label));
  if (it == by_label_.end()) return std::nullopt;
  return it->second;
}

NodeId Tree::leaf(std::string_view label) const {
  auto id = find_leaf(label);
  if (!id) throw NotFoundError("unknown leaf '" + std::string(label) + "'");
  return *id;
}

std::vector<std::string> Tree::leaf_labels() const {
  std::vector<std::string> out;
  out.reserve(leaves_.size());
  for (NodeId l : leaves_) out.push_back(nodes_[l].label);
  return out;
}

NodeId Tree::lca(NodeId a, NodeId b) const {
  if (a >= nodes_.size() || b >= nodes_.size()) {
    throw NotFoundError("node id out of range");
  }
  while (depth_[a] > depth_[b]) a = nodes_[a].parent;
  while (depth_[b] > depth_[a]) b = nodes_[b].parent;
  while (a != b) {
    a = nodes_[a].parent;
    b = nodes_[b].parent;
  }
  return a;
}

NodeId Tree::lca(std::span<const NodeId> nodes) const {
  if (nodes.empty()) throw ArgumentError("lca of an empty set");
  NodeId acc = nodes[0];
  if (acc >= nodes_.size()) throw NotFoundError("node id out of range");
  for (std::size_t i = 1; i < nodes.size(); ++i) acc = lca(acc, nodes[i]);
  return acc;
}

bool Tree::is_ancestor_or_self(NodeId ancestor, NodeId node) const {
  while (depth_.at(node) > depth_.at(ancestor)) node = nodes_[node].parent;
  return node == ancestor;
}

int Tree::child_index_toward(NodeId ancestor, NodeId node) const {
  if (node == ancestor || !is_ancestor_or_self(ancestor, node)) {
    throw ArgumentError("node is not a proper descendant");
  }
  while (nodes_[node].parent != ancestor) node = nodes_[node].parent;
  const auto& ch = nodes_[ancestor].children;
  return static_cast<int>(std::find(ch.begin(), ch.end(), node) - ch.begin());
}

std::vector<NodeId> Tree::subtree_leaves(NodeId id) const {
  std::vector<NodeId> out;
  std::vector<NodeId> stack{id};
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    const auto& ch = nodes_.at(v).children;
    if (ch.empty()) out.push_back(v);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<NodeId> Tree::post_order() const {
  std::vector<NodeId> out;
  out.reserve(nodes_.size());
  std::vector<std::pair<NodeId, std::size_t>> stack{{root_, 0}};
  while (!stack.empty()) {
    auto& [v, next] = stack.back();
    const auto& ch = nodes_[v].children;
    if (next < ch.size()) {
      NodeId c = ch[next++];
      stack.emplace_back(c, 0);
    } else {
      out.push_back(v);
      stack.pop_back();
    }
  }
  return out;
}

std::string Tree::canonical() const { return subtree_canonical(root_); }

std::string Tree::subtree_canonical(NodeId id) const {
  std::string out;
  append_canonical(*this, id, out);
  return out;
}

Tree Tree::parse_newick(std::string_view text) {
  return NewickParser(text).parse();
}

NodeId TreeBuilder::add_leaf(std::string label) {
  for (char c : label) {
    if (!is_label_char(c)) {
      throw ArgumentError("invalid character in leaf label '" + label + "'");
    }
  }
  nodes_.push_back(Tree::Node{kNoNode, {}, std::move(label)});
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId TreeBuilder::add_internal(std::vector<NodeId> children) {
  if (children.size() < 2) {
    throw ArgumentError("internal node needs at least 2 children");
  }
  NodeId id = static_cast<NodeId>(nodes_.size());
  for (NodeId c : children) {
    if (c >= nodes_.size()) throw ArgumentError("unknown child node");
    if (nodes_[c].parent != kNoNode) throw ArgumentError("node has two parents");
    nodes_[c].parent = id;
  }
  nodes_.push_back(Tree::Node{kNoNode, std::move(children), {}});
  return id;
}

Tree TreeBuilder::build(NodeId root) && {
  if (root >= nodes_.size()) throw ArgumentError("unknown root node");
  if (nodes_[root].parent != kNoNode) throw ArgumentError("root has a parent");
  // Renumber in pre-order so node ids are dense and reproducible.
  std::vector<Tree::Node> out;
  std::vector<std::pair<NodeId, NodeId>> stack{{root, kNoNode}};
  std::unordered_set<std::string> seen;
  while (!stack.empty()) {
    auto [old_id, new_parent] = stack.back();
    stack.pop_back();
    NodeId new_id = static_cast<NodeId>(out.size());
    Tree::Node& src = nodes_[old_id];
    out.push_back(Tree::Node{new_parent, {}, std::move(src.label)});
    if (new_parent != kNoNode) out[new_parent].children.push_back(new_id);
    if (src.children.empty() && !out.back().label.empty() &&
        !seen.insert(out.back().label).second) {
      throw ArgumentError("duplicate leaf label '" + out.back().label + "'");
    }
    for (auto it = src.children.rbegin(); it != src.children.rend(); ++it) {
      stack.emplace_back(*it, new_id);
    }
  }
  return Tree(std::move(out), 0);
}

NodeId lca(const Tree& tree, std::span<const std::string> labels) {
  if (labels.empty()) throw ArgumentError("lca of an empty set");
  std::vector<NodeId> ids;
  ids.reserve(labels.size());
  for (const auto& l : labels) ids.push_back(tree.leaf(l));
  return tree.lca(ids);
}

Tree restrict(const Tree& tree, std::span<const NodeId> keep) {
  if (keep.empty()) throw ArgumentError("restrict to an empty leaf set");
  std::vector<char> kept(tree.num_nodes(), 0);
  for (NodeId l : keep) {
    if (l >= tree.num_nodes() || !tree.is_leaf(l)) {
      throw NotFoundError("restrict: node " + std::to_string(l) +
                          " is not a leaf of the tree");
    }
    kept[l] = 1;
  }
  TreeBuilder b;
  std::vector<NodeId> image(tree.num_nodes(), kNoNode);
  for (NodeId v : tree.post_order()) {
    if (tree.is_leaf(v)) {
      if (kept[v]) image[v] = b.add_leaf(tree.label(v));
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
  return std::move(b).build(image[tree.root()]);
}

Tree restrict(const Tree& tree, std::span<const std::string> keep) {
  std::vector<NodeId> ids;
  ids.reserve(keep.size());
  for (const auto& l : keep) ids.push_back(tree.leaf(l));
  return restrict(tree, ids);
}

Tree build_caterpillar(int n, Side side) {
  if (n < 1) throw ArgumentError("caterpillar needs n >= 1");
  TreeBuilder b;
  if (side == Side::kLeft) {
    NodeId acc = b.add_leaf("1");
    for (int i = 2; i <= n; ++i) {
      acc = b.add_internal({acc, b.add_leaf(std::to_string(i))});
    }
    return std::move(b).build(acc);
  }
  NodeId acc = b.add_leaf(std::to_string(n));
  for (int i = n - 1; i >= 1; --i) {
    NodeId leaf = b.add_leaf(std::to_string(i));
    acc = b.add_internal({leaf, acc});
  }
  return std::move(b).build(acc);
}

Tree build_perfect(int k, int d) {
  if (k < 2 || d < 0) throw ArgumentError("perfect tree needs k >= 2, d >= 0");
  double leaves = 1;
  for (int i = 0; i < d; ++i) leaves *= k;
  if (leaves > 1e7) throw ResourceError("perfect tree above 10^7 leaves");
  TreeBuilder b;
  std::vector<NodeId> level;
  for (long i = 1; i <= static_cast<long>(leaves); ++i) {
    level.push_back(b.add_leaf(std::to_string(i)));
  }
  while (level.size() > 1) {
    std::vector<NodeId> up;
    for (std::size_t i = 0; i < level.size(); i += k) {
      up.push_back(b.add_internal(
          std::vector<NodeId>(level.begin() + i, level.begin() + i + k)));
    }
    level = std::move(up);
  }
  return std::move(b).build(level[0]);
}

}  // namespace phylocsp
