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

#ifndef PHYLOCSP_TREE_HPP_
#define PHYLOCSP_TREE_HPP_

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace phylocsp {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

enum class Side { kLeft, kRight };

// Rooted ordered tree with optionally labeled leaves. Immutable once built;
// node ids are indices and have no meaning across trees.
class Tree {
 public:
  struct Node {
    NodeId parent = kNoNode;
    std::vector<NodeId> children;
    std::string label;  // empty for internal nodes and unlabeled leaves
  };

  Tree() = default;  // empty tree, no nodes

  NodeId root() const { return root_; }
  std::size_t num_nodes() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  NodeId parent(NodeId id) const { return nodes_.at(id).parent; }
  const std::vector<NodeId>& children(NodeId id) const {
    return nodes_.at(id).children;
  }
  bool is_leaf(NodeId id) const { return nodes_.at(id).children.empty(); }
  const std::string& label(NodeId id) const { return nodes_.at(id).label; }

  // Leaves in left-to-right planar order.
  const std::vector<NodeId>& leaves() const { return leaves_; }
  std::size_t num_leaves() const { return leaves_.size(); }
  // Index of a leaf in leaves().
  std::size_t leaf_position(NodeId leaf) const;
  int depth(NodeId id) const { return depth_.at(id); }
  int height() const;
  int max_arity() const;
  bool is_full_binary() const { return max_arity() <= 2; }

  std::optional<NodeId> find_leaf(std::string_view label) const;
  // Throws NotFoundError for unknown labels.
  NodeId leaf(std::string_view label) const;
  std::vector<std::string> leaf_labels() const;

  NodeId lca(NodeId a, NodeId b) const;
  // Throws ArgumentError on an empty span.
  NodeId lca(std::span<const NodeId> nodes) const;
  bool is_ancestor_or_self(NodeId ancestor, NodeId node) const;
  // Index (0-based) of the child of `ancestor` whose subtree holds `node`.
  int child_index_toward(NodeId ancestor, NodeId node) const;
  // Leaves of the subtree rooted at `id`, left to right.
  std::vector<NodeId> subtree_leaves(NodeId id) const;
  // Post-order traversal, children left to right.
  std::vector<NodeId> post_order() const;

  // Canonical serialization without the trailing ';'.
  std::string canonical() const;
  std::string subtree_canonical(NodeId id) const;
  std::string to_newick() const { return canonical() + ";"; }
  static Tree parse_newick(std::string_view text);

  friend bool operator==(const Tree& a, const Tree& b) {
    return a.canonical() == b.canonical();
  }

 private:
  friend class TreeBuilder;
  Tree(std::vector<Node> nodes, NodeId root);

  std::vector<Node> nodes_;
  NodeId root_ = kNoNode;
  std::vector<NodeId> leaves_;
  std::vector<std::size_t> leaf_pos_;
  std::vector<int> depth_;
  std::unordered_map<std::string, NodeId> by_label_;
};

// Bottom-up construction. Nodes not reachable from the chosen root are
// dropped by build().
class TreeBuilder {
 public:
  NodeId add_leaf(std::string label = {});
  NodeId add_internal(std::vector<NodeId> children);
  std::size_t size() const { return nodes_.size(); }
  // Validates arity >= 2 for internal nodes and distinct leaf labels.
  Tree build(NodeId root) &&;

 private:
  std::vector<Tree::Node> nodes_;
};

NodeId lca(const Tree& tree, std::span<const std::string> labels);

// Homeomorphic reduction to the kept leaves; child order is preserved.
Tree restrict(const Tree& tree, std::span<const NodeId> keep);
Tree restrict(const Tree& tree, std::span<const std::string> keep);

// Leaves labeled "1".."n" left to right. A left caterpillar has a leaf as the
// right child of every internal node.
Tree build_caterpillar(int n, Side side);
// Leaves labeled "1".."k^d" left to right.
Tree build_perfect(int k, int d);

}  // namespace phylocsp

#endif  // PHYLOCSP_TREE_HPP_
