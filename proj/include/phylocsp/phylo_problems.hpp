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

#ifndef PHYLOCSP_PHYLO_PROBLEMS_HPP_
#define PHYLOCSP_PHYLO_PROBLEMS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phylocsp/instance.hpp"
#include "phylocsp/pattern.hpp"
#include "phylocsp/tree.hpp"

namespace phylocsp {

// triplet(u,v,w) = 1 iff lca(u,w) = lca(v,w), i.e. uv|w.
PayoffFunction triplet_payoff();
// 1 on ((x1,x2),x3), 1-delta on the other three patterns where uv|w holds.
PayoffFunction fstar_payoff(double delta);
// Unrooted ab|cd read off a rooted surrogate; 120-entry ordered table.
PayoffFunction quartet_payoff();
// 1 on every labeling of the left caterpillar: each split sends exactly one
// variable to the right.
PayoffFunction split_right_payoff(int k);
// Mirror image: each split sends exactly one variable to the left.
PayoffFunction split_left_payoff(int k);
PayoffFunction constant_payoff(int k, double c);

struct TripletConstraint {
  std::string a, b, c;  // ab|c
};

struct QuartetConstraint {
  std::string a, b, c, d;  // ab|cd
};

bool triplet_satisfied(const Tree& tree, const TripletConstraint& t);
// `tree` is a rooted surrogate of an unrooted tree: its root is a
// subdivision point. Holds iff the restriction to {a,b,c,d} has {a,b} or
// {c,d} as siblings, or its root separates {a,b} from {c,d}.
bool quartet_satisfied(const Tree& tree, const QuartetConstraint& q);

// Every resolved triplet of `tree`, one per resolved 3-set of leaves.
std::vector<TripletConstraint> induced_triplets(const Tree& tree);

// Returns nullopt when the triplets are inconsistent. Components are ordered
// by their smallest label and joined as a left caterpillar when there are
// more than two.
std::optional<Tree> aho_build(std::span<const TripletConstraint> triplets,
                              std::span<const std::string> labels);

// Left caterpillar with `order[i]` (a variable index) on leaf i+1.
Solution caterpillar_embed(const Instance& inst, std::span<const int> order);

struct QuartetReduction {
  Instance instance;
  std::string gamma;
};

// Each triplet constraint ab|c becomes the quartet ab|c gamma, same weight.
QuartetReduction triplets_to_quartets(const Instance& triplet_instance);
// Surrogate with a new root whose children are the old root and `gamma`.
Tree attach_root_leaf(const Tree& rooted, const std::string& gamma);
// Unroots the surrogate and re-roots it at the neighbor of leaf `gamma`,
// which is then removed.
Tree root_at_leaf(const Tree& surrogate, const std::string& gamma);

}  // namespace phylocsp

#endif  // PHYLOCSP_PHYLO_PROBLEMS_HPP_
