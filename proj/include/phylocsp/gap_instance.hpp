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

#ifndef PHYLOCSP_GAP_INSTANCE_HPP_
#define PHYLOCSP_GAP_INSTANCE_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "phylocsp/instance.hpp"
#include "phylocsp/pattern.hpp"
#include "phylocsp/tree.hpp"

namespace phylocsp {

inline constexpr int kGapLeafCap = 81;
inline constexpr std::uint64_t kGapConstraintCap = 1000000;

// Constraint template on the leaves of the perfect k-ary tree of depth d,
// where k is the payoff arity. Variables are named "1".."k^d".
struct GapSpec {
  std::shared_ptr<const PayoffFunction> payoff;
  int d = 1;

  int k() const { return payoff->arity(); }
  int num_leaves() const;
};

Tree gap_base_tree(const GapSpec& spec);

// True iff leaf i lies under the i-th child (1-based) of the LCA of all.
bool cousins(const Tree& tree, std::span<const NodeId> leaves);

// Probability that the level-sampling map sends slot j to leaf `leaves[j]`
// (1-based leaf numbers) for every j.
Rational lkm_weight(std::span<const int> leaves, const GapSpec& spec);
// Number of positive-weight tuples, without generating them.
std::uint64_t gap_constraint_count(int k, int d);

Instance build_gap(const GapSpec& spec);

// Replaces every internal node of the base tree and its children by a copy
// of a payoff-1 pattern, hanging child i at the pattern leaf x_i.
Solution satisfying_solution(const GapSpec& spec);

struct OrderExperiment {
  std::vector<double> values;
  double mean = 0.0;
  double stderr_ = 0.0;
  bool exhaustive = false;
};

// Statistics of opt_given_order over uniformly random leaf orders, or over
// all orders when `exhaustive` is set (m <= 8).
OrderExperiment order_experiment(const GapSpec& spec, int num_orders,
                                 std::uint64_t seed, bool exhaustive = false);

// E over a uniform level t and uniform node u at level t of
// (1/k) sum_{children y} sum_i |mu_i(T_y) - mu_i(T_u)|, where mu_i is the
// fraction of leaves in a subtree carrying label i. `labels` lists the label
// of each leaf of the perfect k-ary tree of depth d, left to right.
double child_label_divergence(int k, int d, std::span<const int> labels, int q);
double divergence_bound(int q, int d);

struct NamedLabeling {
  std::string name;
  std::vector<int> labels;
};

// Structured labelings meant to make the divergence large: by top-level
// subtree, by leaf index, and by the child index at the middle level.
std::vector<NamedLabeling> adversarial_labelings(int k, int d, int q);

}  // namespace phylocsp

#endif  // PHYLOCSP_GAP_INSTANCE_HPP_
