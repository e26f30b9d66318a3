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

#ifndef PHYLOCSP_INSTANCE_HPP_
#define PHYLOCSP_INSTANCE_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "phylocsp/pattern.hpp"
#include "phylocsp/tree.hpp"

namespace phylocsp {

using Rational = boost::multiprecision::cpp_rational;

// Accepts "p/q", integers and finite decimals ("0.125", "1e-3"); decimals
// are converted exactly.
Rational parse_rational(std::string_view text);
std::string format_rational(const Rational& r);

class PayoffRegistry;

struct Constraint {
  std::shared_ptr<const PayoffFunction> payoff;
  std::vector<int> vars;  // indices into Instance::variables()
  Rational weight;
  double w = 0.0;  // weight as double
  std::uint64_t units = 0;  // weight * Instance::unit_denominator()
};

// Weighted constraints over named variables; weights are normalized to sum
// to exactly 1 on construction.
class Instance {
 public:
  Instance() = default;
  Instance(std::vector<std::string> variables,
           std::vector<Constraint> constraints);

  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  int num_vars() const { return static_cast<int>(variables_.size()); }
  int var_index(std::string_view name) const;
  // Common denominator of all weights, or 0 when it exceeds 2^62.
  std::uint64_t unit_denominator() const { return unit_den_; }

 private:
  std::vector<std::string> variables_;
  std::vector<Constraint> constraints_;
  std::map<std::string, int, std::less<>> index_;
  std::uint64_t unit_den_ = 0;
};

// A full binary tree whose leaves are in bijection with the variables.
struct Solution {
  Tree tree;
  std::vector<NodeId> leaf_of;  // variable index -> leaf
};

// Solution from a tree whose leaf labels are the variable names.
Solution solution_from_tree(Tree tree, const Instance& inst);
void validate_solution(const Solution& sol, int num_vars);
// Variables in left-to-right leaf order.
std::vector<int> solution_order(const Solution& sol);

// Constraints scoring exactly 1 are summed in integer units, so a solution
// satisfying everything has value exactly 1.0.
double value(const Solution& sol, const Instance& inst);

struct OptResult {
  double value = 0.0;
  Solution solution;
  std::uint64_t visited = 0;  // search nodes expanded
};

inline constexpr int kDefaultBruteForceCap = 10;
inline constexpr int kDefaultOrderCap = 13;

// Exact optimum over all ordered full binary trees on the variables. Ties go
// to the first tree in canonical order: the root split by left-part size,
// then left subset in lexicographic order, then left subtree, then right.
OptResult brute_force_opt(const Instance& inst, int cap = kDefaultBruteForceCap);
// Exact optimum over trees whose leaf order is `order` (variable indices).
OptResult opt_given_order(const Instance& inst, std::span<const int> order,
                          int cap = kDefaultOrderCap);

struct GaifmanGraph {
  int num_vertices = 0;
  std::map<std::pair<int, int>, double> weights;  // keyed with first < second

  double weight(int a, int b) const;
  double total_weight() const;
  std::vector<double> weighted_degrees() const;
};

GaifmanGraph gaifman(const Instance& inst);
// Total weight of constraints containing each variable.
std::vector<double> incident_weights(const Instance& inst);
bool is_regular(const Instance& inst);

// Text format:
//   vars a b c d
//   <weight> <payoff-name> v1 ... vk
// Weights must sum to 1 within 1e-9.
Instance parse_instance(std::string_view text, const PayoffRegistry& registry);
std::string format_instance(const Instance& inst);

// n variables v1..vn and m constraints of payoff f on uniformly random
// distinct variables, each of weight 1/m.
Instance random_instance(std::shared_ptr<const PayoffFunction> f, int n, int m,
                         std::uint64_t seed);

}  // namespace phylocsp

#endif  // PHYLOCSP_INSTANCE_HPP_
