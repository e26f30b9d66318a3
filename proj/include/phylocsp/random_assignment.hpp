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

#ifndef PHYLOCSP_RANDOM_ASSIGNMENT_HPP_
#define PHYLOCSP_RANDOM_ASSIGNMENT_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phylocsp/instance.hpp"
#include "phylocsp/pattern.hpp"
#include "phylocsp/tree.hpp"

namespace phylocsp {

using Rng = std::mt19937_64;

// Skeleton tree plus a distribution over its leaves (in leaf order).
struct BiasedMeasure {
  Tree skeleton;
  std::vector<double> leaf_probs;
};

// Throws ArgumentError unless the skeleton is full binary and the
// probabilities are nonnegative and sum to 1 within 1e-12.
void validate_measure(const BiasedMeasure& m);
// Single-leaf skeleton: plain recursive fair splitting.
BiasedMeasure uniform_measure();
// Caterpillar of `depth` internal nodes. For Side::kLeft every variable
// leaves toward the right leaf with probability delta at each level, so the
// leaf hanging at depth j has mass delta(1-delta)^(j-1); the bottom leaf takes
// the remaining (1-delta)^depth. Side::kRight is the mirror image.
BiasedMeasure biased_caterpillar(double delta, int depth, Side side = Side::kLeft);
// Perfect binary skeleton with one left-branch probability per internal
// node, listed in pre-order.
BiasedMeasure measure_from_splits(int depth, std::span<const double> left_probs);

// Random full binary tree over `labels`: each label drops to a skeleton leaf
// by the measure, then every skeleton leaf is resolved by fair splits.
Tree sample_tree(const BiasedMeasure& m, std::span<const std::string> labels,
                 Rng& rng);
Solution sample_solution(const BiasedMeasure& m, const Instance& inst, Rng& rng);

// Exact probability of each ordered binary pattern on k items under
// recursive fair splitting.
std::vector<std::pair<Pattern, double>> uniform_split_pattern_dist(int k);
// Probability that k items dropped at the skeleton root form `p`.
double pattern_probability(const BiasedMeasure& m, const Pattern& p);
double alpha_exact(const BiasedMeasure& m, const PayoffFunction& f);

struct McEstimate {
  double mean = 0.0;
  double half_width = 0.0;  // 95% normal interval
  std::uint64_t trials = 0;
};

// Trials run in fixed-size chunks, each seeded from (seed, chunk index), so
// the result does not depend on the thread count.
McEstimate alpha_mc(const BiasedMeasure& m, const PayoffFunction& f,
                    std::uint64_t trials, std::uint64_t seed);
// Mean value of sampled solutions on a whole instance.
McEstimate instance_mc(const BiasedMeasure& m, const Instance& inst,
                       std::uint64_t trials, std::uint64_t seed);

struct SearchOptions {
  int depth_cap = 4;             // perfect skeleton depth for the grid family
  int grid_steps = 20;           // grid resolution 1/grid_steps
  int refine_rounds = 5;         // step halvings after the grid sweep
  int caterpillar_depth_cap = 4096;
  bool include_caterpillars = true;
};

struct ThresholdReport {
  std::vector<std::string> payoffs;
  std::vector<double> mu;
  double alpha = 0.0;
  BiasedMeasure best;
  std::string family;  // "uniform", "grid", "caterpillar-left", ...
  double caterpillar_delta = 0.0;
  SearchOptions options;
  std::uint64_t evaluations = 0;
};

ThresholdReport alpha_opt_search(const PayoffFunction& f,
                                 const SearchOptions& opts = {});
// sup over the searched measures of sum_i mu_i * alpha(measure, f_i).
ThresholdReport mixture_threshold(std::span<const PayoffFunction* const> fs,
                                  std::span<const double> mu,
                                  const SearchOptions& opts = {});

}  // namespace phylocsp

#endif  // PHYLOCSP_RANDOM_ASSIGNMENT_HPP_
