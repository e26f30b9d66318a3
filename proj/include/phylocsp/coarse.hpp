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

#ifndef PHYLOCSP_COARSE_HPP_
#define PHYLOCSP_COARSE_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phylocsp/instance.hpp"
#include "phylocsp/tree.hpp"

namespace phylocsp {

// Many-to-one colored embedding of the variables into a small tree.
struct CoarseSolution {
  Tree small_tree;
  std::vector<NodeId> leaf_of;  // variable index -> small-tree leaf
  std::vector<int> color;       // small-tree node -> color, -1 on internal nodes

  int color_of_var(int v) const { return color.at(leaf_of.at(v)); }
};

// Checks: at most q leaves; every color covers at most eps*|V| variables;
// for r == 2 the variables on one leaf are consecutive in pi, for r > 2 each
// color class is a union of at most 2r runs of pi.
bool is_in_class(const CoarseSolution& xi, double eps, int q,
                 std::span<const int> pi, int r = 2);

struct ValPm {
  double minus = 0.0;
  double plus = 0.0;
};

ValPm val_pm(const CoarseSolution& xi, const Instance& inst);

struct CoarsenResult {
  CoarseSolution xi;
  std::vector<NodeId> processed;  // nodes of the input tree, in processing order
  int labels_created = 0;
  int labels_used = 0;
  int colors = 0;
  std::vector<std::string> label_of_var;
};

CoarsenResult coarsen(const Solution& phi, double eps);

double mc_weight(const CoarseSolution& xi, const GaifmanGraph& h);
// Same with an explicit color per variable.
double mc_weight(std::span<const int> var_colors, const GaifmanGraph& h);

struct MonochromeOptions {
  double eps = 0.5;
  int q = 4;
  int num_orders = 100;
  std::uint64_t seed = 0;
  double m_star_constant = 1.0;
  int threads = 0;  // 0: hardware concurrency
};

struct MonochromeReport {
  std::vector<double> per_order_max;
  double mean = 0.0;
  double weight = 0.0;        // weight(E)
  double bound = 0.0;         // 3 * eps * weight(E)
  std::uint64_t m_star = 0;
  bool bound_applies = false;  // |V| >= m_star
  bool bound_holds = false;    // mean <= bound
  bool exact = false;          // inner maximization exhaustive
  bool regular = false;
  std::uint64_t pointwise_checks = 0;
  std::uint64_t pointwise_violations = 0;
};

std::uint64_t m_star(int q, double eps, double c);

// Maximum monochromatic weight over colorings of positions 0..m-1 with at
// most q runs and color classes of size at most eps*m. `w` is the symmetric
// edge-weight matrix in position order. Exact for q <= 5.
std::pair<double, std::vector<int>> max_monochrome(const std::vector<std::vector<double>>& w,
                                                   double eps, int q, bool* exact = nullptr);

MonochromeReport monochrome_experiment(const Instance& inst, const MonochromeOptions& opt);

struct FixedColoringReport {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;
  double stderr_ = 0.0;
  double weight = 0.0;
  double eps = 0.0;  // largest color class over |V|
};

// mc of position coloring `chi` composed with uniformly random orders.
FixedColoringReport fixed_coloring_experiment(const Instance& inst, std::span<const int> chi,
                                              int num_orders, std::uint64_t seed);

}  // namespace phylocsp

#endif  // PHYLOCSP_COARSE_HPP_
