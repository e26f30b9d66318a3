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

#ifndef PHYLOCSP_COUPLING_HPP_
#define PHYLOCSP_COUPLING_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace phylocsp {

inline constexpr std::uint64_t kShortcutLeafCap = std::uint64_t{1} << 20;

// Law of the shortcut map L_{M,N}, N = M^dprime, for source j in [0, M):
// leaf v has probability (M/N) * B(v,j) / dprime, where B(v,j) counts the
// base-M digits of v equal to j.
std::vector<double> lmn_pmf(int M, int dprime, int j);

double total_variation(std::span<const double> p, std::span<const double> q);

struct JointEntry {
  std::size_t x;
  std::size_t y;
  double mass;
};

// Coupling of p (first coordinate) and q (second) that keeps min(p_i, q_i)
// on the diagonal and matches the leftover mass greedily in ascending index
// order; the off-diagonal mass equals the total variation.
std::vector<JointEntry> optimal_coupling(std::span<const double> p,
                                         std::span<const double> q);
std::vector<double> first_marginal(std::span<const JointEntry> joint, std::size_t n);
std::vector<double> second_marginal(std::span<const JointEntry> joint, std::size_t n);

// Random map [M] -> [N] with uniform marginals, coupled coordinate-wise with
// one shared draw of L_{M,N}. With probability eta the whole map is replaced
// by independent uniform values.
class CoupledMap {
 public:
  CoupledMap(int M, int dprime, double eta = 0.0);

  int M() const { return M_; }
  int dprime() const { return dprime_; }
  std::uint64_t N() const { return N_; }
  double tv(int j) const { return tv_.at(j); }
  double max_tv() const;
  const std::vector<JointEntry>& coupling(int j) const { return joint_.at(j); }
  // Exact law of coordinate j (uniform by construction).
  std::vector<double> marginal(int j) const;

  // Draws (L_{M,N}(u), L(u)) for all u.
  void sample(std::mt19937_64& rng, std::vector<std::uint64_t>& shortcut,
              std::vector<std::uint64_t>& coupled) const;

 private:
  int M_, dprime_;
  std::uint64_t N_;
  double eta_;
  std::vector<std::vector<JointEntry>> joint_;
  std::vector<double> tv_;
  // rows_[j][x]: (y, cumulative conditional probability)
  std::vector<std::vector<std::vector<std::pair<std::uint64_t, double>>>> rows_;
};

// Leaves of the perfect k-ary tree with `depth` levels, given as integers in
// [0, k^depth). True iff leaf i sits under child i of the LCA of all; a
// tuple with repeated leaves is never a cousin tuple.
bool cousins_index(std::span<const std::uint64_t> leaves, int k, int depth);

// All cousin k-tuples among the leaves of the perfect k-ary tree.
std::vector<std::vector<std::uint64_t>> cousin_tuples(int k, int depth);

struct CouplingExperiment {
  int M = 0, dprime = 0, k = 0;
  std::uint64_t N = 0, trials = 0;
  std::vector<double> tv;              // exact, per source coordinate
  double max_tv = 0.0;
  double marginal_error = 0.0;         // max |Pr{L(u)=v} - 1/N|, exact
  std::vector<double> chi2, chi2_p;    // empirical uniformity per coordinate
  bool chi2_pass = false;              // every p-value >= kChi2Alpha
  double shortcut_rate = 0.0;          // cousin tuples kept by L_{M,N}
  std::vector<double> tuple_rates;     // per cousin tuple of T_M, coupled map
  double coupled_min_rate = 0.0;
  double bound = 0.0;                  // 1 - k * max_tv
  bool preservation_pass = false;
};

inline constexpr double kChi2Alpha = 1e-3;

// M must be a power of k. Cousin tuples of the k-ary tree with M leaves are
// checked in the k-ary tree with N leaves.
CouplingExperiment coupling_experiment(int M, int dprime, int k, std::uint64_t trials,
                                       std::uint64_t seed, double eta = 0.0);

}  // namespace phylocsp

#endif  // PHYLOCSP_COUPLING_HPP_
