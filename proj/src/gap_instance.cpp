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

#include "phylocsp/gap_instance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "phylocsp/error.hpp"

namespace phylocsp {

namespace {

using boost::multiprecision::cpp_int;

std::uint64_t ipow(std::uint64_t base, int e) {
  std::uint64_t r = 1;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

void check_spec(const GapSpec& spec) {
  if (!spec.payoff) throw ArgumentError("gap spec without payoff");
  if (spec.k() < 2) throw ArgumentError("gap instance needs payoff arity k >= 2");
  if (spec.d < 1) throw ArgumentError("gap instance needs depth d >= 1");
  double leaves = std::pow(static_cast<double>(spec.k()), spec.d);
  if (leaves > kGapLeafCap) {
    throw ResourceError("gap instance with k^d = " + std::to_string(static_cast<long long>(leaves)) +
                        " leaves exceeds the cap of " + std::to_string(kGapLeafCap));
  }
}

Rational level_weight(int k, int d, int i) {
  cpp_int den = cpp_int(d) * boost::multiprecision::pow(cpp_int(k), i) *
                boost::multiprecision::pow(cpp_int(k), (d - i - 1) * k);
  return Rational(1, den);
}

const Pattern& satisfying_pattern(const PayoffFunction& f, std::vector<Pattern>& scratch) {
  for (const auto& e : f.table()) {
    if (e.payoff == 1.0 && e.pattern.is_binary()) return e.pattern;
  }
  if (f.default_payoff() == 1.0) {
    scratch = enumerate_patterns(f.arity(), 2);
    for (const auto& p : scratch) {
      if (f.payoff(p.code()) == 1.0) return p;
    }
  }
  throw ArgumentError("payoff '" + f.name() + "' has no binary pattern with payoff 1");
}

}  // namespace

int GapSpec::num_leaves() const { return static_cast<int>(ipow(k(), d)); }

Tree gap_base_tree(const GapSpec& spec) {
  check_spec(spec);
  return build_perfect(spec.k(), spec.d);
}

bool cousins(const Tree& tree, std::span<const NodeId> leaves) {
  if (leaves.size() < 2) throw ArgumentError("cousins needs at least two leaves");
  NodeId u = tree.lca(leaves);
  if (tree.is_leaf(u)) throw ArgumentError("cousins needs distinct leaves");
  if (tree.children(u).size() < leaves.size()) return false;
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (tree.child_index_toward(u, leaves[i]) != static_cast<int>(i)) return false;
  }
  return true;
}

std::uint64_t gap_constraint_count(int k, int d) {
  std::uint64_t total = 0;
  for (int i = 0; i < d; ++i) total += ipow(k, i) * ipow(ipow(k, d - i - 1), k);
  return total;
}

Rational lkm_weight(std::span<const int> leaves, const GapSpec& spec) {
  check_spec(spec);
  const int k = spec.k(), d = spec.d;
  const int m = spec.num_leaves();
  if (static_cast<int>(leaves.size()) != k) {
    throw ArgumentError("lkm_weight expects a " + std::to_string(k) + "-tuple");
  }
  std::vector<std::vector<int>> digits;
  for (int l : leaves) {
    if (l < 1 || l > m) throw ArgumentError("leaf " + std::to_string(l) + " out of range");
    std::vector<int> dg(d);
    int x = l - 1;
    for (int p = d - 1; p >= 0; --p) {
      dg[p] = x % k;
      x /= k;
    }
    digits.push_back(std::move(dg));
  }
  int level = 0;
  while (level < d && std::all_of(digits.begin(), digits.end(), [&](const auto& dg) {
           return dg[level] == digits[0][level];
         })) {
    ++level;
  }
  if (level == d) return Rational(0);
  for (int j = 0; j < k; ++j) {
    if (digits[j][level] != j) return Rational(0);
  }
  return level_weight(k, d, level);
}

Instance build_gap(const GapSpec& spec) {
  check_spec(spec);
  const int k = spec.k(), d = spec.d;
  std::uint64_t count = gap_constraint_count(k, d);
  if (count > kGapConstraintCap) {
    throw ResourceError("gap instance would have " + std::to_string(count) +
                        " constraints, above the cap of " + std::to_string(kGapConstraintCap));
  }
  const int m = spec.num_leaves();
  std::vector<std::string> vars;
  for (int i = 1; i <= m; ++i) vars.push_back(std::to_string(i));
  std::vector<Constraint> cons;
  cons.reserve(count);
  for (int i = 0; i < d; ++i) {
    Rational w = level_weight(k, d, i);
    const std::uint64_t sub = ipow(k, d - i - 1);
    for (std::uint64_t node = 0; node < ipow(k, i); ++node) {
      std::vector<std::uint64_t> suffix(k, 0);
      while (true) {
        Constraint c;
        c.payoff = spec.payoff;
        c.weight = w;
        for (int j = 0; j < k; ++j) {
          c.vars.push_back(static_cast<int>((node * k + j) * sub + suffix[j]));
        }
        cons.push_back(std::move(c));
        int j = k - 1;
        while (j >= 0 && ++suffix[j] == sub) suffix[j--] = 0;
        if (j < 0) break;
      }
    }
  }
  return Instance(std::move(vars), std::move(cons));
}

Solution satisfying_solution(const GapSpec& spec) {
  check_spec(spec);
  std::vector<Pattern> scratch;
  const Pattern& p = satisfying_pattern(*spec.payoff, scratch);
  const Tree base = gap_base_tree(spec);
  const Tree& pt = p.tree();
  TreeBuilder b;
  auto copy_pattern = [&](auto& self_pattern, auto& self_base, NodeId u, NodeId q) -> NodeId {
    if (pt.is_leaf(q)) {
      return self_base(self_base, self_pattern, base.children(u)[p.slot_of(q) - 1]);
    }
    std::vector<NodeId> ch;
    for (NodeId c : pt.children(q)) ch.push_back(self_pattern(self_pattern, self_base, u, c));
    return b.add_internal(std::move(ch));
  };
  auto expand = [&](auto& self_base, auto& self_pattern, NodeId u) -> NodeId {
    if (base.is_leaf(u)) return b.add_leaf(base.label(u));
    return self_pattern(self_pattern, self_base, u, pt.root());
  };
  NodeId root = expand(expand, copy_pattern, base.root());
  Instance shell([&] {
    std::vector<std::string> v;
    for (int i = 1; i <= spec.num_leaves(); ++i) v.push_back(std::to_string(i));
    return v;
  }(), {});
  return solution_from_tree(std::move(b).build(root), shell);
}

OrderExperiment order_experiment(const GapSpec& spec, int num_orders,
                                 std::uint64_t seed, bool exhaustive) {
  check_spec(spec);
  const int m = spec.num_leaves();
  if (m > kDefaultOrderCap) {
    throw ResourceError("order experiment needs k^d <= " + std::to_string(kDefaultOrderCap) +
                        ", got " + std::to_string(m));
  }
  if (exhaustive && m > 8) throw ResourceError("exhaustive order experiment needs k^d <= 8");
  if (!exhaustive && num_orders < 1) throw ArgumentError("num_orders must be >= 1");
  Instance inst = build_gap(spec);
  OrderExperiment out;
  out.exhaustive = exhaustive;
  std::vector<int> pi(m);
  std::iota(pi.begin(), pi.end(), 0);
  if (exhaustive) {
    do {
      out.values.push_back(opt_given_order(inst, pi).value);
    } while (std::next_permutation(pi.begin(), pi.end()));
  } else {
    std::mt19937_64 rng(seed);
    for (int t = 0; t < num_orders; ++t) {
      std::shuffle(pi.begin(), pi.end(), rng);
      out.values.push_back(opt_given_order(inst, pi).value);
    }
  }
  const double n = static_cast<double>(out.values.size());
  out.mean = std::accumulate(out.values.begin(), out.values.end(), 0.0) / n;
  if (!exhaustive && out.values.size() > 1) {
    double ss = 0.0;
    for (double v : out.values) ss += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(ss / (n - 1) / n);
  }
  return out;
}

double child_label_divergence(int k, int d, std::span<const int> labels, int q) {
  if (k < 2 || d < 1 || q < 1) throw ArgumentError("divergence needs k >= 2, d >= 1, q >= 1");
  const std::uint64_t m = ipow(k, d);
  if (labels.size() != m) throw ArgumentError("need one label per leaf");
  // prefix[i][x]: number of leaves before x with label i
  std::vector<std::vector<std::uint32_t>> prefix(q, std::vector<std::uint32_t>(m + 1, 0));
  for (std::uint64_t x = 0; x < m; ++x) {
    if (labels[x] < 0 || labels[x] >= q) throw ArgumentError("label outside [0,q)");
    for (int i = 0; i < q; ++i) prefix[i][x + 1] = prefix[i][x] + (labels[x] == i);
  }
  auto mu = [&](int i, std::uint64_t lo, std::uint64_t len) {
    return static_cast<double>(prefix[i][lo + len] - prefix[i][lo]) / static_cast<double>(len);
  };
  double total = 0.0;
  for (int t = 0; t < d; ++t) {
    const std::uint64_t nodes = ipow(k, t), span = ipow(k, d - t), child = span / k;
    double level = 0.0;
    for (std::uint64_t a = 0; a < nodes; ++a) {
      const std::uint64_t lo = a * span;
      double s = 0.0;
      for (int y = 0; y < k; ++y) {
        for (int i = 0; i < q; ++i) s += std::fabs(mu(i, lo + y * child, child) - mu(i, lo, span));
      }
      level += s / k;
    }
    total += level / static_cast<double>(nodes);
  }
  return total / d;
}

double divergence_bound(int q, int d) {
  if (q < 1 || d < 1) throw ArgumentError("divergence bound needs q >= 1, d >= 1");
  return std::sqrt(2.0 * std::log2(static_cast<double>(q)) / d);
}

std::vector<NamedLabeling> adversarial_labelings(int k, int d, int q) {
  if (k < 2 || d < 1 || q < 1) throw ArgumentError("labelings need k >= 2, d >= 1, q >= 1");
  const std::uint64_t m = ipow(k, d);
  auto digit = [&](std::uint64_t x, int level) {
    return static_cast<int>((x / ipow(k, d - level - 1)) % k);
  };
  std::vector<NamedLabeling> out(3);
  out[0].name = "top-subtree";
  out[1].name = "leaf-mod";
  out[2].name = "middle-child";
  for (std::uint64_t x = 0; x < m; ++x) {
    out[0].labels.push_back(digit(x, 0) % q);
    out[1].labels.push_back(static_cast<int>(x % q));
    out[2].labels.push_back(digit(x, d / 2) % q);
  }
  return out;
}

}  // namespace phylocsp
