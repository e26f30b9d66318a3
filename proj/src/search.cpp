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

#include <algorithm>
#include <array>
#include <bit>
#include <optional>
#include <random>

#include "phylocsp/error.hpp"
#include "phylocsp/instance.hpp"

namespace phylocsp {

namespace {

constexpr double kTieTolerance = 1e-12;

// Top-down branch and bound over ordered full binary trees. Every tree is
// generated exactly once as a sequence of ordered block splits; a
// constraint's payoff becomes known once no open block holds two of its
// variables, at which point its pattern is read off the root-to-leaf paths.
class SplitSearch {
 public:
  SplitSearch(const Instance& inst, std::optional<std::span<const int>> order)
      : inst_(inst), n_(inst.num_vars()), ordered_(order.has_value()) {
    item_var_.resize(n_);
    std::vector<int> item_of(n_);
    for (int i = 0; i < n_; ++i) {
      item_var_[i] = ordered_ ? (*order)[i] : i;
      item_of[item_var_[i]] = i;
    }
    for (const auto& c : inst.constraints()) {
      Item it;
      it.k = static_cast<int>(c.vars.size());
      for (int j = 0; j < it.k; ++j) {
        it.items[j] = item_of[c.vars[j]];
        it.mask |= 1u << it.items[j];
      }
      it.w = c.w;
      it.f = c.payoff.get();
      it.wmax = c.w * c.payoff->max_payoff();
      cons_.push_back(it);
    }
    if (!ordered_) {
      // Mirror images score the same, so only the first one in canonical
      // order is generated.
      std::vector<const PayoffFunction*> seen;
      mirror_free_ = true;
      for (const auto& c : inst.constraints()) {
        if (std::find(seen.begin(), seen.end(), c.payoff.get()) != seen.end()) continue;
        seen.push_back(c.payoff.get());
        if (!is_swap_invariant(*c.payoff)) {
          mirror_free_ = false;
          break;
        }
      }
    }
    path_.assign(n_, 0);
    open_.assign(cons_.size(), 0);
  }

  OptResult run(std::optional<double> incumbent) {
    const std::uint32_t all = n_ == 32 ? ~0u : (1u << n_) - 1;
    score_ = 0.0;
    rest_ = 0.0;
    for (std::size_t c = 0; c < cons_.size(); ++c) {
      if (std::popcount(cons_[c].mask) >= 2) {
        open_[c] = 1;
        rest_ += cons_[c].wmax;
      } else {
        score_ += cons_[c].w * payoff_now(c);
      }
    }
    if (incumbent) {
      best_ = *incumbent - 1.5 * kTieTolerance;
      have_best_ = true;
    }
    if (n_ >= 2) pending_.push_back({all, 0});
    dfs();
    OptResult r;
    r.value = best_value_;
    r.solution = rebuild(all);
    r.visited = visited_;
    return r;
  }

 private:
  struct Item {
    std::array<int, kMaxPatternArity> items{};
    std::uint32_t mask = 0;
    int k = 0;
    double w = 0.0, wmax = 0.0;
    const PayoffFunction* f = nullptr;
  };
  struct Block {
    std::uint32_t mask;
    int depth;
  };
  struct Change {
    std::size_t c;
    int delta;
  };

  double payoff_now(std::size_t c) const {
    const Item& it = cons_[c];
    std::array<int, kMaxPatternArity> order{};
    std::array<int, kMaxPatternArity> depth{};
    for (int j = 0; j < it.k; ++j) order[j] = j;
    std::sort(order.begin(), order.begin() + it.k, [&](int a, int b) {
      return path_[it.items[a]] < path_[it.items[b]];
    });
    for (int j = 0; j + 1 < it.k; ++j) {
      depth[j] = std::countl_zero(path_[it.items[order[j]]] ^
                                  path_[it.items[order[j + 1]]]);
    }
    return it.f->payoff(encode_pattern(std::span<const int>(order.data(), it.k),
                                       std::span<const int>(depth.data(), it.k - 1)));
  }

  void dfs() {
    ++visited_;
    if (pending_.empty()) {
      if (!have_best_ || score_ > best_ + kTieTolerance) {
        best_ = score_;
        best_value_ = score_;
        have_best_ = true;
        best_splits_ = splits_;
        found_ = true;
      }
      return;
    }
    Block blk = pending_.back();
    pending_.pop_back();
    for_each_split(blk.mask, [&](std::uint32_t a) { try_split(blk, a); });
    pending_.push_back(blk);
  }

  template <typename F>
  void for_each_split(std::uint32_t s, F&& f) {
    int size = std::popcount(s);
    if (ordered_) {
      std::uint32_t low = s & (~s + 1);
      std::uint32_t a = 0;
      for (int i = 1; i < size; ++i) {
        a |= low << (i - 1);
        f(a);
      }
      return;
    }
    std::array<int, 32> elems{};
    int m = 0;
    for (std::uint32_t t = s; t; t &= t - 1) elems[m++] = std::countr_zero(t);
    std::array<int, 32> idx{};
    const int top = mirror_free_ ? size / 2 : size - 1;
    for (int a = 1; a <= top; ++a) {
      for (int i = 0; i < a; ++i) idx[i] = i;
      while (true) {
        if (mirror_free_ && 2 * a == size && idx[0] != 0) break;
        std::uint32_t mask = 0;
        for (int i = 0; i < a; ++i) mask |= 1u << elems[idx[i]];
        f(mask);
        int i = a - 1;
        while (i >= 0 && idx[i] == m - a + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < a; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }

  void try_split(const Block& blk, std::uint32_t a) {
    std::uint32_t b = blk.mask ^ a;
    const std::uint32_t bit = 1u << (31 - blk.depth);
    for (std::uint32_t t = b; t; t &= t - 1) path_[std::countr_zero(t)] |= bit;
    double saved_score = score_, saved_rest = rest_;
    std::size_t mark = trail_.size();
    for (std::size_t c = 0; c < cons_.size(); ++c) {
      const std::uint32_t m = cons_[c].mask;
      if (std::popcount(m & blk.mask) < 2) continue;
      int delta = -1 + (std::popcount(m & a) >= 2) + (std::popcount(m & b) >= 2);
      if (delta == 0) continue;
      open_[c] += delta;
      trail_.push_back({c, delta});
      if (open_[c] == 0) {
        score_ += cons_[c].w * payoff_now(c);
        rest_ -= cons_[c].wmax;
      }
    }
    if (!have_best_ || score_ + rest_ > best_ + kTieTolerance) {
      splits_.push_back({blk.mask, a});
      if (std::popcount(b) >= 2) pending_.push_back({b, blk.depth + 1});
      if (std::popcount(a) >= 2) pending_.push_back({a, blk.depth + 1});
      dfs();
      if (std::popcount(a) >= 2) pending_.pop_back();
      if (std::popcount(b) >= 2) pending_.pop_back();
      splits_.pop_back();
    }
    while (trail_.size() > mark) {
      open_[trail_.back().c] -= trail_.back().delta;
      trail_.pop_back();
    }
    score_ = saved_score;
    rest_ = saved_rest;
    for (std::uint32_t t = b; t; t &= t - 1) path_[std::countr_zero(t)] &= ~bit;
  }

  Solution rebuild(std::uint32_t all) const {
    if (!found_) throw ResourceError("search found no tree");
    TreeBuilder builder;
    auto build = [&](auto& self, std::uint32_t s) -> NodeId {
      if (std::popcount(s) == 1) {
        return builder.add_leaf(inst_.variables()[item_var_[std::countr_zero(s)]]);
      }
      for (const auto& [mask, left] : best_splits_) {
        if (mask == s) {
          NodeId l = self(self, left);
          NodeId r = self(self, s ^ left);
          return builder.add_internal({l, r});
        }
      }
      throw ResourceError("incomplete split record");
    };
    NodeId root = build(build, all);
    return solution_from_tree(std::move(builder).build(root), inst_);
  }

  const Instance& inst_;
  int n_;
  bool ordered_;
  bool mirror_free_ = false;
  std::vector<int> item_var_;
  std::vector<Item> cons_;
  std::vector<std::uint32_t> path_;
  std::vector<int> open_;
  std::vector<Block> pending_;
  std::vector<Change> trail_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> splits_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> best_splits_;
  double score_ = 0.0, rest_ = 0.0;
  double best_ = 0.0, best_value_ = 0.0;
  bool have_best_ = false, found_ = false;
  std::uint64_t visited_ = 0;
};

// Uniform recursive splitting with a fixed seed; only used to seed the bound.
double sampled_incumbent(const Instance& inst,
                         std::optional<std::span<const int>> order) {
  std::mt19937_64 rng(0x5eed);
  int n = inst.num_vars();
  std::vector<int> seq(n);
  for (int i = 0; i < n; ++i) seq[i] = order ? (*order)[i] : i;
  double best = 0.0;
  for (int trial = 0; trial < 64; ++trial) {
    if (!order) std::shuffle(seq.begin(), seq.end(), rng);
    TreeBuilder b;
    auto build = [&](auto& self, int lo, int hi) -> NodeId {
      if (hi - lo == 1) return b.add_leaf(inst.variables()[seq[lo]]);
      int mid = std::uniform_int_distribution<int>(lo + 1, hi - 1)(rng);
      NodeId l = self(self, lo, mid);
      NodeId r = self(self, mid, hi);
      return b.add_internal({l, r});
    };
    NodeId root = build(build, 0, n);
    best = std::max(best,
                    value(solution_from_tree(std::move(b).build(root), inst), inst));
  }
  return best;
}

void check_cap(const Instance& inst, int cap, const char* what) {
  if (inst.num_vars() < 1) throw ArgumentError("instance has no variables");
  if (cap > 31) throw ArgumentError("search cap above 31 variables");
  if (inst.num_vars() > cap) {
    throw ResourceError(std::string(what) + ": " +
                        std::to_string(inst.num_vars()) +
                        " variables exceed the cap of " + std::to_string(cap));
  }
}

}  // namespace

OptResult brute_force_opt(const Instance& inst, int cap) {
  check_cap(inst, cap, "brute_force_opt");
  double inc = sampled_incumbent(inst, std::nullopt);
  return SplitSearch(inst, std::nullopt).run(inc);
}

OptResult opt_given_order(const Instance& inst, std::span<const int> order,
                          int cap) {
  check_cap(inst, cap, "opt_given_order");
  if (static_cast<int>(order.size()) != inst.num_vars()) {
    throw ArgumentError("order must list every variable once");
  }
  std::vector<int> seen(inst.num_vars(), 0);
  for (int v : order) {
    if (v < 0 || v >= inst.num_vars() || seen[v]++) {
      throw ArgumentError("order is not a permutation of the variables");
    }
  }
  double inc = sampled_incumbent(inst, order);
  return SplitSearch(inst, order).run(inc);
}

}  // namespace phylocsp
