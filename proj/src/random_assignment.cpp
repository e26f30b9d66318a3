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

#include "phylocsp/random_assignment.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <thread>

#include "phylocsp/error.hpp"

namespace phylocsp {

namespace {

constexpr std::uint64_t kChunkTrials = 1u << 16;

// Precomputed skeleton data shared by the sampler and the exact recursion.
struct Prepared {
  const Tree* sk;
  std::vector<std::size_t> lo, hi;  // leaf-position range per node
  std::vector<double> mass;         // probability of reaching the node
  std::vector<double> left;         // conditional probability of going left
  std::vector<std::array<double, 7>> pow_left, pow_right;
  std::vector<NodeId> post;

  explicit Prepared(const BiasedMeasure& m) : sk(&m.skeleton) {
    const Tree& t = m.skeleton;
    lo.assign(t.num_nodes(), 0);
    hi.assign(t.num_nodes(), 0);
    mass.assign(t.num_nodes(), 0.0);
    left.assign(t.num_nodes(), 0.5);
    post = t.post_order();
    for (NodeId v : post) {
      if (t.is_leaf(v)) {
        lo[v] = t.leaf_position(v);
        hi[v] = lo[v] + 1;
        mass[v] = m.leaf_probs[lo[v]];
        continue;
      }
      NodeId a = t.children(v)[0], b = t.children(v)[1];
      lo[v] = lo[a];
      hi[v] = hi[b];
      mass[v] = mass[a] + mass[b];
      if (mass[v] > 0) left[v] = mass[a] / mass[v];
    }
    pow_left.resize(t.num_nodes());
    pow_right.resize(t.num_nodes());
    for (NodeId v = 0; v < t.num_nodes(); ++v) {
      pow_left[v][0] = pow_right[v][0] = 1.0;
      for (int s = 1; s < 7; ++s) {
        pow_left[v][s] = pow_left[v][s - 1] * left[v];
        pow_right[v][s] = pow_right[v][s - 1] * (1.0 - left[v]);
      }
    }
  }
};

// Draws the leaf order and the depths of consecutive LCAs of a sampled tree
// on n items.
class Sampler {
 public:
  explicit Sampler(const BiasedMeasure& m)
      : prep_(m), dist_(m.leaf_probs.begin(), m.leaf_probs.end()) {}

  void sample(int n, Rng& rng, std::vector<int>& order, std::vector<int>& depths) {
    order.clear();
    depths.clear();
    pos_.resize(n);
    for (int i = 0; i < n; ++i) pos_[i] = static_cast<std::size_t>(dist_(rng));
    std::vector<int> items(n);
    std::iota(items.begin(), items.end(), 0);
    descend(items, 0, rng, order, depths);
  }

 private:
  void descend(std::vector<int>& items, int depth, Rng& rng,
               std::vector<int>& order, std::vector<int>& depths) {
    if (items.size() == 1) {
      order.push_back(items[0]);
      return;
    }
    const Tree& sk = *prep_.sk;
    auto [mn, mx] = std::minmax_element(items.begin(), items.end(), [&](int a, int b) {
      return pos_[a] < pos_[b];
    });
    NodeId u = sk.lca(sk.leaves()[pos_[*mn]], sk.leaves()[pos_[*mx]]);
    if (sk.is_leaf(u)) {
      fair_split(items, depth, rng, order, depths);
      return;
    }
    std::size_t cut = prep_.hi[sk.children(u)[0]];
    std::vector<int> l, r;
    for (int i : items) (pos_[i] < cut ? l : r).push_back(i);
    descend(l, depth + 1, rng, order, depths);
    depths.push_back(depth);
    descend(r, depth + 1, rng, order, depths);
  }

  void fair_split(std::vector<int>& items, int depth, Rng& rng,
                  std::vector<int>& order, std::vector<int>& depths) {
    if (items.size() == 1) {
      order.push_back(items[0]);
      return;
    }
    std::vector<int> l, r;
    do {
      l.clear();
      r.clear();
      std::uint64_t bits = 0;
      for (std::size_t i = 0; i < items.size(); ++i) {
        if (i % 64 == 0) bits = rng();
        ((bits >> (i % 64)) & 1 ? r : l).push_back(items[i]);
      }
    } while (l.empty() || r.empty());
    fair_split(l, depth + 1, rng, order, depths);
    depths.push_back(depth);
    fair_split(r, depth + 1, rng, order, depths);
  }

  Prepared prep_;
  std::discrete_distribution<int> dist_;
  std::vector<std::size_t> pos_;
};

NodeId build_ordered(TreeBuilder& b, std::span<const std::string> labels,
                     std::span<const int> order, std::span<const int> depths,
                     int base) {
  if (order.size() == 1) return b.add_leaf(labels[order[0]]);
  std::size_t split = 0;
  while (depths[split] != base) ++split;
  NodeId l = build_ordered(b, labels, order.subspan(0, split + 1),
                           depths.subspan(0, split), base + 1);
  NodeId r = build_ordered(b, labels, order.subspan(split + 1),
                           depths.subspan(split + 1), base + 1);
  return b.add_internal({l, r});
}

std::uint64_t ipow2(int n) { return std::uint64_t{1} << n; }

// Runs `body(rng, count)` over fixed chunks and returns per-chunk (sum, sumsq)
// reduced in chunk order.
McEstimate run_chunks(std::uint64_t trials, std::uint64_t seed,
                      const std::function<void(Rng&, std::uint64_t, double&, double&)>& body) {
  if (trials == 0) throw ArgumentError("trials must be >= 1");
  std::uint64_t chunks = (trials + kChunkTrials - 1) / kChunkTrials;
  std::vector<double> sum(chunks, 0.0), sq(chunks, 0.0);
  auto work = [&](std::uint64_t c) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    Rng rng(seq);
    std::uint64_t n = std::min(kChunkTrials, trials - c * kChunkTrials);
    body(rng, n, sum[c], sq[c]);
  };
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads == 1 || chunks == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) work(c);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::uint64_t>(threads, chunks); ++t) {
      pool.emplace_back([&, t] {
        for (std::uint64_t c = t; c < chunks; c += threads) work(c);
      });
    }
    for (auto& th : pool) th.join();
  }
  double s = 0.0, s2 = 0.0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    s += sum[c];
    s2 += sq[c];
  }
  McEstimate est;
  est.trials = trials;
  est.mean = s / static_cast<double>(trials);
  double var = trials > 1 ? std::max(0.0, (s2 - s * est.mean) / static_cast<double>(trials - 1)) : 0.0;
  est.half_width = 1.96 * std::sqrt(var / static_cast<double>(trials));
  return est;
}

}  // namespace

void validate_measure(const BiasedMeasure& m) {
  if (!m.skeleton.is_full_binary()) throw ArgumentError("skeleton must be full binary");
  if (m.leaf_probs.size() != m.skeleton.num_leaves()) {
    throw ArgumentError("measure needs one probability per skeleton leaf");
  }
  double total = 0.0;
  for (double p : m.leaf_probs) {
    if (!(p >= 0.0)) throw ArgumentError("negative leaf probability");
    total += p;
  }
  if (std::fabs(total - 1.0) > 1e-12) {
    throw ArgumentError("leaf probabilities sum to " + std::to_string(total));
  }
}

BiasedMeasure uniform_measure() { return {build_caterpillar(1, Side::kLeft), {1.0}}; }

BiasedMeasure biased_caterpillar(double delta, int depth, Side side) {
  if (!(delta > 0.0 && delta < 1.0)) throw ArgumentError("delta must lie in (0,1)");
  if (depth < 1) throw ArgumentError("caterpillar depth must be >= 1");
  BiasedMeasure m{build_caterpillar(depth + 1, side), {}};
  // Mass by depth of the hanging leaf: delta(1-delta)^(j-1) for j = 1..depth,
  // bottom leaf (1-delta)^depth.
  std::vector<double> by_depth(depth + 1);
  double stay = 1.0;
  for (int j = 1; j <= depth; ++j) {
    by_depth[j - 1] = stay * delta;
    stay *= 1.0 - delta;
  }
  by_depth[depth] = stay;
  m.leaf_probs.resize(depth + 1);
  for (NodeId l : m.skeleton.leaves()) {
    int d = m.skeleton.depth(l);
    bool bottom = d == depth && m.skeleton.leaf_position(l) ==
                                    (side == Side::kLeft ? 0u : static_cast<std::size_t>(depth));
    m.leaf_probs[m.skeleton.leaf_position(l)] = bottom ? by_depth[depth] : by_depth[d - 1];
  }
  return m;
}

BiasedMeasure measure_from_splits(int depth, std::span<const double> left_probs) {
  if (depth < 0 || depth > 20) throw ArgumentError("skeleton depth outside 0..20");
  if (left_probs.size() != ipow2(depth) - 1) {
    throw ArgumentError("need 2^depth - 1 split probabilities");
  }
  BiasedMeasure m{build_perfect(2, depth), std::vector<double>(ipow2(depth), 0.0)};
  std::size_t next = 0;
  auto walk = [&](auto& self, int level, std::size_t first_leaf, double mass) -> void {
    if (level == depth) {
      m.leaf_probs[first_leaf] = mass;
      return;
    }
    double p = left_probs[next++];
    if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("split probability outside [0,1]");
    std::size_t half = ipow2(depth - level - 1);
    self(self, level + 1, first_leaf, mass * p);
    self(self, level + 1, first_leaf + half, mass * (1.0 - p));
  };
  walk(walk, 0, 0, 1.0);
  return m;
}

Tree sample_tree(const BiasedMeasure& m, std::span<const std::string> labels, Rng& rng) {
  validate_measure(m);
  if (labels.empty()) throw ArgumentError("sample_tree needs at least one label");
  Sampler s(m);
  std::vector<int> order, depths;
  s.sample(static_cast<int>(labels.size()), rng, order, depths);
  TreeBuilder b;
  NodeId root = build_ordered(b, labels, order, depths, 0);
  return std::move(b).build(root);
}

Solution sample_solution(const BiasedMeasure& m, const Instance& inst, Rng& rng) {
  return solution_from_tree(sample_tree(m, inst.variables(), rng), inst);
}

std::vector<std::pair<Pattern, double>> uniform_split_pattern_dist(int k) {
  if (k < 1 || k > 6) throw ResourceError("uniform_split_pattern_dist supports k <= 6");
  BiasedMeasure u = uniform_measure();
  std::vector<std::pair<Pattern, double>> out;
  for (auto& p : enumerate_patterns(k, 2)) {
    double pr = pattern_probability(u, p);
    out.emplace_back(std::move(p), pr);
  }
  return out;
}

namespace {

double pattern_probability(const Prepared& prep, const Pattern& p) {
  const Tree& pt = p.tree();
  if (!pt.is_full_binary()) return 0.0;
  const Tree& sk = *prep.sk;
  const std::size_t np = pt.num_nodes();
  std::vector<NodeId> qorder = pt.post_order();
  std::vector<int> size(np, 1);
  std::vector<double> fair(np, 1.0);  // probability under fair splitting
  for (NodeId q : qorder) {
    if (pt.is_leaf(q)) continue;
    NodeId a = pt.children(q)[0], b = pt.children(q)[1];
    size[q] = size[a] + size[b];
    fair[q] = fair[a] * fair[b] / static_cast<double>(ipow2(size[q]) - 2);
  }
  std::vector<double> r(sk.num_nodes() * np, 0.0);
  auto at = [&](NodeId v, NodeId q) -> double& { return r[v * np + q]; };
  for (NodeId v : prep.post) {
    for (NodeId q : qorder) {
      if (size[q] == 1) {
        at(v, q) = 1.0;
      } else if (sk.is_leaf(v)) {
        at(v, q) = fair[q];
      } else {
        NodeId a = sk.children(v)[0], b = sk.children(v)[1];
        NodeId qa = pt.children(q)[0], qb = pt.children(q)[1];
        const auto& pl = prep.pow_left[v];
        const auto& pr = prep.pow_right[v];
        at(v, q) = pl[size[q]] * at(a, q) + pr[size[q]] * at(b, q) +
                   pl[size[qa]] * pr[size[qb]] * at(a, qa) * at(b, qb);
      }
    }
  }
  return at(sk.root(), pt.root());
}

}  // namespace

double pattern_probability(const BiasedMeasure& m, const Pattern& p) {
  if (p.arity() > 6) throw ResourceError("pattern_probability supports arity <= 6");
  validate_measure(m);
  return pattern_probability(Prepared(m), p);
}

double alpha_exact(const BiasedMeasure& m, const PayoffFunction& f) {
  if (f.arity() > 6) throw ResourceError("alpha_exact supports arity <= 6");
  validate_measure(m);
  Prepared prep(m);
  double total = f.default_payoff();
  for (const auto& e : f.table()) {
    if (e.payoff == f.default_payoff()) continue;
    total += (e.payoff - f.default_payoff()) * pattern_probability(prep, e.pattern);
  }
  return std::clamp(total, 0.0, 1.0);
}

McEstimate alpha_mc(const BiasedMeasure& m, const PayoffFunction& f,
                    std::uint64_t trials, std::uint64_t seed) {
  validate_measure(m);
  const int k = f.arity();
  return run_chunks(trials, seed, [&](Rng& rng, std::uint64_t n, double& s, double& s2) {
    Sampler sampler(m);
    std::vector<int> order, depths;
    for (std::uint64_t t = 0; t < n; ++t) {
      sampler.sample(k, rng, order, depths);
      double v = f.payoff(encode_pattern(order, depths));
      s += v;
      s2 += v * v;
    }
  });
}

McEstimate instance_mc(const BiasedMeasure& m, const Instance& inst,
                       std::uint64_t trials, std::uint64_t seed) {
  validate_measure(m);
  if (inst.num_vars() < 1) throw ArgumentError("instance has no variables");
  return run_chunks(trials, seed, [&](Rng& rng, std::uint64_t n, double& s, double& s2) {
    Sampler sampler(m);
    std::vector<int> order, depths;
    for (std::uint64_t t = 0; t < n; ++t) {
      sampler.sample(inst.num_vars(), rng, order, depths);
      TreeBuilder b;
      NodeId root = build_ordered(b, inst.variables(), order, depths, 0);
      double v = value(solution_from_tree(std::move(b).build(root), inst), inst);
      s += v;
      s2 += v * v;
    }
  });
}

namespace {

class ThresholdSearch {
 public:
  ThresholdSearch(std::span<const PayoffFunction* const> fs, std::span<const double> mu,
                  const SearchOptions& opts)
      : fs_(fs.begin(), fs.end()), mu_(mu.begin(), mu.end()), opts_(opts) {
    if (fs_.empty() || fs_.size() != mu_.size()) {
      throw ArgumentError("need one weight per payoff");
    }
    double total = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < fs_.size(); ++i) {
      if (!fs_[i]) throw ArgumentError("null payoff");
      if (!(mu_[i] >= 0.0)) throw ArgumentError("mixture weights must be nonnegative");
      total += mu_[i];
      scale += mu_[i] * fs_[i]->max_payoff();
    }
    if (std::fabs(total - 1.0) > 1e-9) throw ArgumentError("mixture weights must sum to 1");
    if (opts_.depth_cap < 0 || opts_.depth_cap > 6) {
      throw ArgumentError("depth cap must lie in 0..6");
    }
    if (opts_.grid_steps < 1) throw ArgumentError("grid steps must be >= 1");
    tol_ = 1e-13 * std::max(scale, 1e-300);
    for (const auto* f : fs_) report_.payoffs.push_back(f->name());
    report_.mu = mu_;
    report_.options = opts_;
  }

  ThresholdReport run() {
    BiasedMeasure u = uniform_measure();
    consider(u, eval(u), "uniform", 0.0);
    if (opts_.depth_cap > 0) grid_family();
    if (opts_.include_caterpillars) {
      caterpillar_family(Side::kLeft);
      caterpillar_family(Side::kRight);
    }
    return std::move(report_);
  }

 private:
  double eval(const BiasedMeasure& m) {
    ++report_.evaluations;
    double v = 0.0;
    for (std::size_t i = 0; i < fs_.size(); ++i) {
      if (mu_[i] > 0.0) v += mu_[i] * alpha_exact(m, *fs_[i]);
    }
    return v;
  }

  void consider(const BiasedMeasure& m, double v, const char* family, double delta) {
    if (!have_ || v > report_.alpha + tol_) {
      have_ = true;
      report_.alpha = v;
      report_.best = m;
      report_.family = family;
      report_.caterpillar_delta = delta;
    }
  }

  void grid_family() {
    const int d = opts_.depth_cap;
    std::vector<double> p(ipow2(d) - 1, 0.5);
    double best = eval(measure_from_splits(d, p));
    auto try_value = [&](std::size_t i, double x) {
      double old = p[i];
      p[i] = x;
      double v = eval(measure_from_splits(d, p));
      if (v > best + tol_) {
        best = v;
        return true;
      }
      p[i] = old;
      return false;
    };
    for (int sweep = 0; sweep < 20; ++sweep) {
      bool improved = false;
      for (std::size_t i = 0; i < p.size(); ++i) {
        for (int g = 0; g <= opts_.grid_steps; ++g) {
          improved |= try_value(i, static_cast<double>(g) / opts_.grid_steps);
        }
      }
      if (!improved) break;
    }
    double h = 0.5 / opts_.grid_steps;
    for (int round = 0; round < opts_.refine_rounds; ++round, h /= 2) {
      for (int sweep = 0; sweep < 20; ++sweep) {
        bool improved = false;
        for (std::size_t i = 0; i < p.size(); ++i) {
          improved |= try_value(i, std::min(1.0, p[i] + h)) ||
                      try_value(i, std::max(0.0, p[i] - h));
        }
        if (!improved) break;
      }
    }
    consider(measure_from_splits(d, p), best, "grid", 0.0);
  }

  int caterpillar_depth(double delta) const {
    double need = std::ceil(std::log(1e-12) / std::log1p(-delta));
    return static_cast<int>(std::clamp(need, 1.0, static_cast<double>(opts_.caterpillar_depth_cap)));
  }

  void caterpillar_family(Side side) {
    const char* family = side == Side::kLeft ? "caterpillar-left" : "caterpillar-right";
    std::vector<double> deltas;
    for (int g = 1; g < opts_.grid_steps; ++g) deltas.push_back(static_cast<double>(g) / opts_.grid_steps);
    for (int j = 2; j <= 8; ++j) deltas.push_back(std::ldexp(1.0, -j));
    std::sort(deltas.begin(), deltas.end());
    deltas.erase(std::unique(deltas.begin(), deltas.end()), deltas.end());
    auto value_at = [&](double delta) {
      return eval(biased_caterpillar(delta, caterpillar_depth(delta), side));
    };
    std::vector<double> vals;
    for (double dl : deltas) vals.push_back(value_at(dl));
    std::size_t bi = 0;
    for (std::size_t i = 1; i < vals.size(); ++i) {
      if (vals[i] > vals[bi] + tol_) bi = i;
    }
    // Golden-section refinement in log(delta) between the neighbors.
    double lo = std::log(deltas[bi > 0 ? bi - 1 : 0]);
    double hi = std::log(deltas[std::min(bi + 1, deltas.size() - 1)]);
    double best_delta = deltas[bi], best = vals[bi];
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int it = 0; it < 12 && hi - lo > 1e-6; ++it) {
      double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
      double v1 = value_at(std::exp(x1)), v2 = value_at(std::exp(x2));
      if (v1 > best + tol_) { best = v1; best_delta = std::exp(x1); }
      if (v2 > best + tol_) { best = v2; best_delta = std::exp(x2); }
      if (v1 >= v2) {
        hi = x2;
      } else {
        lo = x1;
      }
    }
    consider(biased_caterpillar(best_delta, caterpillar_depth(best_delta), side), best,
             family, best_delta);
  }

  std::vector<const PayoffFunction*> fs_;
  std::vector<double> mu_;
  SearchOptions opts_;
  double tol_ = 0.0;
  bool have_ = false;
  ThresholdReport report_;
};

}  // namespace

ThresholdReport alpha_opt_search(const PayoffFunction& f, const SearchOptions& opts) {
  const PayoffFunction* fs[] = {&f};
  const double mu[] = {1.0};
  return ThresholdSearch(fs, mu, opts).run();
}

ThresholdReport mixture_threshold(std::span<const PayoffFunction* const> fs,
                                  std::span<const double> mu, const SearchOptions& opts) {
  return ThresholdSearch(fs, mu, opts).run();
}

}  // namespace phylocsp
